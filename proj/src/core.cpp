// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/core.hpp"

#include "censorfc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace censorfc {

std::size_t edge_index(std::size_t i, std::size_t j, std::size_t parcels) {
  if (!(i < j && j < parcels)) {
    throw ArgumentError("edge_index requires i < j < P, got (" + std::to_string(i) + ", " + std::to_string(j) +
                        ", P=" + std::to_string(parcels) + ")");
  }
  // Edges before row i: sum_{r<i} (P-1-r) = i(2P-i-1)/2.
  return i * (2 * parcels - i - 1) / 2 + (j - i - 1);
}

std::pair<std::size_t, std::size_t> edge_pair(std::size_t k, std::size_t parcels) {
  if (parcels < 2 || k >= edge_count(parcels)) {
    throw ArgumentError("edge index " + std::to_string(k) + " out of range for P=" + std::to_string(parcels));
  }
  // Closed-form row estimate, corrected for rounding.
  const double p = static_cast<double>(parcels);
  const double disc = (2.0 * p - 1.0) * (2.0 * p - 1.0) - 8.0 * static_cast<double>(k);
  auto i = static_cast<std::size_t>(std::max(0.0, std::floor(((2.0 * p - 1.0) - std::sqrt(std::max(disc, 0.0))) / 2.0)));
  auto row_start = [parcels](std::size_t r) { return r * (2 * parcels - r - 1) / 2; };
  while (i > 0 && row_start(i) > k) --i;
  while (i + 1 < parcels && row_start(i + 1) <= k) ++i;
  return {i, i + 1 + (k - row_start(i))};
}

std::size_t parcels_for_edges(std::size_t edges) {
  const auto guess = static_cast<std::size_t>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(edges))) / 2.0));
  for (std::size_t p = guess > 2 ? guess - 1 : 2; p <= guess + 1; ++p) {
    if (edge_count(p) == edges) return p;
  }
  throw ShapeError(std::to_string(edges) + " is not a triangular edge count");
}

// ---------------------------------------------------------------------------

ParcelTimeseries::ParcelTimeseries(Matrix data, double tr_seconds, std::string run_id, std::string participant_id)
    : data_(std::move(data)), tr_(tr_seconds), run_id_(std::move(run_id)), participant_id_(std::move(participant_id)) {
  if (!(tr_ > 0.0) || !std::isfinite(tr_)) throw ValidationError("tr_seconds must be positive");
  if (data_.rows() < 2 || data_.cols() < 2) {
    throw ShapeError("timeseries needs at least 2 volumes and 2 parcels, got " + std::to_string(data_.rows()) + "x" +
                     std::to_string(data_.cols()));
  }
  if (!data_.allFinite()) {
    for (Eigen::Index r = 0; r < data_.rows(); ++r)
      for (Eigen::Index c = 0; c < data_.cols(); ++c)
        if (!std::isfinite(data_(r, c)))
          throw ValidationError("non-finite value at volume " + std::to_string(r) + ", parcel " + std::to_string(c));
  }
}

ParcelTimeseries ParcelTimeseries::head(std::size_t n) const {
  if (n > volumes()) throw InsufficientDataError("requested " + std::to_string(n) + " volumes of " + std::to_string(volumes()));
  return ParcelTimeseries(data_.topRows(static_cast<Eigen::Index>(n)), tr_, run_id_, participant_id_);
}

ParcelTimeseries ParcelTimeseries::select(const KeepVector& keep) const {
  if (keep.size() != volumes()) throw ShapeError("keep vector length does not match volume count");
  const auto n = static_cast<Eigen::Index>(std::count(keep.begin(), keep.end(), true));
  Matrix out(n, data_.cols());
  Eigen::Index r = 0;
  for (std::size_t t = 0; t < keep.size(); ++t)
    if (keep[t]) out.row(r++) = data_.row(static_cast<Eigen::Index>(t));
  return ParcelTimeseries(std::move(out), tr_, run_id_, participant_id_);
}

void MotionTrace::validate() const {
  const auto t = fd.size();
  if (dvars.size() != t) throw ValidationError("fd and dvars lengths differ");
  if (realignment.size() != 0 && (realignment.rows() != t || realignment.cols() != 6))
    throw ValidationError("realignment must be T x 6");
  if (!fd_flags.empty() && static_cast<Eigen::Index>(fd_flags.size()) != t) throw ValidationError("fd_flags length");
  if (!dvars_flags.empty() && static_cast<Eigen::Index>(dvars_flags.size()) != t) throw ValidationError("dvars_flags length");
  if ((fd.array() < 0.0).any() || (dvars.array() < 0.0).any()) throw ValidationError("fd and dvars must be >= 0");
}

MotionTrace MotionTrace::head(std::size_t n) const {
  if (static_cast<Eigen::Index>(n) > fd.size()) throw InsufficientDataError("motion trace too short for slice");
  const auto m = static_cast<Eigen::Index>(n);
  MotionTrace out;
  if (realignment.size() != 0) out.realignment = realignment.topRows(m);
  out.fd = fd.head(m);
  out.dvars = dvars.head(m);
  if (!fd_flags.empty()) out.fd_flags.assign(fd_flags.begin(), fd_flags.begin() + m);
  if (!dvars_flags.empty()) out.dvars_flags.assign(dvars_flags.begin(), dvars_flags.begin() + m);
  return out;
}

std::string_view to_string(CensorLevel level) {
  switch (level) {
    case CensorLevel::None: return "none";
    case CensorLevel::Lenient: return "lenient";
    case CensorLevel::Stringent: return "stringent";
    case CensorLevel::Expanded: return "expanded";
  }
  return "none";
}

CensorLevel parse_censor_level(std::string_view name) {
  if (name == "none") return CensorLevel::None;
  if (name == "lenient") return CensorLevel::Lenient;
  if (name == "stringent") return CensorLevel::Stringent;
  if (name == "expanded") return CensorLevel::Expanded;
  throw ArgumentError("unknown censoring level '" + std::string(name) + "'");
}

std::size_t CensorMask::kept() const { return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true)); }

std::vector<std::size_t> CensorMask::censored_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < keep.size(); ++t)
    if (!keep[t]) out.push_back(t);
  return out;
}

CensorMask CensorMask::keep_all(std::size_t volumes) {
  CensorMask m;
  m.keep.assign(volumes, true);
  return m;
}

void FcMatrix::validate() const {
  if (parcel_count < 2 || edge_count(parcel_count) != edges())
    throw ShapeError("FC edge count " + std::to_string(edges()) + " does not match P=" + std::to_string(parcel_count));
  if (!z.allFinite()) throw ValidationError("FC contains non-finite Fisher-z values");
}

Matrix FcMatrix::to_correlation_matrix() const {
  const auto p = static_cast<Eigen::Index>(parcel_count);
  Matrix r = Matrix::Identity(p, p);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j, ++k) r(i, j) = r(j, i) = std::tanh(z(static_cast<Eigen::Index>(k)));
  return r;
}

// ---------------------------------------------------------------------------

void CohortTable::add(std::string participant_id, std::string session_id, std::string measure, double value) {
  if (!std::isfinite(value)) {
    throw ValidationError("non-finite value for (" + participant_id + ", " + session_id + ", " + measure + ")");
  }
  auto key = std::make_tuple(participant_id, session_id, measure);
  if (index_.count(key)) {
    throw ValidationError("duplicate cohort key (" + participant_id + ", " + session_id + ", " + measure + ")");
  }
  index_.emplace(std::move(key), rows_.size());
  rows_.push_back(Row{std::move(participant_id), std::move(session_id), std::move(measure), value});
}

namespace {
template <class Pred, class Get>
std::vector<std::string> unique_in_order(const std::vector<CohortTable::Row>& rows, Pred pred, Get get) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (!pred(r)) continue;
    const auto& v = get(r);
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}
}  // namespace

std::vector<std::string> CohortTable::participants() const {
  return unique_in_order(rows_, [](const Row&) { return true; }, [](const Row& r) -> const std::string& { return r.participant_id; });
}

std::vector<std::string> CohortTable::sessions(const std::string& participant_id) const {
  return unique_in_order(
      rows_, [&](const Row& r) { return r.participant_id == participant_id; },
      [](const Row& r) -> const std::string& { return r.session_id; });
}

std::vector<std::string> CohortTable::measures() const {
  return unique_in_order(rows_, [](const Row&) { return true; }, [](const Row& r) -> const std::string& { return r.measure; });
}

std::optional<double> CohortTable::value(const std::string& participant_id, const std::string& session_id,
                                         const std::string& measure) const {
  auto it = index_.find(std::make_tuple(participant_id, session_id, measure));
  if (it == index_.end()) return std::nullopt;
  return rows_[it->second].value;
}

std::vector<std::pair<std::string, double>> CohortTable::participant_means(const std::string& measure) const {
  std::vector<std::pair<std::string, double>> out;
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& r : rows_) {
    if (r.measure != measure) continue;
    auto& a = acc[r.participant_id];
    a.first += r.value;
    a.second += 1;
  }
  for (const auto& p : participants()) {
    auto it = acc.find(p);
    if (it != acc.end()) out.emplace_back(p, it->second.first / static_cast<double>(it->second.second));
  }
  return out;
}

}  // namespace censorfc
