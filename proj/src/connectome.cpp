// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/connectome.hpp"

#include "censorfc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace censorfc::connectome {

FcMatrix fc_estimate(const Matrix& data) {
  if (data.rows() < 3) throw InsufficientDataError("FC needs at least 3 retained volumes");
  if (data.cols() < 2) throw ShapeError("FC needs at least 2 parcels");
  Matrix centered = data.rowwise() - data.colwise().mean();
  Vector norms = centered.colwise().norm();
  for (Eigen::Index p = 0; p < norms.size(); ++p) {
    // Relative to the parcel's magnitude so offsets do not hide a constant signal.
    const double scale = std::max(1.0, data.col(p).cwiseAbs().maxCoeff());
    if (!(norms(p) > 1e-13 * scale * std::sqrt(static_cast<double>(data.rows()))))
      throw DegenerateParcelError(static_cast<std::size_t>(p));
    centered.col(p) /= norms(p);
  }
  const Matrix r = centered.transpose() * centered;
  const auto parcels = static_cast<std::size_t>(data.cols());
  FcMatrix fc;
  fc.parcel_count = parcels;
  fc.n_volumes_retained = static_cast<std::size_t>(data.rows());
  fc.z.resize(static_cast<Eigen::Index>(edge_count(parcels)));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < r.cols(); ++j, ++k) {
      const double v = r(i, j);
      if (!(std::abs(v) < 1.0))
        throw DegenerateError("parcels " + std::to_string(i) + " and " + std::to_string(j) + " are perfectly correlated");
      fc.z(k) = std::atanh(v);
    }
  }
  return fc;
}

FcMatrix fc_estimate(const ParcelTimeseries& residuals) { return fc_estimate(residuals.data()); }

FcMatrix fc_average(std::span<const FcMatrix> fcs) {
  if (fcs.empty()) throw ArgumentError("fc_average of an empty list");
  const auto parcels = fcs.front().parcel_count;
  std::size_t total = 0;
  for (const auto& f : fcs) {
    if (f.parcel_count != parcels || f.edges() != fcs.front().edges()) throw ShapeError("FC parcel counts differ");
    total += f.n_volumes_retained;
  }
  if (total == 0) throw ArgumentError("fc_average has zero total weight");
  FcMatrix out;
  out.parcel_count = parcels;
  out.n_volumes_retained = total;
  out.z = Vector::Zero(fcs.front().z.size());
  for (const auto& f : fcs) out.z += static_cast<double>(f.n_volumes_retained) * f.z;
  out.z /= static_cast<double>(total);
  return out;
}

GroundTruth ground_truth(std::span<const FcMatrix> truth_runs, double tr_seconds, const GroundTruthCriteria& criteria) {
  GroundTruth g;
  g.fc = fc_average(truth_runs);
  g.retained_minutes = static_cast<double>(g.fc.n_volumes_retained) * tr_seconds / 60.0;
  g.sufficient = g.retained_minutes >= criteria.min_truth_minutes;
  return g;
}

// ---------------------------------------------------------------------------
// Errors

Vector squared_error(std::span<const PartitionPair> partitions) {
  if (partitions.empty()) throw ArgumentError("no partitions");
  const auto edges = partitions.front().estimate->z.size();
  Vector abs_err = Vector::Zero(edges);
  double total = 0.0;
  for (const auto& p : partitions) {
    if (p.estimate->z.size() != edges || p.truth->z.size() != edges) throw ShapeError("edge spaces differ");
    if (p.weight < 0.0) throw ArgumentError("partition weights must be >= 0");
    abs_err += p.weight * (p.estimate->z - p.truth->z).cwiseAbs();
    total += p.weight;
  }
  if (!(total > 0.0)) throw ArgumentError("partition weights sum to zero");
  abs_err /= total;
  return abs_err.array().square().matrix();
}

Vector squared_error(std::span<const FcMatrix> estimates, std::span<const FcMatrix> truths,
                     std::span<const double> weights) {
  if (estimates.size() != truths.size() || estimates.size() != weights.size())
    throw ShapeError("estimates, truths and weights differ in length");
  std::vector<PartitionPair> parts;
  for (std::size_t i = 0; i < estimates.size(); ++i) parts.push_back({&estimates[i], &truths[i], weights[i]});
  return squared_error(parts);
}

ErrorReport summarize_errors(std::span<const Vector> squared_errors, std::span<const double> participant_weights) {
  if (squared_errors.empty()) throw ArgumentError("no participants to summarize");
  const auto n = squared_errors.size();
  const auto edges = squared_errors.front().size();
  ErrorReport rep;
  rep.weights.assign(participant_weights.begin(), participant_weights.end());
  if (rep.weights.empty()) rep.weights.assign(n, 1.0);
  if (rep.weights.size() != n) throw ShapeError("participant weights length mismatch");
  const double wsum = std::accumulate(rep.weights.begin(), rep.weights.end(), 0.0);
  if (!(wsum > 0.0)) throw ArgumentError("participant weights sum to zero");
  Vector edge_mse = Vector::Zero(edges);
  rep.participant_rmse.resize(static_cast<Eigen::Index>(n));
  double overall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& se = squared_errors[i];
    if (se.size() != edges) throw ShapeError("edge spaces differ across participants");
    edge_mse += rep.weights[i] * se;
    const double pm = se.mean();
    rep.participant_rmse(static_cast<Eigen::Index>(i)) = std::sqrt(pm);
    overall += rep.weights[i] * pm;
  }
  rep.edge_rmse = (edge_mse / wsum).cwiseSqrt();
  rep.overall_rmse = std::sqrt(overall / wsum);
  return rep;
}

PercentChange percent_change(const ErrorReport& report, const ErrorReport& reference) {
  if (report.edge_rmse.size() != reference.edge_rmse.size() ||
      report.participant_rmse.size() != reference.participant_rmse.size())
    throw ShapeError("reports differ in shape");
  PercentChange pc;
  pc.overall = 100.0 * (report.overall_rmse - reference.overall_rmse) / reference.overall_rmse;
  pc.edge = 100.0 * (report.edge_rmse - reference.edge_rmse).cwiseQuotient(reference.edge_rmse);
  pc.participant =
      100.0 * (report.participant_rmse - reference.participant_rmse).cwiseQuotient(reference.participant_rmse);
  return pc;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank

WilcoxonResult paired_wilcoxon(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  if (a.size() != b.size()) throw ShapeError("paired samples differ in length");
  if (a.size() < 5) throw ArgumentError("paired Wilcoxon needs at least 5 pairs");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  const std::size_t n = d.size();
  if (n < 2) throw DegenerateError("fewer than 2 non-zero paired differences (" + std::to_string(n) + ")");

  // Mid-ranks of |d|, kept doubled so tied ranks stay integral.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return std::abs(d[x]) < std::abs(d[y]); });
  std::vector<std::uint64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const std::uint64_t r2 = (i + 1) + (j + 1);  // 2 * mean rank of positions i..j
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = r2;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  std::uint64_t w2 = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0) w2 += rank2[i];

  WilcoxonResult res;
  res.statistic = static_cast<double>(w2) / 2.0;
  res.n_effective = n;
  double p_upper = 0.0;  // P(W+ >= observed)
  double p_lower = 0.0;  // P(W+ <= observed)
  if (n <= kWilcoxonExactMaxN) {
    res.exact = true;
    const std::uint64_t total = std::accumulate(rank2.begin(), rank2.end(), std::uint64_t{0});
    std::vector<std::uint64_t> counts(total + 1, 0);
    counts[0] = 1;
    std::uint64_t reach = 0;
    for (auto r : rank2) {
      for (std::uint64_t s = reach + 1; s-- > 0;)
        if (counts[s]) counts[s + r] += counts[s];
      reach += r;
    }
    std::uint64_t upper = 0, lower = 0;
    for (std::uint64_t s = 0; s <= total; ++s) {
      if (s >= w2) upper += counts[s];
      if (s <= w2) lower += counts[s];
    }
    const double denom = std::ldexp(1.0, static_cast<int>(n));
    p_upper = static_cast<double>(upper) / denom;
    p_lower = static_cast<double>(lower) / denom;
  } else {
    res.exact = false;
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    const double sigma = std::sqrt(nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0);
    const double w = res.statistic;
    p_upper = 0.5 * std::erfc(((w - mu - 0.5) / sigma) / std::sqrt(2.0));
    p_lower = 0.5 * std::erfc((-(w - mu + 0.5) / sigma) / std::sqrt(2.0));
  }
  switch (alternative) {
    case Alternative::Greater: res.p_value = std::min(1.0, p_upper); break;
    case Alternative::Less: res.p_value = std::min(1.0, p_lower); break;
    case Alternative::TwoSided: res.p_value = std::min(1.0, 2.0 * std::min(p_upper, p_lower)); break;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Durations

double required_duration(std::span<const CurvePoint> curve, double target_rmse, double clamp_low, double clamp_high) {
  if (curve.size() < 2) throw ArgumentError("required_duration needs at least 2 curve points");
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (!(curve[i].duration_minutes > curve[i - 1].duration_minutes))
      throw ArgumentError("curve durations must be strictly increasing");
  if (curve.front().rmse < target_rmse) return clamp_low;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].rmse > target_rmse) continue;
    if (i == 0) return curve[0].duration_minutes;
    const auto& a = curve[i - 1];
    const auto& b = curve[i];
    return a.duration_minutes + (target_rmse - a.rmse) * (b.duration_minutes - a.duration_minutes) / (b.rmse - a.rmse);
  }
  return clamp_high;
}

std::size_t slice_volumes(double minutes, double tr_seconds) {
  if (!(minutes > 0.0)) throw ArgumentError("scan duration must be > 0 minutes");
  if (!(tr_seconds > 0.0)) throw ArgumentError("tr_seconds must be > 0");
  const double v = minutes * 60.0 / (2.0 * tr_seconds);
  return static_cast<std::size_t>(std::floor(v * (1.0 + 1e-12)));
}

std::pair<ParcelTimeseries, ParcelTimeseries> duration_slice(const ParcelTimeseries& lr, const ParcelTimeseries& rl,
                                                             double minutes) {
  if (lr.tr_seconds() != rl.tr_seconds()) throw ArgumentError("LR and RL runs have different TRs");
  const auto n = slice_volumes(minutes, lr.tr_seconds());
  if (n > lr.volumes() || n > rl.volumes())
    throw InsufficientDataError("a " + std::to_string(minutes) + "-minute slice needs " + std::to_string(n) +
                                " volumes per run");
  if (n < 2) throw InsufficientDataError("slice shorter than 2 volumes");
  return {lr.head(n), rl.head(n)};
}

}  // namespace censorfc::connectome
