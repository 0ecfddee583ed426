// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/qcfc.hpp"

#include "censorfc/errors.hpp"
#include "censorfc/random.hpp"
#include "censorfc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace censorfc::qcfc {

ParcelGeometry::ParcelGeometry(Matrix centroids) : centroids_(std::move(centroids)) {
  if (centroids_.cols() != 3) throw ShapeError("parcel centroids must be P x 3");
  if (centroids_.rows() < 2) throw ShapeError("geometry needs at least 2 parcels");
  if (!centroids_.allFinite()) throw ValidationError("non-finite centroid");
  const auto p = parcels();
  edge_distances_.resize(static_cast<Eigen::Index>(edge_count(p)));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) edge_distances_(k++) = distance(i, j);
}

double ParcelGeometry::distance(std::size_t i, std::size_t j) const {
  return (centroids_.row(static_cast<Eigen::Index>(i)) - centroids_.row(static_cast<Eigen::Index>(j))).norm();
}

ParcelGeometry ParcelGeometry::synthetic(std::size_t parcels, std::uint64_t seed, double extent_mm) {
  Rng rng(seed, 0x6e0);
  Matrix c(static_cast<Eigen::Index>(parcels), 3);
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index d = 0; d < 3; ++d) c(i, d) = rng.uniform(-extent_mm / 2.0, extent_mm / 2.0);
  return ParcelGeometry(std::move(c));
}

// ---------------------------------------------------------------------------

double standard_qcfc(const Vector& fd, const Vector& fc) {
  if (fd.size() != fc.size()) throw ShapeError("FD and FC lengths differ");
  if (fd.size() < 3) throw ArgumentError("QC-FC needs at least 3 participants");
  return stats::pearson(fd, fc);
}

namespace {

// Centres and scales to unit population variance; nullopt when constant.
std::optional<Vector> standardize(const Vector& x) {
  const Vector c = x.array() - x.mean();
  const double var = c.squaredNorm() / static_cast<double>(x.size());
  if (!(var > 1e-300)) return std::nullopt;
  return Vector(c / std::sqrt(var));
}

std::optional<Vector> unit_variance(const Vector& x) {
  const double var = (x.array() - x.mean()).matrix().squaredNorm() / static_cast<double>(x.size());
  // Below this the regressor is rounding noise from subtracting equal means.
  if (!(var > 1e-24 * std::max(1.0, x.cwiseAbs().maxCoeff()))) return std::nullopt;
  return Vector(x / std::sqrt(var));
}

}  // namespace

double standard_qcfc_regression(const Vector& fd, const Vector& fc) {
  if (fd.size() != fc.size()) throw ShapeError("FD and FC lengths differ");
  auto x = standardize(fd);
  auto y = standardize(fc);
  if (!x || !y) throw DegenerateError("QC-FC with a constant input");
  return x->dot(*y) / x->squaredNorm();
}

RmDesign::RmDesign(std::vector<std::size_t> participant, Vector fd) : participant_(std::move(participant)), fd_(std::move(fd)) {
  if (participant_.size() != static_cast<std::size_t>(fd_.size())) throw ShapeError("participant index and FD lengths differ");
  if (participant_.empty()) throw ArgumentError("empty repeated-measures design");
  n_participants_ = *std::max_element(participant_.begin(), participant_.end()) + 1;
  if (n_participants_ < 2) throw ArgumentError("repeated-measures QC-FC needs at least 2 participants");
  Vector sums = Vector::Zero(static_cast<Eigen::Index>(n_participants_));
  Vector counts = Vector::Zero(static_cast<Eigen::Index>(n_participants_));
  for (std::size_t o = 0; o < participant_.size(); ++o) {
    sums(static_cast<Eigen::Index>(participant_[o])) += fd_(static_cast<Eigen::Index>(o));
    counts(static_cast<Eigen::Index>(participant_[o])) += 1.0;
  }
  if ((counts.array() == 0.0).any()) throw ArgumentError("participant indices must be contiguous from 0");
  participant_means_ = sums.cwiseQuotient(counts);
  grand_mean_ = participant_means_.mean();  // unweighted over participants
  const auto n = static_cast<Eigen::Index>(participant_.size());
  within_raw_.resize(n);
  between_raw_.resize(n);
  for (Eigen::Index o = 0; o < n; ++o) {
    const double m = participant_means_(static_cast<Eigen::Index>(participant_[static_cast<std::size_t>(o)]));
    within_raw_(o) = fd_(o) - m;
    between_raw_(o) = m - grand_mean_;
  }
  between_ = unit_variance(between_raw_);
  within_ = unit_variance(within_raw_);
}

namespace {

// Coefficients for every column of `y` (observations x edges), outcome already prepared.
struct Fit {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> coef;  // regressors x edges
  bool has_between = false;
  bool has_within = false;
};

Fit fit_columns(const RmDesign& d, const Matrix& y) {
  Fit f;
  f.has_between = d.between().has_value();
  f.has_within = d.within().has_value();
  const int k = int(f.has_between) + int(f.has_within);
  if (k == 0) throw DegenerateError("neither between nor within FD regressor has variance");
  Matrix x(static_cast<Eigen::Index>(d.observations()), k);
  int c = 0;
  if (f.has_between) x.col(c++) = *d.between();
  if (f.has_within) x.col(c++) = *d.within();
  const Matrix gram = x.transpose() * x;
  f.coef = gram.ldlt().solve(x.transpose() * y);
  return f;
}

Matrix prepare_outcome(const Matrix& fc, bool scale) {
  Matrix y = fc.rowwise() - fc.colwise().mean();
  if (!scale) return y;
  const double n = static_cast<double>(fc.rows());
  for (Eigen::Index e = 0; e < y.cols(); ++e) {
    const double var = y.col(e).squaredNorm() / n;
    if (var > 1e-300) {
      y.col(e) /= std::sqrt(var);
    } else {
      y.col(e).setZero();
    }
  }
  return y;
}

}  // namespace

RmCoefficients rm_fit(const RmDesign& design, const Vector& fc) {
  if (static_cast<std::size_t>(fc.size()) != design.observations()) throw ShapeError("FC length differs from design");
  RmCoefficients out;
  const Matrix y = fc;
  const auto scaled = fit_columns(design, prepare_outcome(y, true));
  const auto raw = fit_columns(design, prepare_outcome(y, false));
  int c = 0;
  if (scaled.has_between) {
    out.between = scaled.coef(c, 0);
    out.between_unscaled = raw.coef(c, 0);
    ++c;
  }
  if (scaled.has_within) {
    out.within = scaled.coef(c, 0);
    out.within_unscaled = raw.coef(c, 0);
  }
  return out;
}

QcfcResult rm_qcfc(const RmDesign& design, const Matrix& fc) {
  if (static_cast<std::size_t>(fc.rows()) != design.observations()) throw ShapeError("FC rows differ from design");
  const auto edges = static_cast<std::size_t>(fc.cols());
  QcfcResult res;
  const auto fit = fit_columns(design, prepare_outcome(fc, true));
  res.between.assign(edges, std::nullopt);
  res.within.assign(edges, std::nullopt);
  for (std::size_t e = 0; e < edges; ++e) {
    int c = 0;
    if (fit.has_between) res.between[e] = fit.coef(c++, static_cast<Eigen::Index>(e));
    if (fit.has_within) res.within[e] = fit.coef(c, static_cast<Eigen::Index>(e));
  }
  // Standard QC-FC on participant averages.
  const auto np = static_cast<Eigen::Index>(design.participants());
  Matrix fc_mean = Matrix::Zero(np, fc.cols());
  Vector counts = Vector::Zero(np);
  for (std::size_t o = 0; o < design.observations(); ++o) {
    const auto p = static_cast<Eigen::Index>(design.participant()[o]);
    fc_mean.row(p) += fc.row(static_cast<Eigen::Index>(o));
    counts(p) += 1.0;
  }
  for (Eigen::Index p = 0; p < np; ++p) fc_mean.row(p) /= counts(p);
  res.standard.resize(fc.cols());
  if (np >= 3) {
    for (Eigen::Index e = 0; e < fc.cols(); ++e) res.standard(e) = standard_qcfc(design.participant_means(), fc_mean.col(e));
  } else {
    res.standard.setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  return res;
}

CohortMatrices cohort_matrices(const CohortTable& cohort, const std::string& fd_measure, const std::string& edge_prefix) {
  std::size_t edges = 0;
  for (const auto& m : cohort.measures()) {
    if (m.rfind(edge_prefix, 0) != 0) continue;
    const auto k = std::stoul(m.substr(edge_prefix.size()));
    edges = std::max<std::size_t>(edges, k + 1);
  }
  if (edges == 0) throw ValidationError("cohort has no '" + edge_prefix + "<k>' measures");
  std::vector<std::string> edge_names(edges);
  for (std::size_t k = 0; k < edges; ++k) edge_names[k] = edge_prefix + std::to_string(k);

  CohortMatrices out;
  std::vector<std::vector<double>> rows;
  std::vector<double> fd;
  std::map<std::string, std::size_t> pindex;
  for (const auto& pid : cohort.participants()) {
    for (const auto& sid : cohort.sessions(pid)) {
      auto x = cohort.value(pid, sid, fd_measure);
      if (!x) continue;
      std::vector<double> row(edges);
      bool complete = true;
      for (std::size_t k = 0; k < edges && complete; ++k) {
        auto v = cohort.value(pid, sid, edge_names[k]);
        if (!v) complete = false;
        else row[k] = *v;
      }
      if (!complete) continue;
      auto [it, inserted] = pindex.emplace(pid, out.participant_ids.size());
      if (inserted) out.participant_ids.push_back(pid);
      out.participant.push_back(it->second);
      out.session_ids.push_back(sid);
      fd.push_back(*x);
      rows.push_back(std::move(row));
    }
  }
  out.fd = Eigen::Map<const Vector>(fd.data(), static_cast<Eigen::Index>(fd.size()));
  out.fc.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(edges));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t k = 0; k < edges; ++k) out.fc(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
  return out;
}

QcfcResult rm_qcfc(const CohortTable& cohort, const std::string& fd_measure) {
  auto m = cohort_matrices(cohort, fd_measure);
  RmDesign design(m.participant, m.fd);
  return rm_qcfc(design, m.fc);
}

double distance_dependence(const Vector& per_edge, const ParcelGeometry& geometry) {
  if (per_edge.size() != geometry.edge_distances().size())
    throw ShapeError("per-edge values do not match the geometry's edge count");
  return stats::pearson(per_edge, geometry.edge_distances());
}

ValidationResult validation_qcfc(const std::vector<std::size_t>& participant, const Vector& fd, const Matrix& fc) {
  if (participant.size() != static_cast<std::size_t>(fd.size()) || fc.rows() != fd.size())
    throw ShapeError("validation QC-FC inputs differ in length");
  std::map<std::size_t, std::vector<std::size_t>> obs;  // participant -> observations in session order
  for (std::size_t o = 0; o < participant.size(); ++o) obs[participant[o]].push_back(o);
  ValidationResult res;
  std::vector<double> dfd;
  std::vector<Vector> dfc;
  for (const auto& [p, list] : obs) {
    if (list.size() < 2) {
      ++res.participants_excluded;
      continue;
    }
    std::size_t hi = list.front(), lo = list.front();
    bool tie = false;
    for (auto o : list) {
      if (fd(static_cast<Eigen::Index>(o)) > fd(static_cast<Eigen::Index>(hi))) hi = o;
      if (fd(static_cast<Eigen::Index>(o)) < fd(static_cast<Eigen::Index>(lo))) lo = o;
    }
    for (auto o : list) {
      if (o != hi && fd(static_cast<Eigen::Index>(o)) == fd(static_cast<Eigen::Index>(hi))) tie = true;
      if (o != lo && fd(static_cast<Eigen::Index>(o)) == fd(static_cast<Eigen::Index>(lo))) tie = true;
    }
    res.fd_ties += tie;
    dfd.push_back(fd(static_cast<Eigen::Index>(hi)) - fd(static_cast<Eigen::Index>(lo)));
    dfc.emplace_back(fc.row(static_cast<Eigen::Index>(hi)) - fc.row(static_cast<Eigen::Index>(lo)));
  }
  res.participants_used = dfd.size();
  if (dfd.size() < 3) throw ArgumentError("validation QC-FC needs at least 3 participants with 2+ sessions");
  res.r.resize(fc.cols());
  Vector x = Eigen::Map<const Vector>(dfd.data(), static_cast<Eigen::Index>(dfd.size()));
  Vector y(x.size());
  for (Eigen::Index e = 0; e < fc.cols(); ++e) {
    for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = dfc[static_cast<std::size_t>(i)](e);
    res.r(e) = stats::pearson(x, y);
  }
  return res;
}

ValidationResult validation_qcfc(const CohortTable& cohort, const std::string& fd_measure) {
  auto m = cohort_matrices(cohort, fd_measure);
  return validation_qcfc(m.participant, m.fd, m.fc);
}

}  // namespace censorfc::qcfc
