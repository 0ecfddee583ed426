// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/bwas.hpp"

#include "censorfc/errors.hpp"
#include "censorfc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace censorfc::bwas {

namespace {

void check_unit(double icc, const char* name) {
  if (!(icc >= 0.0 && icc <= 1.0)) throw ArgumentError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

IccEstimate icc_from_test_retest(std::span<const double> visit1, std::span<const double> visit2, double t_ref_minutes) {
  if (visit1.size() != visit2.size()) throw ShapeError("test-retest vectors differ in length");
  if (visit1.size() < 3) throw ArgumentError("ICC needs at least 3 participants");
  std::vector<double> diff(visit1.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = visit2[i] - visit1[i];
  IccEstimate est;
  est.t_ref_minutes = t_ref_minutes;
  est.noise_var = stats::variance(diff) / 2.0;
  const double total = (stats::variance(visit1) + stats::variance(visit2)) / 2.0;
  est.signal_var = total - est.noise_var;
  if (est.signal_var < 0.0) {
    est.signal_var = 0.0;
    est.clipped = true;
  }
  const double denom = est.signal_var + est.noise_var;
  if (!(denom > 0.0)) throw DegenerateError("ICC undefined: zero signal and noise variance");
  est.icc = est.signal_var / denom;
  return est;
}

double icc_extrapolate(const IccEstimate& ref, double t_new_minutes) {
  if (!(t_new_minutes > 0.0)) throw ArgumentError("extrapolation duration must be > 0");
  if (!(ref.t_ref_minutes > 0.0)) throw ArgumentError("ICC estimate has no reference duration");
  const double noise = ref.noise_var * ref.t_ref_minutes / t_new_minutes;
  const double denom = ref.signal_var + noise;
  if (!(denom > 0.0)) throw DegenerateError("ICC undefined: zero signal and noise variance");
  return ref.signal_var / denom;
}

double proportional_strength(double icc_x, double icc_y) {
  check_unit(icc_x, "icc_x");
  check_unit(icc_y, "icc_y");
  return std::sqrt(icc_x * icc_y);
}

double bwas_variance(double rho_true, double icc_x, double icc_y, std::size_t n) {
  if (!(std::abs(rho_true) < 1.0)) throw ArgumentError("|rho| must be < 1");
  if (n < 2) throw ArgumentError("n must be >= 2");
  check_unit(icc_x, "icc_x");
  check_unit(icc_y, "icc_y");
  const double a = 1.0 - rho_true * rho_true * icc_x * icc_y;
  return a * a / static_cast<double>(n);
}

std::size_t required_n(double rho_true, double icc_x, double icc_y, double target_var) {
  if (!(target_var > 0.0)) throw ArgumentError("target variance must be > 0");
  if (!(std::abs(rho_true) < 1.0)) throw ArgumentError("|rho| must be < 1");
  check_unit(icc_x, "icc_x");
  check_unit(icc_y, "icc_y");
  const double a = 1.0 - rho_true * rho_true * icc_x * icc_y;
  const double raw = a * a / target_var;
  // Do not round an exact quotient such as 1/0.01 up to 101.
  auto n = static_cast<std::size_t>(std::ceil(raw * (1.0 - 1e-12)));
  n = std::max<std::size_t>(n, 2);
  while (a * a / static_cast<double>(n) > target_var) ++n;
  return n;
}

double correction_factor(double icc_x, double icc_y) {
  check_unit(icc_x, "icc_x");
  check_unit(icc_y, "icc_y");
  if (!(icc_x * icc_y > 0.0)) throw ArgumentError("correction factor undefined for zero reliability");
  return 1.0 / std::sqrt(icc_x * icc_y);
}

CorrectedRho bias_correct(double rho_star, double icc_x, double icc_y, double icc_floor) {
  check_unit(icc_y, "icc_y");
  if (!(icc_y > 0.0)) throw ArgumentError("icc_y must be > 0 for bias correction");
  if (!(icc_x >= icc_floor) || icc_x <= 0.0) return {std::numeric_limits<double>::quiet_NaN(), CorrectionStatus::Excluded};
  const double v = rho_star * correction_factor(std::min(icc_x, 1.0), icc_y);
  if (v > 1.0) return {1.0, CorrectionStatus::Clipped};
  if (v < -1.0) return {-1.0, CorrectionStatus::Clipped};
  return {v, CorrectionStatus::Ok};
}

CorrectionSummary bias_correct(std::span<const double> rho_star, std::span<const double> icc_x, double icc_y,
                               double icc_floor) {
  if (rho_star.size() != icc_x.size()) throw ShapeError("rho and ICC vectors differ in length");
  CorrectionSummary out;
  out.edges.reserve(rho_star.size());
  for (std::size_t e = 0; e < rho_star.size(); ++e) {
    auto c = bias_correct(rho_star[e], icc_x[e], icc_y, icc_floor);
    out.excluded += c.status == CorrectionStatus::Excluded;
    out.clipped += c.status == CorrectionStatus::Clipped;
    out.edges.push_back(c);
  }
  return out;
}

AttenuationResult empirical_attenuation(std::span<const Vector> rho_hat_replicates, const Vector& truth_corrected,
                                        const std::vector<bool>& excluded_upstream, double epsilon) {
  if (rho_hat_replicates.empty()) throw ArgumentError("no attenuation replicates");
  const auto edges = truth_corrected.size();
  for (const auto& r : rho_hat_replicates)
    if (r.size() != edges) throw ShapeError("estimate and truth edge spaces differ");
  if (!excluded_upstream.empty() && excluded_upstream.size() != static_cast<std::size_t>(edges))
    throw ShapeError("exclusion mask length differs from edge count");
  AttenuationResult res;
  res.ratio = Vector::Constant(edges, std::numeric_limits<double>::quiet_NaN());
  res.excluded.assign(static_cast<std::size_t>(edges), false);
  double sum = 0.0;
  for (Eigen::Index e = 0; e < edges; ++e) {
    const auto ue = static_cast<std::size_t>(e);
    if (!excluded_upstream.empty() && excluded_upstream[ue]) {
      res.excluded[ue] = true;
      ++res.excluded_floor;
      continue;
    }
    const double t = truth_corrected(e);
    if (!std::isfinite(t) || std::abs(t) < epsilon) {
      res.excluded[ue] = true;
      ++res.excluded_near_zero;
      continue;
    }
    double acc = 0.0;
    for (const auto& r : rho_hat_replicates) acc += r(e) / t;
    res.ratio(e) = acc / static_cast<double>(rho_hat_replicates.size());
    sum += res.ratio(e);
    ++res.included;
  }
  res.mean_ratio = res.included ? sum / static_cast<double>(res.included) : std::numeric_limits<double>::quiet_NaN();
  return res;
}

Vector bwas_correlations(const Matrix& fc, const Vector& behavior) {
  if (fc.rows() != behavior.size()) throw ShapeError("FC rows differ from behavior length");
  if (fc.rows() < 3) throw ArgumentError("BWAS needs at least 3 participants");
  const Vector b = behavior.array() - behavior.mean();
  const double bn = b.norm();
  if (!(bn > 0.0)) throw DegenerateError("behavior is constant");
  const Matrix c = fc.rowwise() - fc.colwise().mean();
  Vector r(fc.cols());
  for (Eigen::Index e = 0; e < fc.cols(); ++e) {
    const double cn = c.col(e).norm();
    r(e) = cn > 0.0 ? std::clamp(c.col(e).dot(b) / (cn * bn), -1.0, 1.0) : std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

BwasEstimate bwas_estimate(const Matrix& fc, const Vector& behavior, double icc_x, double icc_y) {
  BwasEstimate out;
  out.rho_hat = bwas_correlations(fc, behavior);
  out.proportional_strength = proportional_strength(icc_x, icc_y);
  out.n_participants = static_cast<std::size_t>(fc.rows());
  out.variance.resize(out.rho_hat.size());
  for (Eigen::Index e = 0; e < out.rho_hat.size(); ++e) {
    const double expected = out.rho_hat(e);
    // (1 - E[rho_hat]^2)^2 / n with the observed correlation standing in for E[rho_hat].
    const double a = 1.0 - (std::isfinite(expected) ? expected * expected : 0.0);
    out.variance(e) = a * a / static_cast<double>(out.n_participants);
  }
  return out;
}

}  // namespace censorfc::bwas
