// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/effss.hpp"

#include "censorfc/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace censorfc::effss {

AcfEstimate AcfEstimate::from_values(Vector values) {
  if (values.size() < 1 || values(0) != 1.0) throw ValidationError("ACF must start with acf[0] = 1");
  if ((values.array().abs() > 1.0).any() || !values.allFinite()) throw ValidationError("ACF values must lie in [-1, 1]");
  AcfEstimate e;
  e.max_lag = static_cast<std::size_t>(values.size() - 1);
  e.acf = std::move(values);
  return e;
}

Vector series_acf(const Eigen::Ref<const Vector>& x, std::size_t max_lag) {
  const auto n = x.size();
  const Vector c = x.array() - x.mean();
  const double denom = c.squaredNorm();
  Vector out = Vector::Zero(static_cast<Eigen::Index>(max_lag) + 1);
  if (!(denom > 0.0)) return out;
  for (Eigen::Index lag = 0; lag <= static_cast<Eigen::Index>(max_lag) && lag < n; ++lag)
    out(lag) = c.head(n - lag).dot(c.tail(n - lag)) / denom;
  return out;
}

AcfEstimate estimate_acf(std::span<const ParcelTimeseries> runs, std::size_t max_lag) {
  if (runs.empty()) throw ArgumentError("estimate_acf needs at least one run");
  std::vector<Vector> per_run;
  std::size_t skipped = 0;
  for (const auto& run : runs) {
    if (run.volumes() <= max_lag)
      throw ArgumentError("run " + run.run_id() + " has " + std::to_string(run.volumes()) + " volumes, not more than max_lag " +
                          std::to_string(max_lag));
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(max_lag) + 1);
    std::size_t used = 0;
    for (Eigen::Index p = 0; p < run.data().cols(); ++p) {
      const auto col = run.data().col(p);
      if (!((col.array() - col.mean()).matrix().squaredNorm() > 0.0)) {
        ++skipped;
        continue;
      }
      sum += series_acf(col, max_lag);
      ++used;
    }
    if (used > 0) per_run.push_back(sum / static_cast<double>(used));
  }
  if (skipped > 0) spdlog::warn("estimate_acf skipped {} constant parcel series", skipped);
  if (per_run.empty()) throw DegenerateError("every parcel of every run is constant");
  AcfEstimate est;
  est.max_lag = max_lag;
  est.aggregation = runs.size() > 1 ? AcfAggregation::MedianOverRuns : AcfAggregation::MeanOverParcels;
  est.acf.resize(static_cast<Eigen::Index>(max_lag) + 1);
  std::vector<double> vals(per_run.size());
  for (Eigen::Index l = 0; l <= static_cast<Eigen::Index>(max_lag); ++l) {
    for (std::size_t r = 0; r < per_run.size(); ++r) vals[r] = per_run[r](l);
    std::sort(vals.begin(), vals.end());
    const auto m = vals.size();
    est.acf(l) = m % 2 ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
  }
  est.acf(0) = 1.0;
  return est;
}

double trace_sigma_squared(const AcfEstimate& acf, const KeepVector& keep) {
  std::vector<std::size_t> kept;
  for (std::size_t t = 0; t < keep.size(); ++t)
    if (keep[t]) kept.push_back(t);
  const std::size_t n = kept.size();
  double trace = static_cast<double>(n);  // diagonal, acf[0] = 1
  const std::size_t lags = std::min(acf.max_lag, static_cast<std::size_t>(acf.acf.size() - 1));
  // Count ordered pairs at each lag via the keep indicator: c(l) = sum_t keep[t] keep[t+l].
  for (std::size_t lag = 1; lag <= lags && lag < keep.size(); ++lag) {
    const double r = acf.at(lag);
    if (r == 0.0) continue;
    std::size_t pairs = 0;
    for (std::size_t t = 0; t + lag < keep.size(); ++t) pairs += keep[t] && keep[t + lag];
    trace += 2.0 * static_cast<double>(pairs) * r * r;
  }
  return trace;
}

namespace {
double kept_count(const KeepVector& keep) {
  const auto n = static_cast<double>(std::count(keep.begin(), keep.end(), true));
  if (n < 2.0) throw ArgumentError("effective duration needs at least 2 kept volumes");
  return n;
}
}  // namespace

double t_eff(const AcfEstimate& acf, const KeepVector& keep) {
  const double n = kept_count(keep);
  return n * n / trace_sigma_squared(acf, keep);
}

double corr_sampling_var(double rho, const AcfEstimate& acf, const KeepVector& keep) {
  if (!(std::abs(rho) < 1.0)) throw ArgumentError("|rho| must be < 1");
  const double n = kept_count(keep);
  const double a = 1.0 - rho * rho;
  return a * a * trace_sigma_squared(acf, keep) / (n * n);
}

double noise_variance(double mse, double t_eff) {
  if (mse < 0.0 || t_eff < 0.0) throw ArgumentError("mse and t_eff must be >= 0");
  return mse * t_eff;
}

NoiseDecomposition decompose(double mse, double t_eff) { return {noise_variance(mse, t_eff), t_eff, mse}; }

}  // namespace censorfc::effss
