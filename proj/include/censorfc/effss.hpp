// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/core.hpp"

#include <span>
#include <vector>

namespace censorfc::effss {

enum class AcfAggregation { MeanOverParcels, MedianOverRuns };

inline constexpr std::size_t kDefaultMaxLag = 100;

struct AcfEstimate {
  Vector acf;  // lags 0..max_lag, acf[0] = 1; lags beyond max_lag are treated as 0
  std::size_t max_lag = kDefaultMaxLag;
  AcfAggregation aggregation = AcfAggregation::MedianOverRuns;

  /// Autocorrelation at any lag (0 beyond max_lag).
  double at(std::size_t lag) const { return lag <= max_lag && static_cast<Eigen::Index>(lag) < acf.size() ? acf(static_cast<Eigen::Index>(lag)) : 0.0; }
  /// Wraps explicit values; throws ValidationError unless acf[0] == 1 and |acf| <= 1.
  static AcfEstimate from_values(Vector values);
};

/// Biased-normalisation ACF of one series, lags 0..max_lag.
Vector series_acf(const Eigen::Ref<const Vector>& x, std::size_t max_lag);

/// Per-parcel ACF averaged over parcels within each run, then the element-wise
/// median across runs. Constant parcels are skipped with a warning.
/// Throws ArgumentError when a run is not longer than max_lag and DegenerateError
/// when every parcel of every run is constant.
AcfEstimate estimate_acf(std::span<const ParcelTimeseries> runs, std::size_t max_lag = kDefaultMaxLag);

/// Tr(Sigma_sub^2) for the Toeplitz correlation restricted to the kept volumes,
/// from the histogram of pairwise lags (no matrix is formed).
double trace_sigma_squared(const AcfEstimate& acf, const KeepVector& keep);

/// Effective duration in volumes: n^2 / Tr(Sigma_sub^2). Throws ArgumentError for fewer than 2 kept volumes.
double t_eff(const AcfEstimate& acf, const KeepVector& keep);

/// Sampling variance of a correlation estimate: (1 - rho^2)^2 Tr(Sigma_sub^2) / n^2.
double corr_sampling_var(double rho, const AcfEstimate& acf, const KeepVector& keep);

struct NoiseDecomposition {
  double sigma2 = 0.0;
  double t_eff = 0.0;
  double mse = 0.0;
};

/// sigma^2 = T_eff * MSE.
double noise_variance(double mse, double t_eff);
NoiseDecomposition decompose(double mse, double t_eff);

}  // namespace censorfc::effss
