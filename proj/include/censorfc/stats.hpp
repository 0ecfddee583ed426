// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/core.hpp"

#include <span>
#include <vector>

// Small numerical helpers shared across modules.
namespace censorfc::stats {

double mean(std::span<const double> x);
/// Sample variance (n - 1 denominator).
double variance(std::span<const double> x);
/// Population variance (n denominator).
double population_variance(std::span<const double> x);

/// Pearson correlation; throws DegenerateError when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);
inline double pearson(const Vector& x, const Vector& y) {
  return pearson(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                 std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

double median(std::vector<double> x);
/// Linear-interpolation quantile (type 7), q in [0, 1].
double quantile(std::vector<double> x, double q);

/// Standard normal CDF and upper tail.
double normal_cdf(double z);
double normal_sf(double z);
/// Inverse of normal_cdf for p in (0, 1).
double normal_quantile(double p);

inline std::span<const double> view(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace censorfc::stats
