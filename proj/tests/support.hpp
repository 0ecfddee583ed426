// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures and independent reference implementations for the test suites.
#pragma once

#include "censorfc/core.hpp"
#include "censorfc/random.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace censorfc::testing {

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

inline Vector random_vector(Rng& rng, Eigen::Index n) { return random_matrix(rng, n, 1).col(0); }

inline KeepVector random_keep(Rng& rng, std::size_t n, double censor_rate) {
  KeepVector k(n);
  for (std::size_t t = 0; t < n; ++t) k[t] = !rng.bernoulli(censor_rate);
  return k;
}

inline std::size_t count_kept(const KeepVector& k) {
  std::size_t n = 0;
  for (bool b : k) n += b;
  return n;
}

/// AR(1) series with unit marginal variance.
inline Vector ar1_series(Rng& rng, std::size_t n, double phi) {
  Vector x(static_cast<Eigen::Index>(n));
  const double innov = std::sqrt(1.0 - phi * phi);
  x(0) = rng.normal();
  for (Eigen::Index t = 1; t < x.size(); ++t) x(t) = phi * x(t - 1) + innov * rng.normal();
  return x;
}

/// Fresh scratch directory under the build tree's temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("censorfc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// Reference implementations. Each is a direct transcription of the defining
// rule with no shared code paths with the library.

/// Tr(S^2) with S the explicit Toeplitz matrix restricted to kept rows and columns.
inline double trace_explicit(const std::vector<double>& acf, const KeepVector& keep) {
  std::vector<std::size_t> idx;
  for (std::size_t t = 0; t < keep.size(); ++t)
    if (keep[t]) idx.push_back(t);
  const auto n = static_cast<Eigen::Index>(idx.size());
  Matrix s(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const std::size_t lag = idx[static_cast<std::size_t>(a)] > idx[static_cast<std::size_t>(b)]
                                  ? idx[static_cast<std::size_t>(a)] - idx[static_cast<std::size_t>(b)]
                                  : idx[static_cast<std::size_t>(b)] - idx[static_cast<std::size_t>(a)];
      s(a, b) = lag < acf.size() ? acf[lag] : 0.0;
    }
  return (s * s).trace();
}

/// Expanded censoring by literal rule application on the base flags.
inline KeepVector expanded_reference(const std::vector<bool>& flagged, int before, int after, int min_segment) {
  const int n = static_cast<int>(flagged.size());
  std::vector<bool> censored(flagged.size(), false);
  for (int t = 0; t < n; ++t) {
    if (!flagged[static_cast<std::size_t>(t)]) continue;
    for (int u = t - before; u <= t + after; ++u)
      if (u >= 0 && u < n) censored[static_cast<std::size_t>(u)] = true;
  }
  KeepVector keep(flagged.size());
  for (int t = 0; t < n; ++t) keep[static_cast<std::size_t>(t)] = !censored[static_cast<std::size_t>(t)];
  // A kept volume survives only if its maximal kept run has at least min_segment volumes.
  KeepVector out(flagged.size(), false);
  for (int t = 0; t < n; ++t) {
    if (!keep[static_cast<std::size_t>(t)]) continue;
    int lo = t, hi = t;
    while (lo > 0 && keep[static_cast<std::size_t>(lo - 1)]) --lo;
    while (hi + 1 < n && keep[static_cast<std::size_t>(hi + 1)]) ++hi;
    out[static_cast<std::size_t>(t)] = hi - lo + 1 >= min_segment;
  }
  return out;
}

/// Residuals of y on x via the normal equations, rows of both already deleted.
inline Matrix row_deleted_residuals(const Matrix& y, const Matrix& x, const KeepVector& keep) {
  std::vector<Eigen::Index> rows;
  for (std::size_t t = 0; t < keep.size(); ++t)
    if (keep[t]) rows.push_back(static_cast<Eigen::Index>(t));
  Matrix xs(static_cast<Eigen::Index>(rows.size()), x.cols());
  Matrix ys(static_cast<Eigen::Index>(rows.size()), y.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    xs.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
    ys.row(static_cast<Eigen::Index>(r)) = y.row(rows[r]);
  }
  const Matrix beta = (xs.transpose() * xs).ldlt().solve(xs.transpose() * ys);
  return ys - xs * beta;
}

struct EnumeratedWilcoxon {
  double w_plus = 0.0;
  double p_greater = 0.0;
  double p_less = 0.0;
  double p_two_sided = 0.0;
};

/// Signed-rank test by visiting every one of the 2^n sign assignments.
inline EnumeratedWilcoxon wilcoxon_enumerate(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  const std::size_t n = d.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) less += 1.0;
      if (std::abs(d[j]) == std::abs(d[i])) equal += 1.0;
    }
    rank[i] = less + (equal + 1.0) / 2.0;
  }
  EnumeratedWilcoxon out;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0) out.w_plus += rank[i];
  std::uint64_t ge = 0, le = 0;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t m = 0; m < patterns; ++m) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1u) w += rank[i];
    ge += w >= out.w_plus;
    le += w <= out.w_plus;
  }
  out.p_greater = static_cast<double>(ge) / static_cast<double>(patterns);
  out.p_less = static_cast<double>(le) / static_cast<double>(patterns);
  out.p_two_sided = std::min(1.0, 2.0 * std::min(out.p_greater, out.p_less));
  return out;
}

/// One-sided binomial tail P(X >= k) for X ~ Bin(n, 1/2).
inline double binomial_upper_half(std::size_t k, std::size_t n) {
  double total = 0.0;
  for (std::size_t j = k; j <= n; ++j)
    total += std::exp(std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(j) + 1) -
                      std::lgamma(static_cast<double>(n - j) + 1) - static_cast<double>(n) * std::log(2.0));
  return total;
}

}  // namespace censorfc::testing
