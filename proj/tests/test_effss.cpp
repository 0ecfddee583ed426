// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/effss.hpp"
#include "censorfc/errors.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace censorfc;
using namespace censorfc::effss;

namespace {
AcfEstimate acf_of(std::vector<double> v) {
  return AcfEstimate::from_values(Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
}

AcfEstimate ar1_acf(double phi, std::size_t lags) {
  Vector v(static_cast<Eigen::Index>(lags + 1));
  for (Eigen::Index l = 0; l < v.size(); ++l) v(l) = std::pow(phi, static_cast<double>(l));
  auto a = AcfEstimate::from_values(v);
  a.max_lag = lags;
  return a;
}
}  // namespace

TEST_SUITE("effss") {
  TEST_CASE("ACF of white noise and AR(1)") {
    Rng rng(1);
    Matrix wn = testing::random_matrix(rng, 5000, 4);
    const std::vector<ParcelTimeseries> runs{ParcelTimeseries(wn, 1.0)};
    const auto a = estimate_acf(runs, 20);
    CHECK(a.acf(0) == 1.0);
    CHECK(a.acf.tail(20).cwiseAbs().maxCoeff() <= 0.05);

    Matrix ar(5000, 3);
    for (Eigen::Index c = 0; c < 3; ++c) ar.col(c) = testing::ar1_series(rng, 5000, 0.5);
    const std::vector<ParcelTimeseries> ar_runs{ParcelTimeseries(ar, 1.0)};
    const auto b = estimate_acf(ar_runs, 10);
    CHECK(b.acf(1) >= 0.45);
    CHECK(b.acf(1) <= 0.55);
    CHECK(b.acf(2) >= 0.20);
    CHECK(b.acf(2) <= 0.30);
    CHECK((b.acf.array().abs() <= 1.0).all());
    CHECK(b.at(11) == 0.0);
  }

  TEST_CASE("ACF aggregation: median over runs, constant parcels skipped") {
    Rng rng(2);
    Matrix with_const = testing::random_matrix(rng, 300, 3);
    with_const.col(1).setConstant(2.0);
    const std::vector<ParcelTimeseries> runs{ParcelTimeseries(with_const, 1.0)};
    const auto a = estimate_acf(runs, 5);
    Vector expected = Vector::Zero(6);
    for (Eigen::Index c : {0, 2}) expected += series_acf(with_const.col(c), 5);
    CHECK((a.acf - expected / 2.0).cwiseAbs().maxCoeff() < 1e-12);

    const std::vector<ParcelTimeseries> constant{ParcelTimeseries(Matrix::Constant(50, 2, 1.0), 1.0)};
    CHECK_THROWS_AS(estimate_acf(constant, 5), DegenerateError);
    const std::vector<ParcelTimeseries> short_run{ParcelTimeseries(testing::random_matrix(rng, 10, 2), 1.0)};
    CHECK_THROWS_AS(estimate_acf(short_run, 10), ArgumentError);
  }

  TEST_CASE("from_values validates") {
    CHECK_THROWS_AS(acf_of({0.9, 0.5}), ValidationError);
    CHECK_THROWS_AS(acf_of({1.0, 1.5}), ValidationError);
  }

  TEST_CASE("Toeplitz identities") {
    const auto identity = acf_of({1.0, 0.0, 0.0});
    KeepVector keep(50, true);
    keep[3] = keep[10] = false;
    CHECK(t_eff(identity, keep) == 48.0);
    const auto ones = acf_of(std::vector<double>(60, 1.0));
    CHECK(t_eff(ones, keep) == 1.0);
    CHECK_THROWS_AS(t_eff(identity, KeepVector{true, false, false}), ArgumentError);
  }

  TEST_CASE("three-volume example") {
    const auto a = acf_of({1.0, 0.5, 0.25});
    CHECK(trace_sigma_squared(a, KeepVector(3, true)) == 4.125);
    CHECK(t_eff(a, KeepVector(3, true)) == doctest::Approx(9.0 / 4.125));
    CHECK(trace_sigma_squared(a, KeepVector{true, false, true}) == 2.125);
    CHECK(t_eff(a, KeepVector{true, false, true}) == doctest::Approx(4.0 / 2.125));
  }

  TEST_CASE("lag-sum trace equals the explicit matrix trace") {
    Rng rng(3);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t t = 10 + rng.index(291);
      const std::size_t lags = 1 + rng.index(120);
      std::vector<double> v(lags + 1);
      v[0] = 1.0;
      for (std::size_t l = 1; l <= lags; ++l) v[l] = rng.uniform(-1.0, 1.0) * std::pow(0.97, static_cast<double>(l));
      auto a = acf_of(v);
      a.max_lag = lags;
      auto keep = testing::random_keep(rng, t, rng.uniform(0.0, 0.6));
      keep[0] = keep[1] = true;
      const double ref = testing::trace_explicit(v, keep);
      CHECK(std::abs(trace_sigma_squared(a, keep) - ref) <= 1e-9 * ref);
    }
  }

  TEST_CASE("t_eff bounds and translation invariance") {
    Rng rng(4);
    const auto a = ar1_acf(0.4, 100);
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t t = 50 + rng.index(150);
      auto keep = testing::random_keep(rng, t, 0.3);
      keep[0] = keep[1] = true;
      const auto n = static_cast<double>(testing::count_kept(keep));
      const double te = t_eff(a, keep);
      CHECK(te <= n);
      CHECK(te < n);  // adjacent kept volumes are correlated
      KeepVector shifted(keep.size() + 17, false);
      for (std::size_t i = 0; i < keep.size(); ++i) shifted[i + 17] = keep[i];
      CHECK(t_eff(a, shifted) == doctest::Approx(te).epsilon(1e-14));
    }
    // Kept volumes further apart than the ACF reaches: equality.
    const auto short_acf = acf_of({1.0, 0.6});
    KeepVector sparse(40, false);
    for (std::size_t i = 0; i < 40; i += 2) sparse[i] = true;
    CHECK(t_eff(short_acf, sparse) == 20.0);
  }

  TEST_CASE("sampling variance examples") {
    const auto id = acf_of({1.0});
    CHECK(corr_sampling_var(0.0, id, KeepVector(100, true)) == doctest::Approx(0.01));
    CHECK(corr_sampling_var(0.6, id, KeepVector(64, true)) == doctest::Approx(0.0064));
    CHECK_THROWS_AS(corr_sampling_var(1.0, id, KeepVector(64, true)), ArgumentError);
    CHECK_THROWS_AS(corr_sampling_var(-1.2, id, KeepVector(64, true)), ArgumentError);
  }

  TEST_CASE("noise variance identities") {
    CHECK(noise_variance(0.004, 500.0) == doctest::Approx(2.0));
    CHECK(noise_variance(0.0, 300.0) == 0.0);
    const auto d = decompose(0.004, 500.0);
    CHECK(d.sigma2 == d.t_eff * d.mse);
    CHECK(d.sigma2 / (d.t_eff / 2.0) == doctest::Approx(2.0 * d.mse));
    CHECK_THROWS_AS(noise_variance(-1.0, 2.0), ArgumentError);
  }

  TEST_CASE("sample-correlation variance follows the formula (reduced Monte Carlo)") {
    const double rho = 0.3, phi = 0.5;
    const std::size_t t = 200;
    const auto a = ar1_acf(phi, 100);
    const KeepVector keep(t, true);
    Rng rng(5);
    const int reps = 3000;
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const Vector x = testing::ar1_series(rng, t, phi);
      const Vector e = testing::ar1_series(rng, t, phi);
      const Vector y = rho * x + std::sqrt(1.0 - rho * rho) * e;
      const double c = x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());  // zero-mean estimator
      s += c;
      s2 += c * c;
    }
    const double var = (s2 - s * s / reps) / (reps - 1);
    CHECK(var / corr_sampling_var(rho, a, keep) == doctest::Approx(1.0).epsilon(0.15));
  }
}
