// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/denoise.hpp"
#include "censorfc/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace censorfc;
using namespace censorfc::denoise;

namespace {
CensorMask mask_from(const KeepVector& keep) {
  CensorMask m;
  m.keep = keep;
  m.policy = CensorLevel::Stringent;
  return m;
}
}  // namespace

TEST_SUITE("denoise") {
  TEST_CASE("DCT column counts") {
    CHECK(dct_bases(1185, 0.72, 0.01).cols() == 17);
    const Matrix empty = dct_bases(100, 1.0, 0.004);
    CHECK(empty.cols() == 0);
    CHECK(empty.rows() == 100);
    CHECK_THROWS_AS(dct_bases(100, 1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(dct_bases(100, 1.0, 0.5), ArgumentError);
  }

  TEST_CASE("DCT entries and orthogonality") {
    const std::size_t t = 1185;
    const Matrix d = dct_bases(t, 0.72, 0.01);
    CHECK(d(3, 0) == doctest::Approx(std::cos(std::numbers::pi * 1 * 3.5 / 1185.0)));
    CHECK(d(10, 16) == doctest::Approx(std::cos(std::numbers::pi * 17 * 10.5 / 1185.0)));
    const Matrix g = d.transpose() * d;
    double off = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j)
        if (i != j) off = std::max(off, std::abs(g(i, j)));
    CHECK(off < 1e-10 * static_cast<double>(t));
    // Orthogonal to the intercept as well.
    CHECK((d.transpose() * Vector::Ones(t)).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("36P expansion") {
    Rng rng(2);
    const Matrix rp = testing::random_matrix(rng, 50, 6);
    const Matrix sig = testing::random_matrix(rng, 50, 3);
    const Matrix x = expand_36p(rp, sig);
    REQUIRE(x.cols() == 36);
    CHECK(x(7, 6) == sig(7, 0));
    CHECK(x(7, 9 + 2) == doctest::Approx(rp(7, 2) * rp(7, 2)));
    CHECK(x(0, 18) == 0.0);
    CHECK(x(7, 18 + 4) == doctest::Approx(rp(7, 4) - rp(6, 4)));
    CHECK(x(7, 27 + 8) == doctest::Approx(std::pow(sig(7, 2) - sig(6, 2), 2)));
    CHECK_THROWS_AS(expand_36p(rp, testing::random_matrix(rng, 50, 2)), ShapeError);
  }

  TEST_CASE("design layout and labels") {
    KeepVector keep(10, true);
    keep[2] = keep[7] = false;
    const Matrix nuis = Matrix::Ones(10, 2);
    const Matrix dct = dct_bases(10, 2.0, 0.1);
    const auto d = build_design(nuis, mask_from(keep), dct);
    CHECK(d.count(ColumnKind::Intercept) == 1);
    CHECK(d.count(ColumnKind::Nuisance) == 2);
    CHECK(d.count(ColumnKind::Dct) == static_cast<std::size_t>(dct.cols()));
    CHECK(d.count(ColumnKind::Spike) == 2);
    CHECK(d.labels.size() == static_cast<std::size_t>(d.columns.cols()));
    const Vector e2 = d.columns.col(d.columns.cols() - 2);
    const Vector e7 = d.columns.col(d.columns.cols() - 1);
    CHECK(e2.sum() == 1.0);
    CHECK(e2(2) == 1.0);
    CHECK(e7(7) == 1.0);
    CHECK(build_design(nuis, CensorMask::keep_all(10), dct).count(ColumnKind::Spike) == 0);
    const std::vector<std::size_t> dup{3, 3};
    CHECK_THROWS_AS(build_design(10, nuis, dct, dup), ArgumentError);
    const std::vector<std::size_t> out{10};
    CHECK_THROWS_AS(build_design(10, nuis, dct, out), ArgumentError);
    CHECK_THROWS_AS(build_design(10, Matrix::Ones(9, 1), dct, {}), ShapeError);
  }

  TEST_CASE("intercept-only on a constant series leaves zero residuals") {
    const ParcelTimeseries ts(Matrix::Constant(20, 3, 4.2), 1.0);
    const auto d = build_design(20, Matrix(20, 0), Matrix(20, 0), {});
    const auto r = simultaneous_regress(ts, d, CensorMask::keep_all(20));
    CHECK(r.data().cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("slow drift well below the cutoff is removed") {
    const std::size_t t = 1200;
    const double tr = 0.72;
    Matrix y(t, 2);
    for (std::size_t i = 0; i < t; ++i) {
      y(static_cast<Eigen::Index>(i), 0) = std::sin(2.0 * std::numbers::pi * 0.004 * tr * static_cast<double>(i));
      y(static_cast<Eigen::Index>(i), 1) = std::cos(2.0 * std::numbers::pi * 0.004 * tr * static_cast<double>(i));
    }
    const ParcelTimeseries ts(y, tr);
    const auto d = build_design(t, Matrix(t, 0), dct_bases(t, tr, 0.01), {});
    const auto r = simultaneous_regress(ts, d, CensorMask::keep_all(t));
    for (Eigen::Index c = 0; c < 2; ++c) {
      const double in_rms = std::sqrt(y.col(c).squaredNorm() / static_cast<double>(t));
      const double out_rms = std::sqrt(r.data().col(c).squaredNorm() / static_cast<double>(t));
      CHECK(out_rms <= 0.08 * in_rms);  // cosine-basis leakage from the scan edges
    }
  }

  TEST_CASE("residuals are orthogonal to the design; output length is the keep count") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t t = 40 + rng.index(160);
      const auto keep = testing::random_keep(rng, t, 0.2);
      if (testing::count_kept(keep) < 20) continue;
      const Matrix nuis = testing::random_matrix(rng, static_cast<Eigen::Index>(t), 4);
      const auto d = build_design(nuis, mask_from(keep), dct_bases(t, 1.0, 0.02));
      const Matrix y = testing::random_matrix(rng, static_cast<Eigen::Index>(t), 3);
      const Matrix r = regression_residuals(y, d.columns);
      const double bound = 1e-8 * d.columns.norm() * r.norm();
      CHECK((d.columns.transpose() * r).cwiseAbs().maxCoeff() <= bound);
      const auto out = simultaneous_regress(ParcelTimeseries(y, 1.0), d, mask_from(keep));
      CHECK(out.volumes() == testing::count_kept(keep));
    }
  }

  TEST_CASE("spike regression equals row deletion") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t t = 30 + rng.index(170);
      auto keep = testing::random_keep(rng, t, rng.uniform(0.0, 0.4));
      if (testing::count_kept(keep) < 15) keep.assign(t, true);
      const Matrix nuis = testing::random_matrix(rng, static_cast<Eigen::Index>(t), 3);
      const Matrix dct = dct_bases(t, 1.0, 0.02);
      const auto d = build_design(nuis, mask_from(keep), dct);
      const Matrix y = testing::random_matrix(rng, static_cast<Eigen::Index>(t), 4);
      const auto sim = simultaneous_regress(ParcelTimeseries(y, 1.0), d, mask_from(keep));
      Matrix x(static_cast<Eigen::Index>(t), 1 + nuis.cols() + dct.cols());
      x << Vector::Ones(static_cast<Eigen::Index>(t)), nuis, dct;
      const Matrix ref = testing::row_deleted_residuals(y, x, keep);
      CHECK((sim.data() - ref).norm() <= 1e-8 * ref.norm());
    }
  }

  TEST_CASE("rank-deficient designs use the minimum-norm fit") {
    Rng rng(5);
    Matrix nuis = testing::random_matrix(rng, 30, 2);
    nuis.col(1) = nuis.col(0);
    const auto d = build_design(30, nuis, Matrix(30, 0), {});
    const Matrix y = testing::random_matrix(rng, 30, 2);
    const Matrix r = regression_residuals(y, d.columns);
    Matrix x(30, 2);
    x << Vector::Ones(30), nuis.col(0);
    CHECK((r - testing::row_deleted_residuals(y, x, KeepVector(30, true))).norm() < 1e-10);
  }

  TEST_CASE("zero residual dof is degenerate") {
    std::vector<std::size_t> spikes{0, 1, 2, 3};
    const auto d = build_design(5, Matrix(5, 0), Matrix(5, 0), spikes);
    Rng rng(1);
    CHECK_THROWS_AS(regression_residuals(testing::random_matrix(rng, 5, 2), d.columns), DegenerateError);
  }
}
