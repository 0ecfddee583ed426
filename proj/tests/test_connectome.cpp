// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/connectome.hpp"
#include "censorfc/errors.hpp"
#include "censorfc/stats.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace censorfc;
using namespace censorfc::connectome;

namespace {
FcMatrix fc_of(std::initializer_list<double> z, std::size_t weight) {
  FcMatrix f;
  f.z = Eigen::Map<const Vector>(z.begin(), static_cast<Eigen::Index>(z.size()));
  f.n_volumes_retained = weight;
  f.parcel_count = parcels_for_edges(z.size());
  return f;
}
}  // namespace

TEST_SUITE("connectome") {
  TEST_CASE("fc_estimate matches atanh of the sample correlation") {
    Rng rng(1);
    Matrix x = testing::random_matrix(rng, 500, 3);
    x.col(1) = 0.5 * x.col(0) + std::sqrt(0.75) * x.col(1);
    const auto fc = fc_estimate(x);
    CHECK(fc.edges() == 3);
    CHECK(fc.n_volumes_retained == 500);
    const Vector a = x.col(0), b = x.col(1);
    CHECK(fc.z(0) == doctest::Approx(std::atanh(stats::pearson(a, b))).epsilon(1e-12));
    CHECK(std::atanh(0.5) == doctest::Approx(0.549306).epsilon(1e-6));
  }

  TEST_CASE("zero correlation maps to zero") {
    Matrix x(4, 2);
    x << 1, 1, -1, 1, 1, -1, -1, -1;
    CHECK(fc_estimate(x).z(0) == doctest::Approx(0.0));
  }

  TEST_CASE("independent white noise at T=10000 has small z") {
    Rng rng(2);
    int inside = 0;
    for (int rep = 0; rep < 200; ++rep) {
      const auto fc = fc_estimate(testing::random_matrix(rng, 10000, 2));
      inside += std::abs(fc.z(0)) < 0.05;
    }
    CHECK(inside >= 198);
  }

  TEST_CASE("degenerate inputs") {
    Matrix x = Matrix::Zero(10, 3);
    x.col(0).setLinSpaced(0, 1);
    x.col(2).setLinSpaced(3, -1);
    x.col(1).setConstant(7.0);
    try {
      fc_estimate(x);
      FAIL("expected DegenerateParcelError");
    } catch (const DegenerateParcelError& e) {
      CHECK(e.parcel() == 1);
    }
    x.col(1) = 2.0 * x.col(0);
    CHECK_THROWS_AS(fc_estimate(x), DegenerateError);
    CHECK_THROWS_AS(fc_estimate(Matrix::Identity(2, 2)), InsufficientDataError);
  }

  TEST_CASE("fc_average examples") {
    const auto a = fc_of({0.4}, 300), b = fc_of({0.8}, 100);
    const std::vector<FcMatrix> ab{a, b};
    CHECK(fc_average(ab).z(0) == doctest::Approx(0.5));
    CHECK(fc_average(ab).n_volumes_retained == 400);
    const std::vector<FcMatrix> eq{fc_of({0.2}, 5), fc_of({0.6}, 5)};
    CHECK(fc_average(eq).z(0) == doctest::Approx(0.4));
    const std::vector<FcMatrix> zero_second{fc_of({0.3}, 100), fc_of({0.9}, 0)};
    CHECK(fc_average(zero_second).z(0) == 0.3);
    const std::vector<FcMatrix> none{fc_of({0.3}, 0)};
    CHECK_THROWS_AS(fc_average(none), ArgumentError);
    const std::vector<FcMatrix> mismatched{fc_of({0.3}, 1), fc_of({0.1, 0.2, 0.3}, 1)};
    CHECK_THROWS_AS(fc_average(mismatched), ShapeError);
  }

  TEST_CASE("fc_average is permutation invariant and identity on one input") {
    Rng rng(3);
    std::vector<FcMatrix> fcs;
    for (int i = 0; i < 5; ++i) fcs.push_back({testing::random_vector(rng, 10), 10 + rng.index(100), 5});
    const auto ref = fc_average(fcs);
    std::reverse(fcs.begin(), fcs.end());
    std::rotate(fcs.begin(), fcs.begin() + 2, fcs.end());
    CHECK((fc_average(fcs).z - ref.z).cwiseAbs().maxCoeff() < 1e-14);
    const std::vector<FcMatrix> single{fcs[0]};
    CHECK(fc_average(single).z == fcs[0].z);
  }

  TEST_CASE("ground truth sufficiency") {
    const std::vector<FcMatrix> runs{fc_of({0.1}, 2000), fc_of({0.3}, 2000)};
    const auto g = ground_truth(runs, 0.72, {});
    CHECK(g.retained_minutes == doctest::Approx(48.0));
    CHECK(!g.sufficient);
    CHECK(ground_truth(runs, 0.72, {40.0, 150}).sufficient);
  }

  TEST_CASE("fc_error examples") {
    const auto t = fc_of({0.5}, 1), e = fc_of({0.3}, 1);
    const std::vector<FcMatrix> est{e}, tru{t};
    const std::vector<double> w{1.0};
    const Vector se = squared_error(est, tru, w);
    CHECK(se(0) == doctest::Approx(0.04));
    const std::vector<Vector> ses{se};
    CHECK(summarize_errors(ses).overall_rmse == doctest::Approx(0.2));
    const std::vector<FcMatrix> same{t};
    CHECK(squared_error(same, tru, w)(0) == 0.0);

    const std::vector<FcMatrix> est2{fc_of({0.3}, 1), fc_of({-0.6}, 1)}, tru2{fc_of({0.0}, 1), fc_of({0.0}, 1)};
    const std::vector<double> w2{2.0, 1.0};
    CHECK(squared_error(est2, tru2, w2)(0) == doctest::Approx(0.16));
  }

  TEST_CASE("overall MSE is the weighted mean and partitions combine consistently") {
    Rng rng(4);
    std::vector<Vector> ses;
    std::vector<double> w;
    for (int i = 0; i < 8; ++i) {
      ses.push_back(testing::random_vector(rng, 12).cwiseAbs2());
      w.push_back(rng.uniform(0.5, 2.0));
    }
    const auto all = summarize_errors(ses, w);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ses.size(); ++i) {
      num += w[i] * ses[i].mean();
      den += w[i];
    }
    CHECK(all.mse() == doctest::Approx(num / den).epsilon(1e-12));
    CHECK(all.overall_rmse >= 0.0);
    CHECK((all.edge_rmse.array() >= 0.0).all());

    const std::span<const Vector> sv(ses);
    const std::span<const double> sw(w);
    const auto g1 = summarize_errors(sv.first(3), sw.first(3));
    const auto g2 = summarize_errors(sv.subspan(3), sw.subspan(3));
    const double w1 = w[0] + w[1] + w[2];
    const double combined = (w1 * g1.mse() + (den - w1) * g2.mse()) / den;
    CHECK(all.mse() == doctest::Approx(combined).epsilon(1e-12));
  }

  TEST_CASE("percent change") {
    const std::vector<Vector> a{Vector::Constant(2, 0.04)}, b{Vector::Constant(2, 0.01)};
    const auto pc = percent_change(summarize_errors(a), summarize_errors(b));
    CHECK(pc.overall == doctest::Approx(100.0));
    CHECK(pc.edge(1) == doctest::Approx(100.0));
  }

  TEST_CASE("Wilcoxon examples") {
    const std::vector<double> a{1.1, 2.2, 3.3, 4.4, 5.5, 6.6}, b(6, 0.0);
    const auto r = paired_wilcoxon(a, b, Alternative::Greater);
    CHECK(r.p_value == 1.0 / 64.0);
    CHECK(r.statistic == 21.0);
    CHECK(r.exact);
    CHECK(paired_wilcoxon(a, b).p_value == 2.0 / 64.0);

    std::vector<double> c(6, 1.0), d(6, 1.0);
    d[2] = 2.0;
    CHECK_THROWS_AS(paired_wilcoxon(c, d), DegenerateError);
    CHECK_THROWS_AS(paired_wilcoxon(c, c), DegenerateError);
    CHECK_THROWS_AS(paired_wilcoxon(std::vector<double>(4, 1.0), std::vector<double>(4, 2.0)), ArgumentError);

    const std::vector<double> e{1, -1, 2, -2, 3, -3}, zero(6, 0.0);
    CHECK(paired_wilcoxon(e, zero).p_value == 1.0);
    CHECK(bonferroni(0.02, 3) == doctest::Approx(0.06));
    CHECK(bonferroni(0.5, 3) == 1.0);
  }

  TEST_CASE("Wilcoxon exact path matches enumeration with ties and zeros") {
    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t n = 5 + rng.index(9);
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = static_cast<double>(rng.index(7));
        b[i] = static_cast<double>(rng.index(7));
      }
      const auto ref = testing::wilcoxon_enumerate(a, b);
      std::size_t nonzero = 0;
      for (std::size_t i = 0; i < n; ++i) nonzero += a[i] != b[i];
      if (nonzero < 2) continue;
      CHECK(paired_wilcoxon(a, b, Alternative::Greater).p_value == ref.p_greater);
      CHECK(paired_wilcoxon(a, b, Alternative::Less).p_value == ref.p_less);
      CHECK(paired_wilcoxon(a, b).p_value == ref.p_two_sided);
      CHECK(paired_wilcoxon(a, b).statistic == ref.w_plus);
    }
  }

  TEST_CASE("Wilcoxon normal approximation for large n") {
    Rng rng(6);
    std::vector<double> a(60), b(60, 0.0);
    for (auto& v : a) v = rng.normal(1.0, 1.0);
    const auto r = paired_wilcoxon(a, b, Alternative::Greater);
    CHECK(!r.exact);
    CHECK(r.p_value < 0.01);
    // Null: antisymmetric sample gives a central statistic.
    std::vector<double> s;
    for (int i = 1; i <= 30; ++i) {
      s.push_back(i);
      s.push_back(-i);
    }
    CHECK(paired_wilcoxon(s, b).p_value == doctest::Approx(1.0));
  }

  TEST_CASE("required_duration examples") {
    const std::vector<CurvePoint> c{{5, 0.10}, {10, 0.08}, {15, 0.06}};
    CHECK(required_duration(c, 0.07) == doctest::Approx(12.5));
    CHECK(required_duration(c, 0.01) == 30.0);
    CHECK(required_duration(c, 0.2) == 4.0);
    CHECK(required_duration(c, 0.08) == doctest::Approx(10.0));
    const std::vector<CurvePoint> unsorted{{10, 0.1}, {5, 0.2}};
    CHECK_THROWS_AS(required_duration(unsorted, 0.1), ArgumentError);
    const std::vector<CurvePoint> dup{{5, 0.1}, {5, 0.2}};
    CHECK_THROWS_AS(required_duration(dup, 0.1), ArgumentError);
  }

  TEST_CASE("required_duration is monotone in the target") {
    Rng rng(7);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<CurvePoint> c;
      double r = 0.15;
      for (int i = 1; i <= 6; ++i) {
        r = std::max(0.001, r - rng.uniform(-0.01, 0.04));
        c.push_back({5.0 * i, r});
      }
      double prev = 0.0;
      for (double target = 0.2; target > 0.0; target -= 0.005) {
        const double d = required_duration(c, target);
        CHECK(d >= prev - 1e-12);
        prev = d;
      }
    }
  }

  TEST_CASE("duration slices") {
    CHECK(slice_volumes(10.0, 0.72) == 416);
    CHECK_THROWS_AS(slice_volumes(0.0, 0.72), ArgumentError);
    Rng rng(8);
    const ParcelTimeseries lr(testing::random_matrix(rng, 416, 3), 0.72), rl(testing::random_matrix(rng, 416, 3), 0.72);
    const auto [l, r] = duration_slice(lr, rl, 10.0);
    CHECK(l.volumes() == 416);
    CHECK(l.data() == lr.data());
    CHECK(r.data() == rl.data());
    CHECK(duration_slice(lr, rl, 5.0).first.volumes() == 208);
    CHECK_THROWS_AS(duration_slice(lr, rl, 20.0), InsufficientDataError);
    CHECK_THROWS_AS(duration_slice(lr, rl, 0.0), ArgumentError);
  }
}
