// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/connectome.hpp"
#include "censorfc/effss.hpp"
#include "censorfc/errors.hpp"
#include "censorfc/qcfc.hpp"
#include "censorfc/simcohort.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace censorfc;
using namespace censorfc::sim;

namespace {
SimConfig quiet_config() {
  SimConfig c;
  c.n_participants = 3;
  c.sessions_per_participant = 2;
  c.runs_per_session = 1;
  c.T_volumes = 200;
  c.parcel_count = 8;
  c.motion.spike_rate = 0.0;
  c.seed = 5;
  return c;
}

effss::AcfEstimate ar1_acf(double phi, std::size_t lags) {
  Vector v(static_cast<Eigen::Index>(lags + 1));
  for (Eigen::Index l = 0; l < v.size(); ++l) v(l) = std::pow(phi, static_cast<double>(l));
  auto a = effss::AcfEstimate::from_values(v);
  a.max_lag = lags;
  return a;
}
}  // namespace

TEST_SUITE("simcohort") {
  TEST_CASE("config validation") {
    auto bad = [](auto mutate) {
      SimConfig c = quiet_config();
      mutate(c);
      CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    bad([](SimConfig& c) { c.ar1_phi = 1.0; });
    bad([](SimConfig& c) { c.ar1_phi = -1.0; });
    bad([](SimConfig& c) { c.motion.spike_rate = -0.1; });
    bad([](SimConfig& c) { c.true_fc_signal_var = -1.0; });
    bad([](SimConfig& c) { c.artifact.amplitude = -1.0; });
    bad([](SimConfig& c) { c.parcel_count = 1; });
    bad([](SimConfig& c) { c.behavior_edges = {1000}; });
    bad([](SimConfig& c) { c.behavior_edges = {2, 2}; });
    bad([](SimConfig& c) {
      Matrix m = Matrix::Identity(8, 8);
      m(0, 1) = m(1, 0) = 1.5;
      c.group_fc = m;
    });
    CHECK_NOTHROW(quiet_config().validate());
  }

  TEST_CASE("non-positive-definite targets name the edge set") {
    SimConfig c = quiet_config();
    Matrix m = Matrix::Identity(8, 8);
    m(0, 1) = m(1, 0) = 0.9;
    m(0, 2) = m(2, 0) = 0.9;
    m(1, 2) = m(2, 1) = -0.9;
    c.group_fc = m;
    try {
      c.validate();
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("edge set") != std::string::npos);
    }
  }

  TEST_CASE("same seed gives identical cohorts; different seeds differ") {
    const auto a = generate(quiet_config());
    const auto b = generate(quiet_config());
    REQUIRE(a.runs.size() == 6);
    for (std::size_t r = 0; r < a.runs.size(); ++r) {
      CHECK(a.runs[r].timeseries.data() == b.runs[r].timeseries.data());
      CHECK(a.runs[r].motion.fd == b.runs[r].motion.fd);
      CHECK(a.runs[r].motion.realignment == b.runs[r].motion.realignment);
    }
    CHECK(a.truth.group_correlation == b.truth.group_correlation);
    auto other = quiet_config();
    other.seed = 6;
    CHECK(generate(other).runs[0].timeseries.data() != a.runs[0].timeseries.data());
  }

  TEST_CASE("cohort layout and ground truth") {
    const auto c = generate(quiet_config());
    CHECK(c.runs[0].participant_id == c.participant_id(0));
    CHECK(c.runs[1].session_id == c.session_id(1));
    CHECK(c.runs[0].timeseries.volumes() == 200);
    CHECK(c.runs[0].timeseries.parcels() == 8);
    CHECK(c.runs[0].motion.fd(0) == 0.0);
    CHECK((c.runs[0].motion.fd.array() >= 0.0).all());
    CHECK(c.truth.sessions.size() == 6);
    CHECK(c.truth.acf(1) == doctest::Approx(0.3));
    CHECK(c.truth.centroids.rows() == 8);
    for (const auto& s : c.truth.sessions) {
      CHECK(s.z.size() == 28);
      CHECK(s.correlation.diagonal().isOnes(1e-12));
      CHECK(Eigen::LLT<Matrix>(s.correlation).info() == Eigen::Success);
    }
    CHECK(c.measures.value(c.participant_id(2), c.session_id(1), "mean_fd").has_value());
    CHECK(c.runs[0].spike_volumes.empty());
  }

  TEST_CASE("random correlation factory is a valid correlation matrix") {
    const Matrix r = random_correlation(30, 4, 9);
    CHECK(r.isApprox(r.transpose()));
    CHECK(r.diagonal().isOnes(1e-12));
    CHECK(Eigen::LLT<Matrix>(r).info() == Eigen::Success);
    CHECK(r == random_correlation(30, 4, 9));
  }

  TEST_CASE("long-run sample FC converges to the planted correlation") {
    const Matrix corr = random_correlation(5, 2, 3);
    const Matrix x = correlated_ar1(corr, 0.3, 100000, 17);
    const auto fc = connectome::fc_estimate(x);
    std::size_t e = 0;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j, ++e) {
        const double zt = std::atanh(corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        CHECK(std::abs(fc.z(static_cast<Eigen::Index>(e)) - zt) < 0.01);
      }
  }

  TEST_CASE("generated ACF matches phi^l") {
    const Matrix corr = random_correlation(6, 2, 4);
    const Matrix x = correlated_ar1(corr, 0.6, 20000, 18);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const Vector a = effss::series_acf(x.col(c), 5);
      for (Eigen::Index l = 1; l <= 5; ++l) CHECK(std::abs(a(l) - std::pow(0.6, static_cast<double>(l))) < 0.04);
    }
  }

  TEST_CASE("artifact-free FC error is pure sampling variance") {
    SimConfig c;
    c.n_participants = 40;
    c.sessions_per_participant = 1;
    c.runs_per_session = 1;
    c.T_volumes = 300;
    c.parcel_count = 10;
    c.ar1_phi = 0.5;
    c.motion.spike_rate = 0.0;
    c.artifact.amplitude = 0.0;
    c.seed = 41;
    const auto cohort = generate(c);
    double mse = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < cohort.runs.size(); ++i) {
      const auto fc = connectome::fc_estimate(cohort.runs[i].timeseries);
      const Vector d = fc.z - cohort.truth.sessions[i].z;
      mse += d.squaredNorm();
      count += static_cast<std::size_t>(d.size());
    }
    mse /= static_cast<double>(count);
    const double te = effss::t_eff(ar1_acf(c.ar1_phi, 100), KeepVector(c.T_volumes, true));
    const double ratio = mse * te;  // Fisher-z noise variance is 1
    CHECK(ratio >= 0.9);
    CHECK(ratio <= 1.1);
  }

  TEST_CASE("trait coupling loads on the between coefficient only") {
    SimConfig c;
    c.n_participants = 80;
    c.sessions_per_participant = 2;
    c.runs_per_session = 1;
    c.T_volumes = 50;
    c.parcel_count = 8;
    c.trait_fc_coupling = 0.5;
    c.state_fc_coupling = 0.0;
    c.motion.state_sd = 0.4;
    c.seed = 42;
    const auto cohort = generate(c);
    std::vector<std::size_t> participant;
    Vector fd(static_cast<Eigen::Index>(cohort.truth.sessions.size()));
    Matrix fc(fd.size(), 28);
    for (std::size_t o = 0; o < cohort.truth.sessions.size(); ++o) {
      const auto& s = cohort.truth.sessions[o];
      participant.push_back(s.participant);
      fd(static_cast<Eigen::Index>(o)) =
          *cohort.measures.value(cohort.participant_id(s.participant), cohort.session_id(s.session), "mean_fd");
      fc.row(static_cast<Eigen::Index>(o)) = s.z.transpose();
    }
    const auto res = qcfc::rm_qcfc(qcfc::RmDesign(participant, fd), fc);
    double max_within = 0.0, mean_abs_between = 0.0;
    for (std::size_t e = 0; e < 28; ++e) {
      max_within = std::max(max_within, std::abs(res.within[e].value()));
      mean_abs_between += std::abs(res.between[e].value()) / 28.0;
    }
    CHECK(max_within < 1e-8);
    CHECK(mean_abs_between > 0.2);
    CHECK(cohort.truth.trait_fc_coupling == 0.5);
  }

  TEST_CASE("planted artifact makes QC-FC distance-dependent") {
    SimConfig c;
    c.n_participants = 30;
    c.sessions_per_participant = 1;
    c.runs_per_session = 1;
    c.T_volumes = 300;
    c.parcel_count = 30;
    c.motion.spike_rate = 0.03;
    c.motion.trait_sd = 0.6;
    c.artifact.amplitude = 3.0;
    c.artifact.distance_decay_mm = 30.0;
    c.seed = 43;
    const auto cohort = generate(c);
    Vector fd(30);
    Matrix fc(30, static_cast<Eigen::Index>(edge_count(30)));
    for (std::size_t i = 0; i < 30; ++i) {
      fd(static_cast<Eigen::Index>(i)) = cohort.runs[i].motion.fd.mean();
      fc.row(static_cast<Eigen::Index>(i)) = connectome::fc_estimate(cohort.runs[i].timeseries).z.transpose();
    }
    Vector per_edge(fc.cols());
    for (Eigen::Index e = 0; e < fc.cols(); ++e) per_edge(e) = qcfc::standard_qcfc(fd, fc.col(e));
    CHECK(per_edge.mean() > 0.0);
    CHECK(qcfc::distance_dependence(per_edge, cohort.truth.geometry()) < 0.0);
  }

  TEST_CASE("Monte Carlo harness") {
    const auto constant = mc_replicate([](std::uint64_t) { return 3.0; }, 50, 1);
    CHECK(constant.mean == 3.0);
    CHECK(constant.variance == 0.0);
    CHECK(constant.n_failed == 0);

    const std::size_t n = 25;
    auto sample_mean = [n](std::uint64_t seed) {
      Rng rng(seed);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += rng.normal();
      return s / static_cast<double>(n);
    };
    const auto m = mc_replicate(sample_mean, 4000, 77);
    // Variance of a sample variance over 4000 draws is about 2 sigma^4 / 4000.
    const double target = 1.0 / static_cast<double>(n);
    CHECK(std::abs(m.variance - target) < 4.0 * target * std::sqrt(2.0 / 4000.0));
    CHECK(m.ci_low < 0.0);
    CHECK(m.ci_high > 0.0);

    const auto again = mc_replicate(sample_mean, 4000, 77, 3);
    CHECK(again.values == m.values);
    CHECK(again.mean == m.mean);

    const auto failing = mc_replicate(
        [](std::uint64_t seed) {
          if (seed % 3 == 0) throw DegenerateError("boom");
          return 1.0;
        },
        60, 5);
    CHECK(failing.n_failed == failing.failed.size());
    CHECK(failing.n_failed > 0);
    CHECK(failing.n_failed < 60);
    for (auto r : failing.failed) CHECK(std::isnan(failing.values[r]));
    CHECK_THROWS_AS(mc_replicate([](std::uint64_t) { return 0.0; }, 1, 1), ArgumentError);
  }

  TEST_CASE("cohort-level Monte Carlo and vector replicates") {
    SimConfig c = quiet_config();
    c.n_participants = 1;
    c.sessions_per_participant = 1;
    auto first_value = [](const SyntheticCohort& s) { return s.runs[0].timeseries.data()(0, 0); };
    const auto a = mc_replicate(c, first_value, 5, 9);
    const auto b = mc_replicate(c, first_value, 5, 9);
    CHECK(a.values == b.values);
    CHECK(a.variance > 0.0);

    const auto v = mc_replicate_vector(
        [](std::uint64_t seed) {
          Rng rng(seed);
          return Vector{{rng.normal(), 2.0}};
        },
        100, 3);
    CHECK(v.values.rows() == 100);
    CHECK(v.mean(1) == 2.0);
    CHECK(v.variance(1) == 0.0);
  }

  TEST_CASE("QC-FC generator plants its coefficients") {
    QcfcSimConfig c;
    c.n_participants = 300;
    c.edges = 5;
    c.seed = 3;
    const auto s = generate_qcfc(c);
    CHECK(s.beta_between == 0.3);
    CHECK(s.table.participants().size() == 300);
    CHECK(s.table.measures().size() == 6);
    c.missing_rate = 0.5;
    const auto m = generate_qcfc(c);
    CHECK(m.table.size() < s.table.size());
  }

  TEST_CASE("BWAS generator honours its reliabilities") {
    BwasSimConfig c;
    c.n_participants = 20000;
    c.edges = 2;
    c.visits = 2;
    c.icc_x = 0.6;
    c.icc_y = 0.8;
    c.rho = 0.4;
    c.seed = 7;
    const auto s = generate_bwas(c);
    REQUIRE(s.fc.size() == 2);
    auto corr = [](const Vector& a, const Vector& b) {
      const Vector ac = a.array() - a.mean(), bc = b.array() - b.mean();
      return ac.dot(bc) / (ac.norm() * bc.norm());
    };
    CHECK(corr(s.fc[0].col(0), s.fc[1].col(0)) == doctest::Approx(0.6).epsilon(0.05));
    CHECK(corr(s.behavior[0], s.behavior[1]) == doctest::Approx(0.8).epsilon(0.05));
    CHECK(corr(s.fc_true.col(1), s.behavior_true) == doctest::Approx(0.4).epsilon(0.05));
    BwasSimConfig bad = c;
    bad.icc_x = 1.5;
    CHECK_THROWS_AS(generate_bwas(bad), ConfigError);
  }
}
