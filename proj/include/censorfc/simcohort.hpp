// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/core.hpp"
#include "censorfc/qcfc.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace censorfc::sim {

struct MotionConfig {
  double baseline_fd_mm = 0.1;      // median per-session mean FD before spikes
  double trait_sd = 0.3;            // log-scale participant effect
  double state_sd = 0.2;            // log-scale session effect
  double volume_jitter_sd = 0.4;    // log-scale per-volume variation of the step size
  double spike_rate = 0.005;        // bursts per volume (Poisson)
  double spike_fd_magnitude = 1.5;  // FD of a burst volume (mm)
  double burst_mean_length = 1.5;   // mean number of volumes per burst
};

struct ArtifactConfig {
  double amplitude = 0.0;            // artifact SD at a volume with FD = spike_fd_magnitude, in signal SD units
  double distance_decay_mm = 40.0;   // K_ij = exp(-d_ij / decay)
};

/// Generative settings for a cohort of parcel timeseries.
///
/// Participant i, session s has true FC R_is = corr(L_is L_is' + D) with loadings
///   L_is = L + sqrt(true_fc_signal_var) G_i + (trait_fc_coupling t_i + state_fc_coupling u_is) Delta,
/// where t_i and u_is are the standardized log-motion trait and state. Parcel signals are
/// latent AR(1) sources mixed through the loadings, so every (participant, session) has
/// the separable covariance R_is (x) Toeplitz(phi^|l|).
struct SimConfig {
  std::size_t n_participants = 10;
  std::size_t sessions_per_participant = 2;
  std::size_t runs_per_session = 2;
  std::size_t T_volumes = 400;  // per run
  double tr_seconds = 0.72;
  std::size_t parcel_count = 20;
  std::size_t fc_rank = 3;
  double ar1_phi = 0.3;
  double true_fc_signal_var = 0.01;  // loading perturbation variance across participants
  MotionConfig motion;
  ArtifactConfig artifact;
  double trait_fc_coupling = 0.0;
  double state_fc_coupling = 0.0;
  double behavior_rho = 0.0;
  std::vector<std::size_t> behavior_edges;
  double behavior_icc = 1.0;
  std::optional<Matrix> group_fc;  // user-supplied P x P correlation replacing the factor model at the group level
  std::uint64_t seed = 0;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;
};

struct SimRun {
  std::string participant_id;
  std::string session_id;
  std::string run_id;
  ParcelTimeseries timeseries;
  MotionTrace motion;
  std::vector<std::size_t> spike_volumes;  // volumes that received the artifact
};

struct SessionTruth {
  std::size_t participant = 0;
  std::size_t session = 0;
  Matrix correlation;  // P x P
  Vector z;            // atanh of the upper triangle
  double trait = 0.0;  // standardized
  double state = 0.0;  // standardized
  double target_fd_mm = 0.0;
};

struct GroundTruthRecord {
  Vector acf;  // phi^l, l = 0..max_lag
  Matrix group_correlation;
  Matrix centroids;  // P x 3, mm
  std::vector<SessionTruth> sessions;  // participant-major
  std::vector<double> behavior_true;   // per participant, unit variance across participants
  Vector behavior_rho;                 // realized corr(behavior_true, participant-mean true z) per edge
  std::vector<std::size_t> behavior_edges;
  double behavior_icc = 1.0;
  Vector fc_icc;                       // per edge, Var(w) / (Var(w) + sampling variance at one session)
  double trait_fc_coupling = 0.0;
  double state_fc_coupling = 0.0;

  const SessionTruth& session(std::size_t participant, std::size_t session) const;
  qcfc::ParcelGeometry geometry() const { return qcfc::ParcelGeometry(centroids); }
};

struct SyntheticCohort {
  SimConfig config;
  std::vector<SimRun> runs;  // participant, session, run order
  GroundTruthRecord truth;
  /// mean_fd per (participant, session) and behavior per (participant, session).
  CohortTable measures;

  std::string participant_id(std::size_t i) const;
  std::string session_id(std::size_t s) const;
};

/// Deterministic in config.seed.
SyntheticCohort generate(const SimConfig& config);

/// Random correlation matrix from a low-rank plus diagonal factor model.
Matrix random_correlation(std::size_t parcels, std::size_t rank, std::uint64_t seed);

/// One run's worth of AR(1) sources mixed to correlation `corr`. Returns T x P.
Matrix correlated_ar1(const Matrix& corr, double phi, std::size_t volumes, std::uint64_t seed, std::uint64_t stream = 0);

// ---------------------------------------------------------------------------
// Measure-level generators

/// Cohort of mean FD and edge values with planted standardized between/within coefficients.
struct QcfcSimConfig {
  std::size_t n_participants = 1000;
  std::size_t sessions = 4;
  std::size_t edges = 50;
  double fd_mean = 0.2;
  double trait_sd = 0.05;
  double state_sd = 0.03;
  double beta_between = 0.3;
  double beta_within = 0.1;
  double missing_rate = 0.0;  // probability a non-first session is absent
  std::uint64_t seed = 0;
};

struct QcfcSimCohort {
  CohortTable table;  // measures mean_fd and edge_0 .. edge_{E-1}
  double beta_between = 0.0;
  double beta_within = 0.0;
};

QcfcSimCohort generate_qcfc(const QcfcSimConfig& config);

/// Participants with latent edge strength w_e and behavior w_y, corr(w_e, w_y) = rho, observed as
/// x = sqrt(icc_x) w + sqrt(1 - icc_x) e per visit (likewise for behavior).
struct BwasSimConfig {
  std::size_t n_participants = 10000;
  std::size_t edges = 1;
  std::size_t visits = 1;
  double rho = 0.3;
  double icc_x = 0.5;
  double icc_y = 0.935;
  std::uint64_t seed = 0;
};

struct BwasSimSample {
  std::vector<Matrix> fc;        // per visit, participants x edges
  std::vector<Vector> behavior;  // per visit
  Matrix fc_true;                // participants x edges (latent)
  Vector behavior_true;
};

BwasSimSample generate_bwas(const BwasSimConfig& config);

// ---------------------------------------------------------------------------
// Monte Carlo harness

struct McSummary {
  std::size_t n_reps = 0;
  std::size_t n_failed = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance over successful replicates
  double ci_low = 0.0;    // normal-approximation CI for the mean
  double ci_high = 0.0;
  std::vector<double> values;  // per replicate, NaN where failed
  std::vector<std::size_t> failed;
};

struct McVectorSummary {
  std::size_t n_reps = 0;
  std::size_t n_failed = 0;
  Vector mean;
  Vector variance;
  Matrix values;  // replicates x components, NaN rows where failed
  std::vector<std::size_t> failed;
};

/// Replicate r receives seed derive_seed(seed, r). Exceptions mark the replicate failed.
/// Results are indexed by replicate, so they do not depend on `threads`.
McSummary mc_replicate(const std::function<double(std::uint64_t replicate_seed)>& experiment, std::size_t n_reps,
                       std::uint64_t seed, std::size_t threads = 1, double confidence = 0.95);

/// Generates a fresh cohort per replicate (config.seed replaced by the replicate seed).
McSummary mc_replicate(const SimConfig& config, const std::function<double(const SyntheticCohort&)>& experiment,
                       std::size_t n_reps, std::uint64_t seed, std::size_t threads = 1, double confidence = 0.95);

McVectorSummary mc_replicate_vector(const std::function<Vector(std::uint64_t replicate_seed)>& experiment,
                                    std::size_t n_reps, std::uint64_t seed, std::size_t threads = 1);

}  // namespace censorfc::sim
