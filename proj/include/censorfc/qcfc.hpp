// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace censorfc::qcfc {

/// Parcel centroids (mm) and the derived edge distances in canonical edge order.
class ParcelGeometry {
 public:
  /// `centroids` is P x 3.
  explicit ParcelGeometry(Matrix centroids);

  const Matrix& centroids() const { return centroids_; }
  std::size_t parcels() const { return static_cast<std::size_t>(centroids_.rows()); }
  double distance(std::size_t i, std::size_t j) const;
  /// Edge distances, length P(P-1)/2.
  const Vector& edge_distances() const { return edge_distances_; }

  /// Random centroids inside a box (for tests and simulation).
  static ParcelGeometry synthetic(std::size_t parcels, std::uint64_t seed, double extent_mm = 120.0);

 private:
  Matrix centroids_;
  Vector edge_distances_;
};

/// Pearson correlation of motion and FC across participants.
double standard_qcfc(const Vector& fd, const Vector& fc);
/// Same quantity as the slope of an intercept-free regression after centring
/// and unit-variance scaling of both variables.
double standard_qcfc_regression(const Vector& fd, const Vector& fc);

/// Repeated-measures design: one entry per observation (participant, session).
class RmDesign {
 public:
  /// `participant` holds a participant index per observation.
  RmDesign(std::vector<std::size_t> participant, Vector fd);

  std::size_t observations() const { return participant_.size(); }
  std::size_t participants() const { return n_participants_; }
  /// Unit-variance regressors (population convention); empty optional when a regressor has no variance.
  const std::optional<Vector>& between() const { return between_; }
  const std::optional<Vector>& within() const { return within_; }
  /// Unscaled x_ij - mean_i and mean_i - grand mean.
  const Vector& within_raw() const { return within_raw_; }
  const Vector& between_raw() const { return between_raw_; }
  const std::vector<std::size_t>& participant() const { return participant_; }
  const Vector& participant_means() const { return participant_means_; }
  double grand_mean() const { return grand_mean_; }

 private:
  std::vector<std::size_t> participant_;
  std::size_t n_participants_ = 0;
  Vector fd_;
  Vector participant_means_;
  double grand_mean_ = 0.0;
  Vector within_raw_;
  Vector between_raw_;
  std::optional<Vector> between_;
  std::optional<Vector> within_;
};

struct RmCoefficients {
  std::optional<double> between;
  std::optional<double> within;
  // Same fit with the outcome centred but not rescaled.
  std::optional<double> between_unscaled;
  std::optional<double> within_unscaled;
};

/// Intercept-free least squares of the centred, unit-variance outcome on the two
/// unit-variance regressors. A regressor without variance yields a null coefficient.
RmCoefficients rm_fit(const RmDesign& design, const Vector& fc);

struct QcfcResult {
  Vector standard;                            // per edge (participant averages)
  std::vector<std::optional<double>> between;  // per edge
  std::vector<std::optional<double>> within;   // per edge
  std::optional<double> standard_distance_r;
  std::optional<double> between_distance_r;
  std::optional<double> within_distance_r;
};

/// Per-edge repeated-measures QC-FC. `fc` is observations x edges. Standard QC-FC
/// is computed across participants from session-averaged FD and FC.
QcfcResult rm_qcfc(const RmDesign& design, const Matrix& fc);

/// Builds the dense inputs from a cohort table: the motion measure plus the
/// measures named edge_0 .. edge_{E-1}. Observations lacking any of them are skipped.
struct CohortMatrices {
  std::vector<std::string> participant_ids;
  std::vector<std::string> session_ids;
  std::vector<std::size_t> participant;  // index into participant_ids
  Vector fd;
  Matrix fc;  // observations x edges
};
CohortMatrices cohort_matrices(const CohortTable& cohort, const std::string& fd_measure = "mean_fd",
                               const std::string& edge_prefix = "edge_");
QcfcResult rm_qcfc(const CohortTable& cohort, const std::string& fd_measure = "mean_fd");

/// Pearson correlation between per-edge values and edge distance.
double distance_dependence(const Vector& per_edge, const ParcelGeometry& geometry);

struct ValidationResult {
  Vector r;  // per edge
  std::size_t participants_used = 0;
  std::size_t participants_excluded = 0;  // single-session
  std::size_t fd_ties = 0;                // participants whose high/low pick needed the session-order tie-break
};

/// Correlation across participants of (FC_high - FC_low) with (FD_high - FD_low), where
/// high/low are each participant's highest and lowest mean-FD sessions (earliest session wins ties).
ValidationResult validation_qcfc(const std::vector<std::size_t>& participant, const Vector& fd, const Matrix& fc);
ValidationResult validation_qcfc(const CohortTable& cohort, const std::string& fd_measure = "mean_fd");

}  // namespace censorfc::qcfc
