// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/core.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace censorfc::connectome {

/// Pearson correlation of every parcel pair, Fisher transformed. Weight = volume count.
/// Throws DegenerateParcelError for a constant parcel and DegenerateError for |r| = 1.
FcMatrix fc_estimate(const ParcelTimeseries& residuals);
FcMatrix fc_estimate(const Matrix& data);

/// Edge-wise mean of z weighted by retained volumes. Throws ArgumentError on
/// zero total weight and ShapeError on mismatched parcel counts.
FcMatrix fc_average(std::span<const FcMatrix> fcs);

struct GroundTruthCriteria {
  double min_truth_minutes = 50.0;
  std::size_t min_heldout_volumes = 150;
};

struct GroundTruth {
  FcMatrix fc;
  double retained_minutes = 0.0;
  bool sufficient = false;  // retained_minutes >= min_truth_minutes
};

/// Weighted average of the truth-run FC estimates plus the retained-duration check.
GroundTruth ground_truth(std::span<const FcMatrix> truth_runs, double tr_seconds, const GroundTruthCriteria& criteria = {});

/// One partition's estimate/truth pair and its weight (retained held-out volumes).
struct PartitionPair {
  const FcMatrix* estimate;
  const FcMatrix* truth;
  double weight;
};

/// Per-edge squared error for one participant: |estimate - truth| averaged over
/// partitions with the given weights, then squared.
Vector squared_error(std::span<const PartitionPair> partitions);
Vector squared_error(std::span<const FcMatrix> estimates, std::span<const FcMatrix> truths,
                     std::span<const double> weights);

struct ErrorReport {
  Vector edge_rmse;         // per edge, over participants
  Vector participant_rmse;  // per participant, over edges
  double overall_rmse = 0.0;
  std::vector<double> weights;  // participant weights used
  double mse() const { return overall_rmse * overall_rmse; }
};

/// Aggregates per-participant squared-error vectors. Participant weights default to 1.
ErrorReport summarize_errors(std::span<const Vector> squared_errors, std::span<const double> participant_weights = {});

struct PercentChange {
  double overall = 0.0;
  Vector edge;
  Vector participant;
};

/// 100 * (report - reference) / reference on the rMSE scale.
PercentChange percent_change(const ErrorReport& report, const ErrorReport& reference);

enum class Alternative { TwoSided, Greater, Less };

struct WilcoxonResult {
  double statistic = 0.0;  // W+, sum of ranks of positive differences a - b
  double p_value = 1.0;
  std::size_t n_effective = 0;
  bool exact = true;
};

inline constexpr std::size_t kWilcoxonExactMaxN = 25;

/// Paired Wilcoxon signed-rank test on a - b. Zero differences dropped, ties mid-ranked,
/// exact null distribution for n_effective <= 25, continuity-corrected normal otherwise.
/// Throws ArgumentError for fewer than 5 pairs and DegenerateError when fewer than
/// 2 non-zero differences remain.
WilcoxonResult paired_wilcoxon(std::span<const double> a, std::span<const double> b,
                               Alternative alternative = Alternative::TwoSided);

inline double bonferroni(double p, std::size_t tests) { return std::min(1.0, p * static_cast<double>(tests)); }

struct CurvePoint {
  double duration_minutes;
  double rmse;
};

/// Shortest duration reaching `target_rmse` by linear interpolation of the curve.
/// Returns clamp_high when never reached and clamp_low when already below the
/// target at the shortest duration.
double required_duration(std::span<const CurvePoint> curve, double target_rmse, double clamp_low = 4.0,
                         double clamp_high = 30.0);

/// Volumes per run for a T-minute scan split over a phase-encoding pair: floor(T*60 / (2 tr)).
std::size_t slice_volumes(double minutes, double tr_seconds);

/// First T/2 minutes of each run of an LR/RL pair.
std::pair<ParcelTimeseries, ParcelTimeseries> duration_slice(const ParcelTimeseries& lr, const ParcelTimeseries& rl,
                                                             double minutes);

}  // namespace censorfc::connectome
