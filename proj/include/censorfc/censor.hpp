// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace censorfc::censor {

struct CensorPolicy {
  CensorLevel level = CensorLevel::None;
  double fd_threshold_mm = 0.5;
  bool use_dvars = false;
  std::size_t fd_lag = 1;
  std::optional<double> fd_filter_hz;
  std::size_t expand_before = 1;
  std::size_t expand_after = 2;
  std::size_t min_segment = 5;

  /// Defaults per level: Lenient 0.5 mm FD only; Stringent 0.2 mm FD + DVARS;
  /// Expanded adds the -1/+2 neighbourhood and the 5-volume segment rule.
  static CensorPolicy preset(CensorLevel level);
  /// Throws ArgumentError on a non-positive threshold or a zero min_segment / lag.
  void validate() const;
};

inline constexpr double kDefaultRotationRadiusMm = 50.0;

/// Framewise displacement from T x 6 realignment parameters (3 translations in mm,
/// 3 rotations in radians). Differences are taken over `lag` volumes after an
/// optional zero-phase low-pass of the parameters; fd[t] = 0 for t < lag.
Vector compute_fd(const Matrix& realignment, double rotation_radius_mm = kDefaultRotationRadiusMm,
                  std::size_t lag = 1, std::optional<double> filter_cutoff_hz = std::nullopt, double tr_seconds = 1.0);

/// Second-order Butterworth low-pass run forward then backward over each column.
Matrix lowpass_filtfilt(const Matrix& x, double cutoff_hz, double tr_seconds);

struct DvarsResult {
  Vector dvars;         // RMS over parcels of the backward difference, dvars[0] = 0
  Vector standardized;  // dvars / null_scale
  double null_scale = 0.0;
  // Parcel-level input rather than dense grayordinates.
  bool computed_on_parcels = true;
};

DvarsResult compute_dvars(const ParcelTimeseries& ts);
DvarsResult compute_dvars(const Matrix& data);

/// Flags volumes whose cube-rooted squared standardized DVARS is significantly above the
/// robust null (median centre, lower-half IQR spread) in a one-sided z-test at
/// level alpha / T, Bonferroni over `threshold_volumes` (defaults to the input
/// length). The null is re-estimated from the given slice only. Volume 0 is never flagged.
KeepVector dvars_flags(const Vector& standardized, std::optional<std::size_t> threshold_volumes = std::nullopt,
                       double alpha = 0.05);

KeepVector fd_flags(const Vector& fd, double threshold_mm);

/// Marks every flagged volume plus `before` preceding and `after` following volumes.
KeepVector expand_flags(const KeepVector& flagged, std::size_t before, std::size_t after);

/// Censors every maximal kept run shorter than `min_segment`. Returns the new keep vector.
KeepVector remove_short_segments(const KeepVector& keep, std::size_t min_segment);

/// `dvars_flags` may be empty when the policy does not use DVARS.
CensorMask build_mask(const Vector& fd, const KeepVector& dvars_flags, const CensorPolicy& policy);

inline constexpr char kHighMotionFraction[] = "high_motion_fraction";

/// Fraction of volumes with fd > threshold (volume 0 included, as fd[0] = 0).
double high_motion_fraction(const Vector& fd, double threshold_mm = 0.2);

struct MotionSplit {
  std::vector<std::string> below_average;
  std::vector<std::string> above_average;
  double mean = 0.0;
};

/// Splits participants by a per-participant measure (averaged over sessions):
/// strictly above the sample mean is above_average. The default measure is the
/// high-motion fraction; splitting on mean FD means passing that measure explicitly.
MotionSplit motion_split(const CohortTable& cohort, const std::string& measure = kHighMotionFraction);

}  // namespace censorfc::censor
