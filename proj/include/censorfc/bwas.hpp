// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace censorfc::bwas {

struct IccEstimate {
  double signal_var = 0.0;
  double noise_var = 0.0;  // at t_ref_minutes
  double icc = 0.0;
  double t_ref_minutes = 0.0;
  bool clipped = false;  // signal variance estimate was negative and set to 0
};

/// Two-visit variance decomposition. Sample (n-1) variances. Throws ArgumentError
/// for fewer than 3 pairs and DegenerateError when both variances are zero.
IccEstimate icc_from_test_retest(std::span<const double> visit1, std::span<const double> visit2,
                                 double t_ref_minutes = 0.0);

/// Rescales the noise variance by t_ref / t_new. Requires t_ref_minutes > 0.
double icc_extrapolate(const IccEstimate& ref, double t_new_minutes);

/// sqrt(icc_x * icc_y); both must lie in [0, 1].
double proportional_strength(double icc_x, double icc_y);

/// (1 - rho^2 icc_x icc_y)^2 / n.
double bwas_variance(double rho_true, double icc_x, double icc_y, std::size_t n);

/// Smallest n with bwas_variance <= target_var.
std::size_t required_n(double rho_true, double icc_x, double icc_y, double target_var);

/// 1 / sqrt(icc_x * icc_y).
double correction_factor(double icc_x, double icc_y);

enum class CorrectionStatus : std::uint8_t { Ok, Clipped, Excluded };

struct CorrectedRho {
  double rho = 0.0;  // meaningless when status == Excluded
  CorrectionStatus status = CorrectionStatus::Ok;
};

inline constexpr double kDefaultIccFloor = 0.1;

/// rho_star / sqrt(icc_x icc_y), clipped to [-1, 1]. Edges with icc_x below the floor
/// come back Excluded.
CorrectedRho bias_correct(double rho_star, double icc_x, double icc_y, double icc_floor = kDefaultIccFloor);

struct CorrectionSummary {
  std::vector<CorrectedRho> edges;
  std::size_t excluded = 0;
  std::size_t clipped = 0;
};
CorrectionSummary bias_correct(std::span<const double> rho_star, std::span<const double> icc_x, double icc_y,
                               double icc_floor = kDefaultIccFloor);

struct AttenuationResult {
  Vector ratio;                 // per edge, NaN where excluded
  std::vector<bool> excluded;   // per edge
  double mean_ratio = 0.0;      // over included edges
  std::size_t excluded_floor = 0;      // excluded by the ICC floor upstream
  std::size_t excluded_near_zero = 0;  // |truth| < epsilon
  std::size_t included = 0;
};

inline constexpr double kDefaultTruthEpsilon = 1e-3;

/// Edge-wise rho_hat / truth averaged over visit-level replicates. `excluded_upstream`
/// (may be empty) marks truth edges already dropped by the ICC floor.
AttenuationResult empirical_attenuation(std::span<const Vector> rho_hat_replicates, const Vector& truth_corrected,
                                        const std::vector<bool>& excluded_upstream = {},
                                        double epsilon = kDefaultTruthEpsilon);

/// Correlation of every column of `fc` (participants x edges) with `behavior`.
/// Constant columns yield NaN.
Vector bwas_correlations(const Matrix& fc, const Vector& behavior);

struct BwasEstimate {
  Vector rho_hat;
  double proportional_strength = 1.0;
  Vector variance;  // per edge, plug-in from rho_hat / strength
  std::size_t n_participants = 0;
};

BwasEstimate bwas_estimate(const Matrix& fc, const Vector& behavior, double icc_x, double icc_y);

}  // namespace censorfc::bwas
