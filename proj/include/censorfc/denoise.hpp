// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/core.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace censorfc::denoise {

enum class ColumnKind { Intercept, Nuisance, Dct, Spike };

std::string_view to_string(ColumnKind kind);

struct DesignMatrix {
  Matrix columns;                  // T x K
  std::vector<ColumnKind> labels;  // one per column
  Eigen::Index rank = 0;

  std::size_t count(ColumnKind kind) const;
};

/// DCT-II high-pass basis: K = floor(2 T tr cutoff) columns, column k (1-based)
/// holding cos(pi k (t + 0.5) / T). K = 0 gives a T x 0 matrix and a warning.
Matrix dct_bases(std::size_t volumes, double tr_seconds, double cutoff_hz);

/// 36-parameter confound set from 6 realignment parameters and 3 mean signals:
/// the 9 signals, their squares, backward differences (first row 0) and squared differences.
Matrix expand_36p(const Matrix& realignment, const Matrix& mean_signals);
/// Same expansion for an arbitrary T x M signal block: 4M columns.
Matrix expand_confounds(const Matrix& signals);

/// [intercept | nuisance | dct | one unit column per spike volume].
/// `nuisance` / `dct` may have zero columns. Throws ArgumentError on duplicate
/// or out-of-range spike volumes and ShapeError on inconsistent row counts.
DesignMatrix build_design(std::size_t volumes, const Matrix& nuisance, const Matrix& dct,
                          std::span<const std::size_t> spike_volumes);
DesignMatrix build_design(const Matrix& nuisance, const CensorMask& mask, const Matrix& dct);

/// Least-squares fit of every parcel on the full design (column-pivoted complete
/// orthogonal decomposition, minimum-norm when rank deficient); returns the residuals
/// at kept volumes. Throws DegenerateError when the design leaves no residual dof.
ParcelTimeseries simultaneous_regress(const ParcelTimeseries& ts, const DesignMatrix& design, const CensorMask& mask);

/// Residuals at every volume (censored rows included), for diagnostics.
Matrix regression_residuals(const Matrix& y, const Matrix& design);

}  // namespace censorfc::denoise
