// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/denoise.hpp"

#include "censorfc/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace censorfc::denoise {

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Intercept: return "intercept";
    case ColumnKind::Nuisance: return "nuisance";
    case ColumnKind::Dct: return "dct";
    case ColumnKind::Spike: return "spike";
  }
  return "nuisance";
}

std::size_t DesignMatrix::count(ColumnKind kind) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kind));
}

Matrix dct_bases(std::size_t volumes, double tr_seconds, double cutoff_hz) {
  if (volumes < 1) throw ArgumentError("dct_bases needs at least one volume");
  if (!(tr_seconds > 0.0)) throw ArgumentError("tr_seconds must be > 0");
  const double nyquist = 0.5 / tr_seconds;
  if (!(cutoff_hz > 0.0) || cutoff_hz >= nyquist)
    throw ArgumentError("high-pass cutoff must lie in (0, Nyquist) Hz");
  const double raw = 2.0 * static_cast<double>(volumes) * tr_seconds * cutoff_hz;
  // Exact products such as 2*100*1*0.005 must not lose a column to rounding.
  const auto k = static_cast<Eigen::Index>(std::floor(raw * (1.0 + 1e-12)));
  const auto t = static_cast<Eigen::Index>(volumes);
  Matrix basis(t, k);
  if (k == 0) {
    spdlog::warn("high-pass cutoff {} Hz is below the lowest resolvable frequency for {} volumes; empty DCT basis",
                 cutoff_hz, volumes);
    return basis;
  }
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index i = 0; i < t; ++i)
      basis(i, c) = std::cos(std::numbers::pi * static_cast<double>(c + 1) * (static_cast<double>(i) + 0.5) /
                             static_cast<double>(t));
  return basis;
}

Matrix expand_confounds(const Matrix& signals) {
  const auto t = signals.rows();
  const auto m = signals.cols();
  Matrix out(t, 4 * m);
  Matrix diff = Matrix::Zero(t, m);
  if (t > 1) diff.bottomRows(t - 1) = signals.bottomRows(t - 1) - signals.topRows(t - 1);
  out.leftCols(m) = signals;
  out.middleCols(m, m) = signals.array().square().matrix();
  out.middleCols(2 * m, m) = diff;
  out.rightCols(m) = diff.array().square().matrix();
  return out;
}

Matrix expand_36p(const Matrix& realignment, const Matrix& mean_signals) {
  if (realignment.cols() != 6) throw ShapeError("36P expansion needs 6 realignment parameters");
  if (mean_signals.cols() != 3) throw ShapeError("36P expansion needs 3 mean signals (WM, CSF, global)");
  if (realignment.rows() != mean_signals.rows()) throw ShapeError("realignment and mean signals differ in length");
  Matrix base(realignment.rows(), 9);
  base << realignment, mean_signals;
  return expand_confounds(base);
}

DesignMatrix build_design(std::size_t volumes, const Matrix& nuisance, const Matrix& dct,
                          std::span<const std::size_t> spike_volumes) {
  const auto t = static_cast<Eigen::Index>(volumes);
  if (nuisance.cols() > 0 && nuisance.rows() != t) throw ShapeError("nuisance rows differ from volume count");
  if (dct.cols() > 0 && dct.rows() != t) throw ShapeError("DCT rows differ from volume count");
  std::set<std::size_t> seen;
  for (auto s : spike_volumes) {
    if (s >= volumes) throw ArgumentError("spike volume " + std::to_string(s) + " out of range");
    if (!seen.insert(s).second) throw ArgumentError("duplicate spike column for volume " + std::to_string(s));
  }
  const auto k = 1 + nuisance.cols() + dct.cols() + static_cast<Eigen::Index>(spike_volumes.size());
  DesignMatrix d;
  d.columns = Matrix::Zero(t, k);
  d.columns.col(0).setOnes();
  d.labels.push_back(ColumnKind::Intercept);
  Eigen::Index c = 1;
  if (nuisance.cols() > 0) d.columns.middleCols(c, nuisance.cols()) = nuisance;
  d.labels.insert(d.labels.end(), static_cast<std::size_t>(nuisance.cols()), ColumnKind::Nuisance);
  c += nuisance.cols();
  if (dct.cols() > 0) d.columns.middleCols(c, dct.cols()) = dct;
  d.labels.insert(d.labels.end(), static_cast<std::size_t>(dct.cols()), ColumnKind::Dct);
  c += dct.cols();
  for (auto s : spike_volumes) {
    d.columns(static_cast<Eigen::Index>(s), c++) = 1.0;
    d.labels.push_back(ColumnKind::Spike);
  }
  d.rank = Eigen::CompleteOrthogonalDecomposition<Matrix>(d.columns).rank();
  return d;
}

DesignMatrix build_design(const Matrix& nuisance, const CensorMask& mask, const Matrix& dct) {
  const auto spikes = mask.censored_indices();
  return build_design(mask.volumes(), nuisance, dct, spikes);
}

Matrix regression_residuals(const Matrix& y, const Matrix& design) {
  if (y.rows() != design.rows()) throw ShapeError("design rows differ from timeseries length");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
  if (cod.rank() >= design.rows()) throw DegenerateError("design matrix leaves no residual degrees of freedom");
  const Matrix beta = cod.solve(y);
  return y - design * beta;
}

ParcelTimeseries simultaneous_regress(const ParcelTimeseries& ts, const DesignMatrix& design, const CensorMask& mask) {
  if (mask.volumes() != ts.volumes()) throw ShapeError("mask length differs from timeseries length");
  if (static_cast<std::size_t>(design.columns.rows()) != ts.volumes())
    throw ShapeError("design rows differ from timeseries length");
  if (mask.kept() < 2) throw DegenerateError("fewer than 2 volumes survive censoring");
  const Matrix resid = regression_residuals(ts.data(), design.columns);
  Matrix kept(static_cast<Eigen::Index>(mask.kept()), resid.cols());
  Eigen::Index r = 0;
  for (std::size_t t = 0; t < mask.volumes(); ++t)
    if (mask.keep[t]) kept.row(r++) = resid.row(static_cast<Eigen::Index>(t));
  return ParcelTimeseries(std::move(kept), ts.tr_seconds(), ts.run_id(), ts.participant_id());
}

}  // namespace censorfc::denoise
