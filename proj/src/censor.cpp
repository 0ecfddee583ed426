// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/censor.hpp"

#include "censorfc/errors.hpp"
#include "censorfc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace censorfc::censor {

CensorPolicy CensorPolicy::preset(CensorLevel level) {
  CensorPolicy p;
  p.level = level;
  switch (level) {
    case CensorLevel::None:
    case CensorLevel::Lenient:
      p.fd_threshold_mm = 0.5;
      p.use_dvars = false;
      break;
    case CensorLevel::Stringent:
    case CensorLevel::Expanded:
      p.fd_threshold_mm = 0.2;
      p.use_dvars = true;
      break;
  }
  return p;
}

void CensorPolicy::validate() const {
  if (!(fd_threshold_mm > 0.0)) throw ArgumentError("fd_threshold_mm must be > 0");
  if (fd_lag < 1) throw ArgumentError("fd_lag must be >= 1");
  if (min_segment < 1) throw ArgumentError("min_segment must be >= 1");
  if (fd_filter_hz && !(*fd_filter_hz > 0.0)) throw ArgumentError("fd_filter_hz must be > 0");
}

// ---------------------------------------------------------------------------
// FD

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;
};

Biquad butterworth_lowpass(double cutoff_hz, double fs) {
  const double k = std::tan(std::numbers::pi * cutoff_hz / fs);
  const double q = std::numbers::sqrt2;
  const double norm = 1.0 / (1.0 + q * k + k * k);
  Biquad f{};
  f.b0 = k * k * norm;
  f.b1 = 2.0 * f.b0;
  f.b2 = f.b0;
  f.a1 = 2.0 * (k * k - 1.0) * norm;
  f.a2 = (1.0 - q * k + k * k) * norm;
  return f;
}

// Transposed direct form II, started from the steady state of a constant input x[0].
void run_biquad(const Biquad& f, std::vector<double>& x) {
  if (x.empty()) return;
  const double x0 = x.front();
  double z2 = (f.b2 - f.a2) * x0;
  double z1 = (f.b1 - f.a1) * x0 + z2;
  for (double& v : x) {
    const double in = v;
    const double out = f.b0 * in + z1;
    z1 = f.b1 * in - f.a1 * out + z2;
    z2 = f.b2 * in - f.a2 * out;
    v = out;
  }
}

}  // namespace

Matrix lowpass_filtfilt(const Matrix& x, double cutoff_hz, double tr_seconds) {
  if (!(tr_seconds > 0.0)) throw ArgumentError("tr_seconds must be > 0");
  const double fs = 1.0 / tr_seconds;
  if (!(cutoff_hz > 0.0) || cutoff_hz >= fs / 2.0)
    throw ArgumentError("filter cutoff must lie in (0, Nyquist=" + std::to_string(fs / 2.0) + ") Hz");
  const auto f = butterworth_lowpass(cutoff_hz, fs);
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < 2) return x;
  const std::size_t pad = std::min(n - 1, static_cast<std::size_t>(3.0 * std::ceil(fs / cutoff_hz)));
  Matrix out(x.rows(), x.cols());
  std::vector<double> buf(n + 2 * pad);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    // Odd reflection about both end points.
    const double first = x(0, c);
    const double last = x(x.rows() - 1, c);
    for (std::size_t i = 0; i < pad; ++i) buf[i] = 2.0 * first - x(static_cast<Eigen::Index>(pad - i), c);
    for (std::size_t i = 0; i < n; ++i) buf[pad + i] = x(static_cast<Eigen::Index>(i), c);
    for (std::size_t i = 0; i < pad; ++i) buf[pad + n + i] = 2.0 * last - x(static_cast<Eigen::Index>(n - 2 - i), c);
    run_biquad(f, buf);
    std::reverse(buf.begin(), buf.end());
    run_biquad(f, buf);
    std::reverse(buf.begin(), buf.end());
    for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i), c) = buf[pad + i];
  }
  return out;
}

Vector compute_fd(const Matrix& realignment, double rotation_radius_mm, std::size_t lag,
                  std::optional<double> filter_cutoff_hz, double tr_seconds) {
  if (realignment.cols() != 6) throw ShapeError("realignment must have 6 columns");
  if (!(rotation_radius_mm > 0.0)) throw ArgumentError("rotation radius must be > 0");
  const auto t = static_cast<std::size_t>(realignment.rows());
  if (lag < 1 || lag >= t) throw ArgumentError("FD lag must satisfy 1 <= lag < T");
  const Matrix params = filter_cutoff_hz ? lowpass_filtfilt(realignment, *filter_cutoff_hz, tr_seconds) : realignment;
  Vector fd = Vector::Zero(static_cast<Eigen::Index>(t));
  const auto l = static_cast<Eigen::Index>(lag);
  for (Eigen::Index i = l; i < params.rows(); ++i) {
    const auto d = (params.row(i) - params.row(i - l)).cwiseAbs();
    fd(i) = d.head<3>().sum() + rotation_radius_mm * d.tail<3>().sum();
  }
  return fd;
}

// ---------------------------------------------------------------------------
// DVARS

DvarsResult compute_dvars(const Matrix& data) {
  if (data.rows() < 2) throw ArgumentError("DVARS needs at least 2 volumes");
  DvarsResult r;
  r.dvars = Vector::Zero(data.rows());
  for (Eigen::Index t = 1; t < data.rows(); ++t) {
    r.dvars(t) = std::sqrt((data.row(t) - data.row(t - 1)).squaredNorm() / static_cast<double>(data.cols()));
  }
  std::vector<double> sq(static_cast<std::size_t>(data.rows() - 1));
  for (Eigen::Index t = 1; t < data.rows(); ++t) sq[static_cast<std::size_t>(t - 1)] = r.dvars(t) * r.dvars(t);
  r.null_scale = std::sqrt(stats::median(std::move(sq)));
  r.standardized = r.null_scale > 0.0 ? Vector(r.dvars / r.null_scale) : Vector(Vector::Zero(data.rows()));
  return r;
}

DvarsResult compute_dvars(const ParcelTimeseries& ts) { return compute_dvars(ts.data()); }

KeepVector dvars_flags(const Vector& standardized, std::optional<std::size_t> threshold_volumes, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
  const auto n = static_cast<std::size_t>(standardized.size());
  KeepVector flags(n, false);
  if (n < 3) return flags;
  // Cube roots of squared DVARS are close to Gaussian for chi-square-like nulls.
  std::vector<double> v(n - 1);
  for (std::size_t t = 1; t < n; ++t) v[t - 1] = std::cbrt(standardized(static_cast<Eigen::Index>(t)) * standardized(static_cast<Eigen::Index>(t)));
  const double centre = stats::median(v);
  const double lower_quartile = stats::quantile(v, 0.25);
  // Lower half-IQR, doubled, as a Gaussian SD; unaffected by upper-tail spikes.
  const double sd = 2.0 * (centre - lower_quartile) / 1.3489795003921634;
  if (!(sd > 0.0)) return flags;
  const double tests = static_cast<double>(threshold_volumes.value_or(n));
  if (!(tests >= 1.0)) throw ArgumentError("threshold volume count must be >= 1");
  const double level = alpha / tests;
  for (std::size_t t = 1; t < n; ++t) {
    const double z = (v[t - 1] - centre) / sd;
    flags[t] = stats::normal_sf(z) < level;
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Masks

KeepVector fd_flags(const Vector& fd, double threshold_mm) {
  KeepVector f(static_cast<std::size_t>(fd.size()));
  for (Eigen::Index t = 0; t < fd.size(); ++t) f[static_cast<std::size_t>(t)] = fd(t) > threshold_mm;
  return f;
}

KeepVector expand_flags(const KeepVector& flagged, std::size_t before, std::size_t after) {
  const std::size_t n = flagged.size();
  KeepVector out(n, false);
  for (std::size_t t = 0; t < n; ++t) {
    if (!flagged[t]) continue;
    const std::size_t lo = t >= before ? t - before : 0;
    const std::size_t hi = std::min(n - 1, t + after);
    for (std::size_t u = lo; u <= hi; ++u) out[u] = true;
  }
  return out;
}

KeepVector remove_short_segments(const KeepVector& keep, std::size_t min_segment) {
  KeepVector out = keep;
  std::size_t t = 0;
  while (t < out.size()) {
    if (!out[t]) {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end < out.size() && out[end]) ++end;
    if (end - t < min_segment) std::fill(out.begin() + static_cast<std::ptrdiff_t>(t), out.begin() + static_cast<std::ptrdiff_t>(end), false);
    t = end;
  }
  return out;
}

CensorMask build_mask(const Vector& fd, const KeepVector& dvars, const CensorPolicy& policy) {
  policy.validate();
  const auto n = static_cast<std::size_t>(fd.size());
  CensorMask mask = CensorMask::keep_all(n);
  mask.policy = policy.level;
  mask.fd_threshold_mm = policy.fd_threshold_mm;
  if (policy.level == CensorLevel::None) return mask;
  if (policy.use_dvars && dvars.size() != n) throw ShapeError("DVARS flags length differs from FD length");

  KeepVector base(n, false);
  for (std::size_t t = 0; t < n; ++t) {
    const bool by_fd = fd(static_cast<Eigen::Index>(t)) > policy.fd_threshold_mm;
    const bool by_dvars = policy.use_dvars && dvars[t];
    mask.stats.flagged_fd += by_fd;
    mask.stats.flagged_dvars += by_dvars;
    base[t] = by_fd || by_dvars;
    mask.stats.flagged += base[t];
  }

  KeepVector censored = base;
  if (policy.level == CensorLevel::Expanded) {
    censored = expand_flags(base, policy.expand_before, policy.expand_after);
    for (std::size_t t = 0; t < n; ++t) mask.stats.expansion_added += censored[t] && !base[t];
  }
  for (std::size_t t = 0; t < n; ++t) mask.keep[t] = !censored[t];
  if (policy.level == CensorLevel::Expanded) {
    auto trimmed = remove_short_segments(mask.keep, policy.min_segment);
    for (std::size_t t = 0; t < n; ++t) mask.stats.segment_removed += mask.keep[t] && !trimmed[t];
    mask.keep = std::move(trimmed);
  }
  return mask;
}

// ---------------------------------------------------------------------------

double high_motion_fraction(const Vector& fd, double threshold_mm) {
  if (fd.size() == 0) throw ArgumentError("empty FD series");
  return static_cast<double>((fd.array() > threshold_mm).count()) / static_cast<double>(fd.size());
}

MotionSplit motion_split(const CohortTable& cohort, const std::string& measure) {
  const auto means = cohort.participant_means(measure);
  if (means.size() < 2) throw ArgumentError("motion split needs at least 2 participants with '" + measure + "'");
  MotionSplit split;
  std::vector<double> values;
  for (const auto& [id, v] : means) values.push_back(v);
  split.mean = stats::mean(values);
  // Rounding in the mean must not push tied participants above it.
  const double margin = 1e-12 * std::max(1.0, std::abs(split.mean));
  for (const auto& [id, v] : means) (v > split.mean + margin ? split.above_average : split.below_average).push_back(id);
  return split;
}

}  // namespace censorfc::censor
