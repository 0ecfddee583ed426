// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/simcohort.hpp"

#include "censorfc/censor.hpp"
#include "censorfc/errors.hpp"
#include "censorfc/parallel.hpp"
#include "censorfc/random.hpp"
#include "censorfc/stats.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace censorfc::sim {

namespace {

// Stream tags keep every random component independent of the others.
enum Stream : std::uint64_t {
  kGeometry = 1,
  kGroup,
  kDirection,
  kParticipant,
  kBehavior,
  kMotion,
  kSignal,
  kArtifact,
};

Matrix normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = sd * rng.normal();
  return m;
}

Matrix to_correlation(const Matrix& cov) {
  const Vector inv = cov.diagonal().cwiseSqrt().cwiseInverse();
  Matrix r = inv.asDiagonal() * cov * inv.asDiagonal();
  r.diagonal().setOnes();
  return r;
}

Vector upper_z(const Matrix& corr) {
  const auto p = static_cast<std::size_t>(corr.rows());
  Vector z(static_cast<Eigen::Index>(edge_count(p)));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < corr.rows(); ++i)
    for (Eigen::Index j = i + 1; j < corr.cols(); ++j) z(k++) = std::atanh(corr(i, j));
  return z;
}

std::string pad_id(const char* prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

// Unit-variance AR(1) latent series, one per column, started from stationarity.
Matrix ar1_latents(Rng& rng, std::size_t volumes, Eigen::Index count, double phi) {
  const auto t = static_cast<Eigen::Index>(volumes);
  const double innov = std::sqrt(1.0 - phi * phi);
  Matrix z(t, count);
  for (Eigen::Index c = 0; c < count; ++c) z(0, c) = rng.normal();
  for (Eigen::Index i = 1; i < t; ++i)
    for (Eigen::Index c = 0; c < count; ++c) z(i, c) = phi * z(i - 1, c) + innov * rng.normal();
  return z;
}

std::string join_edges(const std::vector<std::size_t>& edges) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < edges.size(); ++i) os << (i ? "," : "") << edges[i];
  os << '}';
  return os.str();
}

struct MotionDraw {
  MotionTrace trace;
  std::vector<std::size_t> spikes;
};

MotionDraw draw_motion(Rng& rng, const MotionConfig& m, std::size_t volumes, double target_fd) {
  const auto t = static_cast<Eigen::Index>(volumes);
  MotionDraw out;
  // FD of independent normal steps is 3 |d_trans| + 50 * 3 |d_rot| with E|d| = sd sqrt(2/pi).
  const double step = target_fd / (6.0 * std::sqrt(2.0 / std::numbers::pi));
  const double jitter = m.volume_jitter_sd;
  Matrix steps = Matrix::Zero(t, 6);
  for (Eigen::Index i = 1; i < t; ++i) {
    const double s = step * std::exp(jitter * rng.normal() - 0.5 * jitter * jitter);
    for (Eigen::Index c = 0; c < 3; ++c) steps(i, c) = s * rng.normal();
    for (Eigen::Index c = 3; c < 6; ++c) steps(i, c) = s / censor::kDefaultRotationRadiusMm * rng.normal();
  }
  std::set<std::size_t> spikes;
  if (m.spike_rate > 0.0 && volumes > 1) {
    const int bursts = rng.poisson(m.spike_rate * static_cast<double>(volumes));
    for (int b = 0; b < bursts; ++b) {
      const std::size_t start = 1 + rng.index(volumes - 1);
      const std::size_t len = 1 + static_cast<std::size_t>(rng.poisson(std::max(0.0, m.burst_mean_length - 1.0)));
      for (std::size_t v = start; v < std::min(volumes, start + len); ++v) spikes.insert(v);
    }
  }
  for (auto v : spikes) {
    // Translation jump with L1 norm equal to the burst FD.
    const double mag = m.spike_fd_magnitude * rng.uniform(0.8, 1.2);
    double w[3], total = 0.0;
    for (double& x : w) total += (x = rng.uniform(0.1, 1.0));
    for (Eigen::Index c = 0; c < 3; ++c)
      steps(static_cast<Eigen::Index>(v), c) = (rng.bernoulli(0.5) ? 1.0 : -1.0) * mag * w[c] / total;
  }
  Matrix realign(t, 6);
  realign.row(0).setZero();
  for (Eigen::Index i = 1; i < t; ++i) realign.row(i) = realign.row(i - 1) + steps.row(i);
  out.trace.realignment = std::move(realign);
  out.trace.fd = censor::compute_fd(out.trace.realignment);
  out.spikes.assign(spikes.begin(), spikes.end());
  return out;
}

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("simulation config: " + what); };
  if (n_participants < 1) fail("n_participants must be >= 1");
  if (sessions_per_participant < 1) fail("sessions_per_participant must be >= 1");
  if (runs_per_session < 1) fail("runs_per_session must be >= 1");
  if (T_volumes < 3) fail("T_volumes must be >= 3");
  if (!(tr_seconds > 0.0)) fail("tr_seconds must be > 0");
  if (parcel_count < 2) fail("parcel_count must be >= 2");
  if (fc_rank < 1) fail("fc_rank must be >= 1");
  if (!(ar1_phi > -1.0 && ar1_phi < 1.0)) fail("ar1_phi must lie in (-1, 1)");
  if (!(true_fc_signal_var >= 0.0)) fail("true_fc_signal_var must be >= 0");
  if (!(motion.baseline_fd_mm >= 0.0) || !(motion.trait_sd >= 0.0) || !(motion.state_sd >= 0.0) ||
      !(motion.volume_jitter_sd >= 0.0) || !(motion.spike_rate >= 0.0) || !(motion.spike_fd_magnitude > 0.0) ||
      !(motion.burst_mean_length >= 1.0))
    fail("motion rates and scales must be non-negative (spike magnitude > 0, burst length >= 1)");
  if (!(artifact.amplitude >= 0.0) || !(artifact.distance_decay_mm > 0.0))
    fail("artifact amplitude must be >= 0 and distance decay > 0");
  if (!std::isfinite(trait_fc_coupling) || !std::isfinite(state_fc_coupling)) fail("couplings must be finite");
  if (!(std::abs(behavior_rho) < 1.0)) fail("|behavior_rho| must be < 1");
  if (!(behavior_icc > 0.0 && behavior_icc <= 1.0)) fail("behavior_icc must lie in (0, 1]");
  const auto edges = edge_count(parcel_count);
  for (auto e : behavior_edges)
    if (e >= edges) fail("behavior edge " + std::to_string(e) + " out of range");
  if (std::set<std::size_t>(behavior_edges.begin(), behavior_edges.end()).size() != behavior_edges.size())
    fail("duplicate behavior edges");
  if (group_fc) {
    const auto p = static_cast<Eigen::Index>(parcel_count);
    if (group_fc->rows() != p || group_fc->cols() != p) fail("group_fc must be parcel_count x parcel_count");
    if (!group_fc->allFinite() || !group_fc->isApprox(group_fc->transpose(), 1e-12) ||
        (group_fc->diagonal().array() - 1.0).abs().maxCoeff() > 1e-12)
      fail("group_fc must be a symmetric matrix with unit diagonal");
    Eigen::LLT<Matrix> llt(*group_fc);
    if (llt.info() != Eigen::Success) {
      std::vector<std::size_t> all(edges);
      for (std::size_t e = 0; e < edges; ++e) all[e] = e;
      throw ConfigError("group_fc is not positive definite; infeasible correlation targets for edge set " +
                        join_edges(all));
    }
  }
}

const SessionTruth& GroundTruthRecord::session(std::size_t participant, std::size_t s) const {
  for (const auto& st : sessions)
    if (st.participant == participant && st.session == s) return st;
  throw ArgumentError("no ground truth for participant " + std::to_string(participant) + " session " +
                      std::to_string(s));
}

std::string SyntheticCohort::participant_id(std::size_t i) const { return pad_id("sub-", i + 1, 4); }
std::string SyntheticCohort::session_id(std::size_t s) const { return pad_id("ses-", s + 1, 1); }

Matrix random_correlation(std::size_t parcels, std::size_t rank, std::uint64_t seed) {
  Rng rng(seed, kGroup);
  const Matrix l = normal_matrix(rng, static_cast<Eigen::Index>(parcels), static_cast<Eigen::Index>(rank),
                                 1.0 / std::sqrt(static_cast<double>(rank)));
  Vector d(static_cast<Eigen::Index>(parcels));
  for (auto& x : d) x = rng.uniform(0.3, 1.0);
  Matrix cov = l * l.transpose();
  cov.diagonal() += d;
  return to_correlation(cov);
}

Matrix correlated_ar1(const Matrix& corr, double phi, std::size_t volumes, std::uint64_t seed, std::uint64_t stream) {
  Eigen::LLT<Matrix> llt(corr);
  if (llt.info() != Eigen::Success) throw ConfigError("correlation matrix is not positive definite");
  Rng rng(seed, stream);
  const Matrix z = ar1_latents(rng, volumes, corr.rows(), phi);
  return z * llt.matrixL().transpose();
}

SyntheticCohort generate(const SimConfig& config) {
  config.validate();
  SyntheticCohort cohort;
  cohort.config = config;
  const auto p = static_cast<Eigen::Index>(config.parcel_count);
  const auto n_edges = edge_count(config.parcel_count);
  const std::uint64_t seed = config.seed;
  auto& truth = cohort.truth;

  truth.centroids = qcfc::ParcelGeometry::synthetic(config.parcel_count, derive_seed(seed, kGeometry)).centroids();

  // Group loadings: C = L L' + diag(d) before normalisation.
  Matrix loadings;
  Vector uniq;
  {
    Rng rng(derive_seed(seed, kGroup));
    if (config.group_fc) {
      loadings = Eigen::LLT<Matrix>(*config.group_fc).matrixL();
      uniq = Vector::Zero(p);
    } else {
      const auto k = static_cast<Eigen::Index>(config.fc_rank);
      loadings = normal_matrix(rng, p, k, 1.0 / std::sqrt(static_cast<double>(k)));
      uniq.resize(p);
      for (auto& x : uniq) x = rng.uniform(0.3, 1.0);
    }
  }
  {
    Matrix cov = loadings * loadings.transpose();
    cov.diagonal() += uniq;
    truth.group_correlation = to_correlation(cov);
  }
  Matrix direction;
  {
    Rng rng(derive_seed(seed, kDirection));
    direction = normal_matrix(rng, p, loadings.cols(), 1.0 / std::sqrt(static_cast<double>(loadings.cols())));
  }

  Matrix artifact_factor;
  if (config.artifact.amplitude > 0.0) {
    const qcfc::ParcelGeometry geo(truth.centroids);
    Matrix k(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j)
        k(i, j) = std::exp(-geo.distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) /
                           config.artifact.distance_decay_mm);
    k.diagonal().array() += 1e-9;
    artifact_factor = Eigen::LLT<Matrix>(k).matrixL();
  }

  const double sqrt_signal = std::sqrt(config.true_fc_signal_var);
  const std::size_t n = config.n_participants;
  const std::size_t sessions = config.sessions_per_participant;
  Matrix participant_z = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_edges));

  for (std::size_t i = 0; i < n; ++i) {
    const auto pseed = derive_seed(derive_seed(seed, kParticipant), i);
    Rng prng(pseed);
    const double trait = prng.normal();
    const Matrix g = normal_matrix(prng, p, loadings.cols());
    const std::string pid = cohort.participant_id(i);
    for (std::size_t s = 0; s < sessions; ++s) {
      const auto sseed = derive_seed(pseed, s + 1);
      Rng srng(sseed);
      const double state = srng.normal();
      const Matrix l = loadings + sqrt_signal * g +
                       (config.trait_fc_coupling * trait + config.state_fc_coupling * state) * direction;
      Matrix cov = l * l.transpose();
      cov.diagonal() += uniq;
      SessionTruth st;
      st.participant = i;
      st.session = s;
      st.trait = trait;
      st.state = state;
      st.correlation = to_correlation(cov);
      st.z = upper_z(st.correlation);
      st.target_fd_mm = config.motion.baseline_fd_mm *
                        std::exp(config.motion.trait_sd * trait + config.motion.state_sd * state);
      participant_z.row(static_cast<Eigen::Index>(i)) += st.z.transpose() / static_cast<double>(sessions);

      // Parcel signal = A z_t with z the AR(1) latents for loadings and unique parts.
      const Vector scale = cov.diagonal().cwiseSqrt().cwiseInverse();
      Matrix mixing(p, l.cols() + p);
      mixing.leftCols(l.cols()) = scale.asDiagonal() * l;
      mixing.rightCols(p) = (scale.array() * uniq.array().sqrt()).matrix().asDiagonal();

      const std::string sid = cohort.session_id(s);
      double fd_sum = 0.0;
      for (std::size_t r = 0; r < config.runs_per_session; ++r) {
        const auto rseed = derive_seed(sseed, r + 1);
        Rng mrng(rseed, kMotion);
        auto motion = draw_motion(mrng, config.motion, config.T_volumes, st.target_fd_mm);
        Rng xrng(rseed, kSignal);
        const Matrix latents = ar1_latents(xrng, config.T_volumes, mixing.cols(), config.ar1_phi);
        Matrix x = latents * mixing.transpose();
        if (config.artifact.amplitude > 0.0) {
          Rng arng(rseed, kArtifact);
          for (auto v : motion.spikes) {
            const auto vi = static_cast<Eigen::Index>(v);
            Vector xi(p);
            for (auto& e : xi) e = arng.normal();
            const double amp = config.artifact.amplitude * motion.trace.fd(vi) / config.motion.spike_fd_magnitude;
            x.row(vi) += (amp * (artifact_factor * xi)).transpose();
          }
        }
        motion.trace.dvars = censor::compute_dvars(x).dvars;
        fd_sum += motion.trace.fd.tail(motion.trace.fd.size() - 1).mean();
        const std::string run_id = sid + "_run-" + std::to_string(r + 1);
        cohort.runs.push_back(SimRun{pid, sid, run_id, ParcelTimeseries(std::move(x), config.tr_seconds, run_id, pid),
                                     std::move(motion.trace), std::move(motion.spikes)});
      }
      cohort.measures.add(pid, sid, "mean_fd", fd_sum / static_cast<double>(config.runs_per_session));
      truth.sessions.push_back(std::move(st));
    }
  }

  // Behavior: y = W_std a + sqrt(1 - q) eps with corr(y, w_e) = rho on the chosen edges.
  Rng brng(derive_seed(seed, kBehavior));
  Vector y(static_cast<Eigen::Index>(n));
  for (auto& v : y) v = brng.normal();
  if (config.behavior_rho != 0.0 && !config.behavior_edges.empty()) {
    const auto m = static_cast<Eigen::Index>(config.behavior_edges.size());
    const auto name = join_edges(config.behavior_edges);
    if (static_cast<Eigen::Index>(n) < m + 3)
      throw ConfigError("too few participants to plant behavior correlation on edge set " + name);
    Matrix w(static_cast<Eigen::Index>(n), m);
    for (Eigen::Index c = 0; c < m; ++c) {
      Vector col = participant_z.col(static_cast<Eigen::Index>(config.behavior_edges[static_cast<std::size_t>(c)]));
      col.array() -= col.mean();
      const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n - 1));
      if (!(sd > 0.0)) throw ConfigError("edge set " + name + " has no between-participant FC variance");
      w.col(c) = col / sd;
    }
    const Matrix rw = (w.transpose() * w) / static_cast<double>(n - 1);
    Eigen::LLT<Matrix> llt(rw);
    const Vector target = Vector::Constant(m, config.behavior_rho);
    if (llt.info() != Eigen::Success) throw ConfigError("FC over edge set " + name + " is not positive definite");
    const Vector a = llt.solve(target);
    const double q = target.dot(a);
    if (!(q < 1.0))
      throw ConfigError("infeasible behavior correlation " + std::to_string(config.behavior_rho) + " for edge set " +
                        name);
    // Residual orthogonal to the edge columns keeps the planted correlations exact in-sample.
    Vector eps = y.array() - y.mean();
    eps -= w * llt.solve(w.transpose() * eps);
    eps /= std::sqrt(eps.squaredNorm() / static_cast<double>(n - 1));
    y = w * a + std::sqrt(1.0 - q) * eps;
  }
  truth.behavior_true.assign(y.data(), y.data() + y.size());
  truth.behavior_edges = config.behavior_edges;
  truth.behavior_icc = config.behavior_icc;
  truth.behavior_rho = Vector::Zero(static_cast<Eigen::Index>(n_edges));
  if (n >= 3) {
    for (Eigen::Index e = 0; e < participant_z.cols(); ++e) {
      try {
        truth.behavior_rho(e) = stats::pearson(Vector(participant_z.col(e)), y);
      } catch (const DegenerateError&) {
        truth.behavior_rho(e) = 0.0;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string pid = cohort.participant_id(i);
    for (std::size_t s = 0; s < sessions; ++s) {
      const double obs = std::sqrt(config.behavior_icc) * y(static_cast<Eigen::Index>(i)) +
                         std::sqrt(1.0 - config.behavior_icc) * brng.normal();
      cohort.measures.add(pid, cohort.session_id(s), "behavior", obs);
    }
  }

  // Fisher-z sampling variance at one session is about Tr(Sigma^2)/n^2 = (1 + phi^2) / ((1 - phi^2) n).
  const double phi = config.ar1_phi;
  const double vol = static_cast<double>(config.T_volumes * config.runs_per_session);
  const double noise = (1.0 + phi * phi) / ((1.0 - phi * phi) * vol);
  truth.fc_icc.resize(static_cast<Eigen::Index>(n_edges));
  for (Eigen::Index e = 0; e < participant_z.cols(); ++e) {
    const Vector c = participant_z.col(e).array() - participant_z.col(e).mean();
    const double signal = n > 1 ? c.squaredNorm() / static_cast<double>(n - 1) : 0.0;
    truth.fc_icc(e) = signal / (signal + noise);
  }
  truth.acf.resize(101);
  for (Eigen::Index l = 0; l < truth.acf.size(); ++l) truth.acf(l) = std::pow(phi, static_cast<double>(l));
  truth.trait_fc_coupling = config.trait_fc_coupling;
  truth.state_fc_coupling = config.state_fc_coupling;
  return cohort;
}

// ---------------------------------------------------------------------------

QcfcSimCohort generate_qcfc(const QcfcSimConfig& config) {
  if (config.n_participants < 2 || config.sessions < 1 || config.edges < 1)
    throw ConfigError("QC-FC simulation needs >= 2 participants, >= 1 session and >= 1 edge");
  const double b = config.beta_between, w = config.beta_within;
  if (!(b * b + w * w <= 1.0)) throw ConfigError("planted coefficients must satisfy b^2 + w^2 <= 1");
  if (!(config.missing_rate >= 0.0 && config.missing_rate < 1.0)) throw ConfigError("missing_rate must lie in [0, 1)");
  Rng rng(config.seed, kParticipant);
  std::vector<std::size_t> participant;
  std::vector<std::size_t> session;
  std::vector<double> fd;
  for (std::size_t i = 0; i < config.n_participants; ++i) {
    const double trait = config.trait_sd * rng.normal();
    for (std::size_t s = 0; s < config.sessions; ++s) {
      const double state = config.state_sd * rng.normal();
      if (s > 0 && config.missing_rate > 0.0 && rng.bernoulli(config.missing_rate)) continue;
      participant.push_back(i);
      session.push_back(s);
      fd.push_back(config.fd_mean + trait + state);
    }
  }
  const Vector fdv = Eigen::Map<const Vector>(fd.data(), static_cast<Eigen::Index>(fd.size()));
  const qcfc::RmDesign design(participant, fdv);
  const auto obs = static_cast<Eigen::Index>(fd.size());
  const Vector bs = design.between().value_or(Vector::Zero(obs));
  const Vector ws = design.within().value_or(Vector::Zero(obs));
  const double resid = std::sqrt(std::max(0.0, 1.0 - b * b - w * w));

  QcfcSimCohort out;
  out.beta_between = b;
  out.beta_within = w;
  Rng erng(config.seed, kSignal);
  std::vector<std::string> pids(config.n_participants);
  for (std::size_t i = 0; i < pids.size(); ++i) pids[i] = pad_id("sub-", i + 1, 4);
  Matrix y(obs, static_cast<Eigen::Index>(config.edges));
  for (Eigen::Index e = 0; e < y.cols(); ++e)
    for (Eigen::Index o = 0; o < obs; ++o) y(o, e) = b * bs(o) + w * ws(o) + resid * erng.normal();
  for (Eigen::Index o = 0; o < obs; ++o) {
    const auto& pid = pids[participant[static_cast<std::size_t>(o)]];
    const auto sid = pad_id("ses-", session[static_cast<std::size_t>(o)] + 1, 1);
    out.table.add(pid, sid, "mean_fd", fdv(o));
    for (Eigen::Index e = 0; e < y.cols(); ++e) out.table.add(pid, sid, "edge_" + std::to_string(e), y(o, e));
  }
  return out;
}

BwasSimSample generate_bwas(const BwasSimConfig& config) {
  if (config.n_participants < 3 || config.edges < 1 || config.visits < 1)
    throw ConfigError("BWAS simulation needs >= 3 participants, >= 1 edge and >= 1 visit");
  if (!(std::abs(config.rho) < 1.0)) throw ConfigError("|rho| must be < 1");
  if (!(config.icc_x >= 0.0 && config.icc_x <= 1.0 && config.icc_y >= 0.0 && config.icc_y <= 1.0))
    throw ConfigError("ICCs must lie in [0, 1]");
  const auto n = static_cast<Eigen::Index>(config.n_participants);
  const auto e = static_cast<Eigen::Index>(config.edges);
  Rng rng(config.seed, kBehavior);
  BwasSimSample out;
  out.behavior_true.resize(n);
  for (auto& v : out.behavior_true) v = rng.normal();
  const double ortho = std::sqrt(1.0 - config.rho * config.rho);
  out.fc_true.resize(n, e);
  for (Eigen::Index c = 0; c < e; ++c)
    for (Eigen::Index i = 0; i < n; ++i) out.fc_true(i, c) = config.rho * out.behavior_true(i) + ortho * rng.normal();
  const double sx = std::sqrt(config.icc_x), nx = std::sqrt(1.0 - config.icc_x);
  const double sy = std::sqrt(config.icc_y), ny = std::sqrt(1.0 - config.icc_y);
  for (std::size_t v = 0; v < config.visits; ++v) {
    Matrix x(n, e);
    for (Eigen::Index c = 0; c < e; ++c)
      for (Eigen::Index i = 0; i < n; ++i) x(i, c) = sx * out.fc_true(i, c) + nx * rng.normal();
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = sy * out.behavior_true(i) + ny * rng.normal();
    out.fc.push_back(std::move(x));
    out.behavior.push_back(std::move(y));
  }
  return out;
}

// ---------------------------------------------------------------------------

McSummary mc_replicate(const std::function<double(std::uint64_t)>& experiment, std::size_t n_reps, std::uint64_t seed,
                       std::size_t threads, double confidence) {
  if (n_reps < 2) throw ArgumentError("Monte Carlo needs at least 2 replicates");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ArgumentError("confidence must lie in (0, 1)");
  McSummary out;
  out.n_reps = n_reps;
  out.values.assign(n_reps, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> ok(n_reps, 0);
  parallel_for(n_reps, threads, [&](std::size_t r) {
    try {
      const double v = experiment(derive_seed(seed, r));
      if (std::isfinite(v)) {
        out.values[r] = v;
        ok[r] = 1;
      }
    } catch (...) {
    }
  });
  std::vector<double> good;
  for (std::size_t r = 0; r < n_reps; ++r) {
    if (ok[r]) good.push_back(out.values[r]);
    else out.failed.push_back(r);
  }
  out.n_failed = out.failed.size();
  if (good.empty()) {
    out.mean = out.variance = out.ci_low = out.ci_high = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.mean = stats::mean(good);
  out.variance = good.size() > 1 ? stats::variance(good) : 0.0;
  const double z = stats::normal_quantile(0.5 + confidence / 2.0);
  const double half = z * std::sqrt(out.variance / static_cast<double>(good.size()));
  out.ci_low = out.mean - half;
  out.ci_high = out.mean + half;
  return out;
}

McSummary mc_replicate(const SimConfig& config, const std::function<double(const SyntheticCohort&)>& experiment,
                       std::size_t n_reps, std::uint64_t seed, std::size_t threads, double confidence) {
  config.validate();
  return mc_replicate(
      [&](std::uint64_t rep_seed) {
        SimConfig c = config;
        c.seed = rep_seed;
        return experiment(generate(c));
      },
      n_reps, seed, threads, confidence);
}

McVectorSummary mc_replicate_vector(const std::function<Vector(std::uint64_t)>& experiment, std::size_t n_reps,
                                    std::uint64_t seed, std::size_t threads) {
  if (n_reps < 2) throw ArgumentError("Monte Carlo needs at least 2 replicates");
  std::vector<Vector> results(n_reps);
  std::vector<char> ok(n_reps, 0);
  parallel_for(n_reps, threads, [&](std::size_t r) {
    try {
      results[r] = experiment(derive_seed(seed, r));
      ok[r] = results[r].size() > 0 && results[r].allFinite();
    } catch (...) {
    }
  });
  McVectorSummary out;
  out.n_reps = n_reps;
  Eigen::Index k = 0;
  for (std::size_t r = 0; r < n_reps; ++r)
    if (ok[r]) {
      k = results[r].size();
      break;
    }
  for (std::size_t r = 0; r < n_reps; ++r)
    if (ok[r] && results[r].size() != k) ok[r] = 0;
  out.values = Matrix::Constant(static_cast<Eigen::Index>(n_reps), k, std::numeric_limits<double>::quiet_NaN());
  std::size_t good = 0;
  for (std::size_t r = 0; r < n_reps; ++r) {
    if (!ok[r]) {
      out.failed.push_back(r);
      continue;
    }
    out.values.row(static_cast<Eigen::Index>(r)) = results[r].transpose();
    ++good;
  }
  out.n_failed = out.failed.size();
  out.mean = Vector::Zero(k);
  out.variance = Vector::Zero(k);
  if (good == 0) return out;
  for (std::size_t r = 0; r < n_reps; ++r)
    if (ok[r]) out.mean += results[r];
  out.mean /= static_cast<double>(good);
  if (good > 1) {
    for (std::size_t r = 0; r < n_reps; ++r)
      if (ok[r]) out.variance += (results[r] - out.mean).array().square().matrix();
    out.variance /= static_cast<double>(good - 1);
  }
  return out;
}

}  // namespace censorfc::sim
