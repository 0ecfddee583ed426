// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/censor.hpp"
#include "censorfc/connectome.hpp"
#include "censorfc/core.hpp"
#include "censorfc/io.hpp"
#include "censorfc/simcohort.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace censorfc::pipeline {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Single-run building blocks shared by the CLI subcommands and the grid runner.

struct DenoiseOptions {
  double highpass_hz = 0.01;  // <= 0 disables the DCT basis
  std::string nuisance = "none";  // "none" or "24p" (realignment expansion)
  Matrix extra_nuisance;          // T x M user columns appended to the nuisance block; may be empty
};

struct CensorOutput {
  CensorMask mask;
  Vector fd;
  Vector dvars;          // raw DVARS, empty when the policy ignores it
  KeepVector dvars_flags;
};

/// FD from the realignment, DVARS from the timeseries when the policy uses it, then the mask.
CensorOutput censor_run(const ParcelTimeseries& ts, const Matrix& realignment, const censor::CensorPolicy& policy);

/// Simultaneous regression of intercept, optional nuisance, DCT and spike columns; residuals at kept volumes.
ParcelTimeseries denoise_run(const ParcelTimeseries& ts, const Matrix& realignment, const CensorMask& mask,
                             const DenoiseOptions& options);

// ---------------------------------------------------------------------------
// Manifest

struct RunEntry {
  std::string participant;
  std::string session;
  std::string run;
  std::filesystem::path timeseries;
  std::filesystem::path motion;  // T x 6 realignment CSV
  double tr_seconds = 0.0;       // 0 = read from the binary header or sidecar
};

struct Partition {
  std::vector<std::string> estimate_sessions;
  std::vector<std::string> truth_sessions;
};

struct Settings {
  std::size_t drop_initial = 15;
  DenoiseOptions denoise;
  CensorLevel truth_policy = CensorLevel::Stringent;
  connectome::GroundTruthCriteria truth;
  std::size_t max_lag = 100;
  std::optional<double> target_rmse;
  bool qcfc = true;
  std::size_t threads = 0;
  std::uint64_t seed = 0;
};

struct Manifest {
  std::vector<RunEntry> runs;
  std::vector<double> durations_minutes;
  std::vector<CensorLevel> policies;
  /// Per participant. Participants without an entry get the default leave-one-session-out split.
  std::map<std::string, std::vector<Partition>> splits;
  Settings settings;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> measures;   // cohort table with a "behavior" measure
  std::optional<std::filesystem::path> centroids;  // P x 3 CSV for distance dependence

  /// Relative paths resolve against `base_dir`. Throws ConfigError / ValidationError.
  static Manifest from_json(const Json& j, const std::filesystem::path& base_dir);
  static Manifest load(const std::filesystem::path& path);
  Json to_json() const;
  /// Non-empty grid, positive durations, disjoint splits, resolvable paths.
  void validate() const;
};

struct Overrides {
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  bool force = false;
};

struct PipelineResult {
  std::size_t cells_total = 0;
  std::size_t cells_run = 0;
  std::size_t cells_skipped = 0;
  std::size_t cells_failed = 0;
  std::filesystem::path summary_path;
  Json summary;
};

/// Applies overrides (flag > manifest > default), validates, and runs every
/// participant x duration x policy cell. Cell failures are recorded, not thrown.
PipelineResult run_pipeline(Manifest manifest, const Overrides& overrides = {});

/// FNV-1a of the serialized effective configuration.
std::string config_digest(const Json& config);

// ---------------------------------------------------------------------------
// Simulation I/O

sim::SimConfig sim_config_from_json(const Json& j);
Json sim_config_to_json(const sim::SimConfig& c);

/// Writes every run (timeseries, motion, sidecar), the measures table, centroids,
/// ground_truth.json and a pipeline manifest into `dir`. Returns the manifest.
Json write_cohort(const sim::SyntheticCohort& cohort, const std::filesystem::path& dir, io::Format format);

/// Machine-readable error record.
Json error_json(const std::exception& e);

}  // namespace censorfc::pipeline
