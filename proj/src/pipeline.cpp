// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/pipeline.hpp"

#include "censorfc/bwas.hpp"
#include "censorfc/denoise.hpp"
#include "censorfc/effss.hpp"
#include "censorfc/errors.hpp"
#include "censorfc/parallel.hpp"
#include "censorfc/qcfc.hpp"
#include "censorfc/stats.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace censorfc::pipeline {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Single-run helpers

CensorOutput censor_run(const ParcelTimeseries& ts, const Matrix& realignment, const censor::CensorPolicy& policy) {
  policy.validate();
  if (static_cast<std::size_t>(realignment.rows()) != ts.volumes())
    throw ShapeError("realignment has " + std::to_string(realignment.rows()) + " rows for " +
                     std::to_string(ts.volumes()) + " volumes");
  CensorOutput out;
  out.fd = censor::compute_fd(realignment, censor::kDefaultRotationRadiusMm, policy.fd_lag, policy.fd_filter_hz,
                              ts.tr_seconds());
  if (policy.level != CensorLevel::None && policy.use_dvars) {
    const auto d = censor::compute_dvars(ts);
    out.dvars = d.dvars;
    out.dvars_flags = censor::dvars_flags(d.standardized);
  }
  out.mask = censor::build_mask(out.fd, out.dvars_flags, policy);
  return out;
}

ParcelTimeseries denoise_run(const ParcelTimeseries& ts, const Matrix& realignment, const CensorMask& mask,
                             const DenoiseOptions& options) {
  const auto t = static_cast<Eigen::Index>(ts.volumes());
  Matrix nuisance(t, 0);
  if (options.nuisance == "24p") {
    if (realignment.rows() != t || realignment.cols() != 6) throw ShapeError("24P nuisance needs T x 6 realignment");
    nuisance = denoise::expand_confounds(realignment);
  } else if (options.nuisance != "none") {
    throw ConfigError("unknown nuisance model '" + options.nuisance + "' (expected none or 24p)");
  }
  if (options.extra_nuisance.size() > 0) {
    if (options.extra_nuisance.rows() != t) throw ShapeError("nuisance file rows differ from timeseries volumes");
    Matrix joined(t, nuisance.cols() + options.extra_nuisance.cols());
    joined << nuisance, options.extra_nuisance;
    nuisance = std::move(joined);
  }
  Matrix dct(t, 0);
  if (options.highpass_hz > 0.0) dct = denoise::dct_bases(ts.volumes(), ts.tr_seconds(), options.highpass_hz);
  const auto design = denoise::build_design(nuisance, mask, dct);
  return denoise::simultaneous_regress(ts, design, mask);
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<std::string> string_list(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : j) out.push_back(x.get<std::string>());
  return out;
}

Json split_json(const Partition& p) { return Json{{"estimate", p.estimate_sessions}, {"truth", p.truth_sessions}}; }

}  // namespace

Manifest Manifest::from_json(const Json& j, const fs::path& base_dir) {
  Manifest m;
  try {
    if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
    for (const auto& r : j.value("runs", Json::array())) {
      RunEntry e;
      e.participant = r.at("participant").get<std::string>();
      e.session = r.value("session", std::string("ses-1"));
      e.run = r.value("run", std::string("run-1"));
      e.timeseries = resolve(base_dir, r.at("timeseries").get<std::string>());
      e.motion = resolve(base_dir, r.at("motion").get<std::string>());
      e.tr_seconds = r.value("tr_seconds", 0.0);
      m.runs.push_back(std::move(e));
    }
    const Json grid = j.value("grid", Json::object());
    for (const auto& d : grid.value("durations_minutes", Json::array())) m.durations_minutes.push_back(d.get<double>());
    for (const auto& p : grid.value("policies", Json::array())) m.policies.push_back(parse_censor_level(p.get<std::string>()));
    const Json splits = j.value("splits", Json::object());
    for (const auto& [pid, parts] : splits.items()) {
      for (const auto& part : parts)
        m.splits[pid].push_back({string_list(part.at("estimate"), "split estimate"),
                                 string_list(part.at("truth"), "split truth")});
    }
    const Json s = j.value("settings", Json::object());
    auto& st = m.settings;
    st.drop_initial = s.value("drop_initial", st.drop_initial);
    st.denoise.highpass_hz = s.value("highpass_hz", st.denoise.highpass_hz);
    st.denoise.nuisance = s.value("nuisance", st.denoise.nuisance);
    if (s.contains("truth_policy")) st.truth_policy = parse_censor_level(s.at("truth_policy").get<std::string>());
    st.truth.min_truth_minutes = s.value("min_truth_minutes", st.truth.min_truth_minutes);
    st.truth.min_heldout_volumes = s.value("min_heldout_volumes", st.truth.min_heldout_volumes);
    st.max_lag = s.value("max_lag", st.max_lag);
    if (s.contains("target_rmse") && !s.at("target_rmse").is_null()) st.target_rmse = s.at("target_rmse").get<double>();
    st.qcfc = s.value("qcfc", st.qcfc);
    st.threads = s.value("threads", st.threads);
    st.seed = s.value("seed", st.seed);
    m.output_dir = resolve(base_dir, j.value("output_dir", std::string("censorfc_out")));
    if (j.contains("measures") && !j.at("measures").is_null())
      m.measures = resolve(base_dir, j.at("measures").get<std::string>());
    if (j.contains("centroids") && !j.at("centroids").is_null())
      m.centroids = resolve(base_dir, j.at("centroids").get<std::string>());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Manifest Manifest::load(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(io::read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError("invalid manifest JSON " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

Json Manifest::to_json() const {
  Json j;
  j["runs"] = Json::array();
  for (const auto& r : runs)
    j["runs"].push_back({{"participant", r.participant},
                         {"session", r.session},
                         {"run", r.run},
                         {"timeseries", r.timeseries.string()},
                         {"motion", r.motion.string()},
                         {"tr_seconds", r.tr_seconds}});
  Json pol = Json::array();
  for (auto p : policies) pol.push_back(std::string(to_string(p)));
  j["grid"] = {{"durations_minutes", durations_minutes}, {"policies", pol}};
  Json sp = Json::object();
  for (const auto& [pid, parts] : splits) {
    sp[pid] = Json::array();
    for (const auto& p : parts) sp[pid].push_back(split_json(p));
  }
  j["splits"] = sp;
  j["settings"] = {{"drop_initial", settings.drop_initial},
                   {"highpass_hz", settings.denoise.highpass_hz},
                   {"nuisance", settings.denoise.nuisance},
                   {"truth_policy", std::string(to_string(settings.truth_policy))},
                   {"min_truth_minutes", settings.truth.min_truth_minutes},
                   {"min_heldout_volumes", settings.truth.min_heldout_volumes},
                   {"max_lag", settings.max_lag},
                   {"target_rmse", settings.target_rmse ? Json(*settings.target_rmse) : Json(nullptr)},
                   {"qcfc", settings.qcfc},
                   {"threads", settings.threads},
                   {"seed", settings.seed}};
  j["output_dir"] = output_dir.string();
  j["measures"] = measures ? Json(measures->string()) : Json(nullptr);
  j["centroids"] = centroids ? Json(centroids->string()) : Json(nullptr);
  return j;
}

void Manifest::validate() const {
  if (policies.empty()) throw ValidationError("policy grid has no censoring levels");
  if (durations_minutes.empty()) throw ValidationError("policy grid has no durations");
  for (double d : durations_minutes)
    if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("durations must be positive");
  if (std::set<double>(durations_minutes.begin(), durations_minutes.end()).size() != durations_minutes.size())
    throw ValidationError("duplicate durations in grid");
  if (std::set<CensorLevel>(policies.begin(), policies.end()).size() != policies.size())
    throw ValidationError("duplicate policies in grid");
  if (runs.empty()) throw ValidationError("manifest lists no runs");
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::map<std::string, std::set<std::string>> sessions;
  for (const auto& r : runs) {
    if (r.participant.empty()) throw ValidationError("run with empty participant id");
    if (!seen.insert({r.participant, r.session, r.run}).second)
      throw ValidationError("duplicate run " + r.participant + "/" + r.session + "/" + r.run);
    if (!fs::exists(r.timeseries)) throw ValidationError("timeseries not found: " + r.timeseries.string());
    if (!fs::exists(r.motion)) throw ValidationError("motion file not found: " + r.motion.string());
    if (r.tr_seconds < 0.0) throw ValidationError("negative tr_seconds for " + r.timeseries.string());
    sessions[r.participant].insert(r.session);
  }
  for (const auto& [pid, parts] : splits) {
    auto it = sessions.find(pid);
    if (it == sessions.end()) throw ValidationError("split for unknown participant " + pid);
    for (const auto& p : parts) {
      if (p.estimate_sessions.empty() || p.truth_sessions.empty())
        throw ValidationError("split for " + pid + " needs estimate and truth sessions");
      std::set<std::string> est(p.estimate_sessions.begin(), p.estimate_sessions.end());
      for (const auto& s : p.estimate_sessions)
        if (!it->second.count(s)) throw ValidationError("split for " + pid + " names unknown session " + s);
      for (const auto& s : p.truth_sessions) {
        if (!it->second.count(s)) throw ValidationError("split for " + pid + " names unknown session " + s);
        if (est.count(s)) throw ValidationError("split for " + pid + " uses session " + s + " for estimate and truth");
      }
    }
  }
  if (measures && !fs::exists(*measures)) throw ValidationError("measures file not found: " + measures->string());
  if (centroids && !fs::exists(*centroids)) throw ValidationError("centroids file not found: " + centroids->string());
  if (settings.denoise.nuisance != "none" && settings.denoise.nuisance != "24p")
    throw ValidationError("nuisance must be none or 24p");
}

std::string config_digest(const Json& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json error_json(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  return Json{{"error", {{"kind", err ? err->kind() : "InternalError"}, {"message", e.what()}}}};
}

// ---------------------------------------------------------------------------
// Grid runner

namespace {

struct LoadedRun {
  const RunEntry* entry;
  ParcelTimeseries ts;
  Matrix realignment;
};

Matrix load_realignment(const fs::path& path, std::size_t drop) {
  io::CsvTable t;
  try {
    t = io::read_csv(path, false);
  } catch (const ParseError& e) {
    if (e.row() != 1) throw;
    t = io::read_csv(path, true);
  }
  if (t.values.cols() != 6) throw ShapeError("motion file " + path.string() + " must have 6 columns");
  if (!t.values.allFinite()) throw ValidationError("non-finite realignment in " + path.string());
  const auto d = static_cast<Eigen::Index>(drop);
  if (d >= t.values.rows()) throw ShapeError("dropping " + std::to_string(drop) + " volumes empties " + path.string());
  return t.values.bottomRows(t.values.rows() - d);
}

struct Participant {
  std::string id;
  std::vector<std::string> sessions;                       // first-appearance order
  std::map<std::string, std::vector<std::size_t>> runs;    // session -> indices into loaded runs
  std::vector<Partition> partitions;
};

struct Truth {
  connectome::GroundTruth gt;
  std::size_t held_out_volumes = 0;
};

struct CellOutcome {
  bool ok = false;
  bool skipped = false;
  Json json;
  Vector squared_error;
  double rmse = 0.0;
  double t_eff = 0.0;
  double retained = 0.0;
  double nominal = 0.0;
};

std::string safe_name(std::string s) {
  for (auto& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s;
}

std::string policy_name(CensorLevel l) { return std::string(to_string(l)); }

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(std::isfinite(v(i)) ? Json(v(i)) : Json(nullptr));
  return a;
}

Vector json_vector(const Json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = a[i].is_null() ? std::numeric_limits<double>::quiet_NaN() : a[i].get<double>();
  return v;
}

struct Processed {
  FcMatrix fc;
  double t_eff = std::numeric_limits<double>::quiet_NaN();
  std::size_t nominal = 0;
};

Processed process(const ParcelTimeseries& ts, const Matrix& realign, CensorLevel level, const Settings& st,
                  const std::optional<effss::AcfEstimate>& acf) {
  const auto policy = censor::CensorPolicy::preset(level);
  const auto c = censor_run(ts, realign, policy);
  const auto resid = denoise_run(ts, realign, c.mask, st.denoise);
  Processed p{connectome::fc_estimate(resid)};
  p.nominal = ts.volumes();
  if (acf) p.t_eff = effss::t_eff(*acf, c.mask.keep);
  return p;
}

}  // namespace

PipelineResult run_pipeline(Manifest manifest, const Overrides& overrides) {
  if (overrides.threads) manifest.settings.threads = *overrides.threads;
  if (overrides.seed) manifest.settings.seed = *overrides.seed;
  if (overrides.output_dir) manifest.output_dir = *overrides.output_dir;
  manifest.validate();
  const auto& st = manifest.settings;
  const Json config = manifest.to_json();
  Json digest_src = config;
  // Worker count and output location never change results.
  digest_src["settings"].erase("threads");
  digest_src.erase("output_dir");
  const std::string digest = config_digest(digest_src);
  const std::size_t threads = st.threads;

  // Load every run.
  std::vector<std::optional<LoadedRun>> loaded(manifest.runs.size());
  std::vector<std::string> load_errors(manifest.runs.size());
  parallel_for(manifest.runs.size(), threads, [&](std::size_t i) {
    const auto& e = manifest.runs[i];
    try {
      io::LoadOptions opt{st.drop_initial, e.run, e.participant};
      auto ts = io::load_timeseries(e.timeseries, e.tr_seconds, opt);
      auto rp = load_realignment(e.motion, st.drop_initial);
      if (static_cast<std::size_t>(rp.rows()) != ts.volumes())
        throw ShapeError("motion and timeseries lengths differ for " + e.timeseries.string());
      loaded[i].emplace(LoadedRun{&e, std::move(ts), std::move(rp)});
    } catch (const std::exception& ex) {
      load_errors[i] = ex.what();
    }
  });
  for (std::size_t i = 0; i < loaded.size(); ++i)
    if (!loaded[i]) throw ValidationError("cannot load run " + manifest.runs[i].timeseries.string() + ": " + load_errors[i]);
  const std::size_t parcels = loaded.front()->ts.parcels();
  for (const auto& r : loaded)
    if (r->ts.parcels() != parcels) throw ValidationError("runs differ in parcel count");
  const std::size_t edges = edge_count(parcels);

  // Participants, sessions and partitions.
  std::vector<Participant> people;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const auto& e = manifest.runs[i];
    auto [it, fresh] = index.emplace(e.participant, people.size());
    if (fresh) people.push_back({e.participant, {}, {}, {}});
    auto& p = people[it->second];
    if (!p.runs.count(e.session)) p.sessions.push_back(e.session);
    p.runs[e.session].push_back(i);
  }
  for (auto& p : people) {
    if (auto it = manifest.splits.find(p.id); it != manifest.splits.end()) {
      p.partitions = it->second;
    } else if (p.sessions.size() >= 2) {
      for (const auto& s : p.sessions) {
        Partition part{{s}, {}};
        for (const auto& o : p.sessions)
          if (o != s) part.truth_sessions.push_back(o);
        p.partitions.push_back(std::move(part));
      }
    }
  }

  // Group ACF for effective duration.
  std::optional<effss::AcfEstimate> acf;
  std::string acf_error;
  {
    std::size_t min_t = std::numeric_limits<std::size_t>::max();
    std::vector<ParcelTimeseries> all;
    for (const auto& r : loaded) {
      min_t = std::min(min_t, r->ts.volumes());
      all.push_back(r->ts);
    }
    try {
      acf = effss::estimate_acf(all, std::min(st.max_lag, min_t - 1));
    } catch (const Error& e) {
      acf_error = e.what();
      spdlog::warn("ACF unavailable: {}", e.what());
    }
  }

  // Ground truth per participant and partition.
  std::vector<std::vector<std::optional<Truth>>> truths(people.size());
  std::vector<Json> truth_errors(people.size());
  parallel_for(people.size(), threads, [&](std::size_t pi) {
    const auto& p = people[pi];
    truths[pi].resize(p.partitions.size());
    try {
      if (p.partitions.empty()) throw InsufficientDataError("participant " + p.id + " has no ground-truth split");
      for (std::size_t k = 0; k < p.partitions.size(); ++k) {
        std::vector<FcMatrix> fcs;
        double tr = 0.0;
        for (const auto& s : p.partitions[k].truth_sessions)
          for (auto ri : p.runs.at(s)) {
            const auto& r = *loaded[ri];
            tr = r.ts.tr_seconds();
            fcs.push_back(process(r.ts, r.realignment, st.truth_policy, st, std::nullopt).fc);
          }
        Truth t{connectome::ground_truth(fcs, tr, st.truth), 0};
        t.held_out_volumes = t.gt.fc.n_volumes_retained;
        if (!t.gt.sufficient)
          throw InsufficientDataError("ground truth for " + p.id + " retains " + io::format_double(t.gt.retained_minutes) +
                                      " min, below " + io::format_double(st.truth.min_truth_minutes));
        if (t.held_out_volumes < st.truth.min_heldout_volumes)
          throw InsufficientDataError("ground truth for " + p.id + " retains " + std::to_string(t.held_out_volumes) +
                                      " volumes, below " + std::to_string(st.truth.min_heldout_volumes));
        truths[pi][k] = std::move(t);
      }
    } catch (const std::exception& e) {
      truth_errors[pi] = error_json(e)["error"];
    }
  });

  // Cells.
  const std::size_t nd = manifest.durations_minutes.size(), np = manifest.policies.size();
  const std::size_t n_cells = people.size() * nd * np;
  std::vector<CellOutcome> cells(n_cells);
  const fs::path cell_dir = manifest.output_dir / "cells";
  fs::create_directories(cell_dir);
  auto cell_path = [&](std::size_t pi, std::size_t di, std::size_t li) {
    return cell_dir / (safe_name(people[pi].id) + "__" + io::format_double(manifest.durations_minutes[di]) + "min__" +
                       policy_name(manifest.policies[li]) + ".json");
  };

  parallel_for(n_cells, threads, [&](std::size_t c) {
    const std::size_t pi = c / (nd * np), di = (c / np) % nd, li = c % np;
    const auto& p = people[pi];
    const double minutes = manifest.durations_minutes[di];
    const CensorLevel level = manifest.policies[li];
    auto& out = cells[c];
    const fs::path path = cell_path(pi, di, li);
    if (!overrides.force && fs::exists(path)) {
      try {
        Json prev = Json::parse(io::read_file(path));
        if (prev.value("config_digest", "") == digest && prev.value("status", "") == "ok") {
          out.ok = true;
          out.skipped = true;
          out.squared_error = json_vector(prev.at("squared_error"));
          out.rmse = prev.at("rmse").get<double>();
          out.t_eff = prev.at("t_eff").is_null() ? std::numeric_limits<double>::quiet_NaN() : prev.at("t_eff").get<double>();
          out.retained = prev.at("retained_volumes").get<double>();
          out.nominal = prev.at("nominal_volumes").get<double>();
          out.json = std::move(prev);
          return;
        }
      } catch (const std::exception&) {
        // Unreadable previous output: recompute.
      }
    }
    Json j;
    j["schema"] = "censorfc.cell/1";
    j["participant"] = p.id;
    j["duration_minutes"] = minutes;
    j["policy"] = policy_name(level);
    try {
      if (!truth_errors[pi].is_null()) {
        const auto& te = truth_errors[pi];
        throw InsufficientDataError("ground truth unavailable: " + te.at("message").get<std::string>());
      }
      std::vector<FcMatrix> estimates, truth_fc;
      std::vector<double> weights;
      Json parts = Json::array();
      double t_eff_sum = 0.0, retained = 0.0, nominal = 0.0;
      bool t_eff_ok = acf.has_value();
      for (std::size_t k = 0; k < p.partitions.size(); ++k) {
        std::vector<FcMatrix> fcs;
        double part_t_eff = 0.0;
        std::size_t part_nominal = 0;
        for (const auto& s : p.partitions[k].estimate_sessions) {
          const auto& idx = p.runs.at(s);
          std::vector<std::pair<ParcelTimeseries, Matrix>> slices;
          if (idx.size() >= 2) {
            const auto& a = *loaded[idx[0]];
            const auto& b = *loaded[idx[1]];
            auto [sa, sb] = connectome::duration_slice(a.ts, b.ts, minutes);
            const auto n = static_cast<Eigen::Index>(sa.volumes());
            slices.emplace_back(std::move(sa), a.realignment.topRows(n));
            slices.emplace_back(std::move(sb), b.realignment.topRows(n));
          } else {
            const auto& a = *loaded[idx[0]];
            const auto n = 2 * connectome::slice_volumes(minutes, a.ts.tr_seconds());
            slices.emplace_back(a.ts.head(n), a.realignment.topRows(static_cast<Eigen::Index>(n)));
          }
          for (const auto& [ts, rp] : slices) {
            auto pr = process(ts, rp, level, st, acf);
            part_t_eff += pr.t_eff;
            part_nominal += pr.nominal;
            fcs.push_back(std::move(pr.fc));
          }
        }
        estimates.push_back(connectome::fc_average(fcs));
        const auto& truth = *truths[pi][k];
        truth_fc.push_back(truth.gt.fc);
        weights.push_back(static_cast<double>(truth.held_out_volumes));
        t_eff_sum += part_t_eff;
        retained += static_cast<double>(estimates.back().n_volumes_retained);
        nominal += static_cast<double>(part_nominal);
        parts.push_back({{"estimate_sessions", p.partitions[k].estimate_sessions},
                         {"truth_sessions", p.partitions[k].truth_sessions},
                         {"nominal_volumes", part_nominal},
                         {"retained_volumes", estimates.back().n_volumes_retained},
                         {"t_eff", t_eff_ok ? Json(part_t_eff) : Json(nullptr)},
                         {"truth_minutes", truth.gt.retained_minutes},
                         {"weight", weights.back()}});
      }
      const double kp = static_cast<double>(p.partitions.size());
      out.squared_error = connectome::squared_error(estimates, truth_fc, weights);
      out.rmse = std::sqrt(out.squared_error.mean());
      out.t_eff = t_eff_ok ? t_eff_sum / kp : std::numeric_limits<double>::quiet_NaN();
      out.retained = retained / kp;
      out.nominal = nominal / kp;
      out.ok = true;
      j["status"] = "ok";
      j["rmse"] = out.rmse;
      j["mse"] = out.rmse * out.rmse;
      j["t_eff"] = t_eff_ok ? Json(out.t_eff) : Json(nullptr);
      j["retained_volumes"] = out.retained;
      j["nominal_volumes"] = out.nominal;
      j["partitions"] = parts;
      j["squared_error"] = vector_json(out.squared_error);
    } catch (const std::exception& e) {
      j["status"] = "failed";
      j["error"] = error_json(e)["error"];
    }
    j["config_digest"] = digest;
    j["config"] = config;
    io::write_file_atomic(path, j.dump(1) + "\n");
    out.json = std::move(j);
  });

  PipelineResult result;
  result.cells_total = n_cells;
  Json failures = Json::array();
  for (const auto& c : cells) {
    if (c.skipped) ++result.cells_skipped;
    else ++result.cells_run;
    if (!c.ok) {
      ++result.cells_failed;
      failures.push_back({{"participant", c.json["participant"]},
                          {"duration_minutes", c.json["duration_minutes"]},
                          {"policy", c.json["policy"]},
                          {"error", c.json["error"]}});
    }
  }

  // Reports per (duration, policy).
  auto cell_at = [&](std::size_t pi, std::size_t di, std::size_t li) -> const CellOutcome& {
    return cells[(pi * nd + di) * np + li];
  };
  Json reports = Json::array();
  Json ess = Json::array();
  std::vector<Vector> edge_columns;
  std::vector<std::string> edge_headers{"i", "j"};
  std::map<std::pair<std::size_t, std::size_t>, double> overall;
  for (std::size_t di = 0; di < nd; ++di) {
    for (std::size_t li = 0; li < np; ++li) {
      std::vector<Vector> se;
      std::vector<double> t_effs, retained, nominal;
      for (std::size_t pi = 0; pi < people.size(); ++pi) {
        const auto& c = cell_at(pi, di, li);
        if (!c.ok) continue;
        se.push_back(c.squared_error);
        if (std::isfinite(c.t_eff)) t_effs.push_back(c.t_eff);
        retained.push_back(c.retained);
        nominal.push_back(c.nominal);
      }
      Json r{{"duration_minutes", manifest.durations_minutes[di]},
             {"policy", policy_name(manifest.policies[li])},
             {"participants", se.size()}};
      if (!se.empty()) {
        const auto rep = connectome::summarize_errors(se);
        overall[{di, li}] = rep.overall_rmse;
        r["overall_rmse"] = rep.overall_rmse;
        r["mean_participant_rmse"] = rep.participant_rmse.mean();
        edge_columns.push_back(rep.edge_rmse);
        edge_headers.push_back(policy_name(manifest.policies[li]) + "@" +
                               io::format_double(manifest.durations_minutes[di]));
        ess.push_back({{"duration_minutes", manifest.durations_minutes[di]},
                       {"policy", policy_name(manifest.policies[li])},
                       {"mean_nominal_volumes", stats::mean(nominal)},
                       {"mean_retained_volumes", stats::mean(retained)},
                       {"mean_t_eff", t_effs.empty() ? Json(nullptr) : Json(stats::mean(t_effs))}});
      } else {
        r["overall_rmse"] = nullptr;
      }
      reports.push_back(r);
    }
  }
  // Percent change against "none" at the same duration.
  const auto none_it = std::find(manifest.policies.begin(), manifest.policies.end(), CensorLevel::None);
  const bool has_none = none_it != manifest.policies.end();
  const std::size_t none_li = has_none ? static_cast<std::size_t>(none_it - manifest.policies.begin()) : 0;
  for (auto& r : reports) {
    const auto di = static_cast<std::size_t>(
        std::find(manifest.durations_minutes.begin(), manifest.durations_minutes.end(), r["duration_minutes"].get<double>()) -
        manifest.durations_minutes.begin());
    const auto li = static_cast<std::size_t>(
        std::find(manifest.policies.begin(), manifest.policies.end(), parse_censor_level(r["policy"].get<std::string>())) -
        manifest.policies.begin());
    if (has_none && overall.count({di, li}) && overall.count({di, none_li}) && overall.at({di, none_li}) > 0.0)
      r["percent_change_vs_none"] = 100.0 * (overall.at({di, li}) - overall.at({di, none_li})) / overall.at({di, none_li});
    else
      r["percent_change_vs_none"] = nullptr;
  }

  // Paired tests against "none".
  Json tests = Json::array();
  if (has_none) {
    std::size_t attempted = 0;
    for (std::size_t di = 0; di < nd; ++di)
      for (std::size_t li = 0; li < np; ++li) {
        if (li == none_li) continue;
        Json t{{"duration_minutes", manifest.durations_minutes[di]},
               {"policy", policy_name(manifest.policies[li])},
               {"reference", "none"}};
        std::vector<double> a, b;
        for (std::size_t pi = 0; pi < people.size(); ++pi) {
          const auto& x = cell_at(pi, di, li);
          const auto& y = cell_at(pi, di, none_li);
          if (x.ok && y.ok) {
            a.push_back(x.rmse);
            b.push_back(y.rmse);
          }
        }
        t["n_pairs"] = a.size();
        try {
          const auto w = connectome::paired_wilcoxon(a, b);
          ++attempted;
          t["statistic"] = w.statistic;
          t["p_value"] = w.p_value;
          t["n_effective"] = w.n_effective;
          t["exact"] = w.exact;
        } catch (const Error& e) {
          t["skipped"] = std::string(e.kind()) + ": " + e.what();
        }
        tests.push_back(t);
      }
    for (auto& t : tests)
      if (t.contains("p_value")) t["p_bonferroni"] = connectome::bonferroni(t["p_value"].get<double>(), attempted);
  }

  // Required duration per policy.
  Json required = Json::array();
  if (st.target_rmse) {
    for (std::size_t li = 0; li < np; ++li) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t di = 0; di < nd; ++di)
        if (overall.count({di, li})) pts.emplace_back(manifest.durations_minutes[di], overall.at({di, li}));
      std::sort(pts.begin(), pts.end());
      Json r{{"policy", policy_name(manifest.policies[li])}, {"target_rmse", *st.target_rmse}};
      if (pts.empty()) {
        r["minutes"] = nullptr;
      } else {
        std::vector<connectome::CurvePoint> curve;
        for (auto [d, v] : pts) curve.push_back({d, v});
        r["minutes"] = connectome::required_duration(curve, *st.target_rmse);
      }
      required.push_back(r);
    }
  }

  // Session-level FC for QC-FC and BWAS.
  Json qcfc_out = Json::array();
  Json bwas_out = Json::array();
  if (st.qcfc && people.size() >= 3) {
    std::optional<qcfc::ParcelGeometry> geometry;
    if (manifest.centroids) geometry.emplace(io::read_csv_matrix(*manifest.centroids));
    std::optional<CohortTable> measures;
    if (manifest.measures) measures = io::read_cohort(*manifest.measures);
    struct Obs {
      std::size_t participant;
      std::string session;
    };
    std::vector<Obs> obs;
    for (std::size_t pi = 0; pi < people.size(); ++pi)
      for (const auto& s : people[pi].sessions) obs.push_back({pi, s});
    for (std::size_t li = 0; li < np; ++li) {
      const CensorLevel level = manifest.policies[li];
      Json q{{"policy", policy_name(level)}};
      std::vector<std::optional<std::pair<double, Vector>>> rows(obs.size());
      parallel_for(obs.size(), threads, [&](std::size_t o) {
        try {
          std::vector<FcMatrix> fcs;
          double fd_sum = 0.0;
          const auto& idx = people[obs[o].participant].runs.at(obs[o].session);
          for (auto ri : idx) {
            const auto& r = *loaded[ri];
            fcs.push_back(process(r.ts, r.realignment, level, st, std::nullopt).fc);
            const Vector fd = censor::compute_fd(r.realignment);
            fd_sum += fd.tail(fd.size() - 1).mean();
          }
          rows[o].emplace(fd_sum / static_cast<double>(idx.size()), connectome::fc_average(fcs).z);
        } catch (const std::exception&) {
        }
      });
      std::vector<std::size_t> part;
      std::vector<double> fd;
      std::vector<std::size_t> kept_obs;
      std::map<std::size_t, std::size_t> remap;
      for (std::size_t o = 0; o < obs.size(); ++o) {
        if (!rows[o]) continue;
        auto [it, fresh] = remap.emplace(obs[o].participant, remap.size());
        part.push_back(it->second);
        fd.push_back(rows[o]->first);
        kept_obs.push_back(o);
      }
      q["observations"] = kept_obs.size();
      q["observations_failed"] = obs.size() - kept_obs.size();
      Matrix fc(static_cast<Eigen::Index>(kept_obs.size()), static_cast<Eigen::Index>(edges));
      for (std::size_t k = 0; k < kept_obs.size(); ++k) fc.row(static_cast<Eigen::Index>(k)) = rows[kept_obs[k]]->second.transpose();
      try {
        const qcfc::RmDesign design(part, Eigen::Map<const Vector>(fd.data(), static_cast<Eigen::Index>(fd.size())));
        auto res = qcfc::rm_qcfc(design, fc);
        auto summarize = [&](const std::vector<std::optional<double>>& v) -> Json {
          if (v.empty() || !v.front()) return nullptr;
          Vector x(static_cast<Eigen::Index>(v.size()));
          for (std::size_t e = 0; e < v.size(); ++e) x(static_cast<Eigen::Index>(e)) = *v[e];
          Json s{{"mean", x.mean()}, {"mean_abs", x.cwiseAbs().mean()}};
          if (geometry) s["distance_r"] = qcfc::distance_dependence(x, *geometry);
          return s;
        };
        Json standard{{"mean", res.standard.mean()}, {"mean_abs", res.standard.cwiseAbs().mean()}};
        if (geometry && res.standard.allFinite()) standard["distance_r"] = qcfc::distance_dependence(res.standard, *geometry);
        q["standard"] = standard;
        q["between"] = summarize(res.between);
        q["within"] = summarize(res.within);
        Matrix table(static_cast<Eigen::Index>(edges), 5);
        for (std::size_t e = 0; e < edges; ++e) {
          const auto [i, jj] = edge_pair(e, parcels);
          const auto ei = static_cast<Eigen::Index>(e);
          table(ei, 0) = static_cast<double>(i);
          table(ei, 1) = static_cast<double>(jj);
          table(ei, 2) = res.standard(ei);
          table(ei, 3) = res.between[e].value_or(std::numeric_limits<double>::quiet_NaN());
          table(ei, 4) = res.within[e].value_or(std::numeric_limits<double>::quiet_NaN());
        }
        io::write_csv_matrix(manifest.output_dir / ("qcfc_" + policy_name(level) + ".csv"), table,
                             {"i", "j", "standard", "between", "within"});
      } catch (const Error& e) {
        q["error"] = error_json(e)["error"];
      }
      qcfc_out.push_back(q);

      if (measures) {
        Json b{{"policy", policy_name(level)}};
        try {
          std::map<std::size_t, std::pair<Vector, double>> per;  // participant -> (sum fc, count)
          for (std::size_t k = 0; k < kept_obs.size(); ++k) {
            auto& slot = per[obs[kept_obs[k]].participant];
            if (slot.first.size() == 0) slot.first = Vector::Zero(static_cast<Eigen::Index>(edges));
            slot.first += rows[kept_obs[k]]->second;
            slot.second += 1.0;
          }
          std::map<std::string, double> behavior;
          for (auto& [pid, v] : measures->participant_means("behavior")) behavior[pid] = v;
          std::vector<std::size_t> use;
          for (const auto& [pi, slot] : per)
            if (behavior.count(people[pi].id)) use.push_back(pi);
          Matrix x(static_cast<Eigen::Index>(use.size()), static_cast<Eigen::Index>(edges));
          Vector y(static_cast<Eigen::Index>(use.size()));
          for (std::size_t k = 0; k < use.size(); ++k) {
            const auto& slot = per.at(use[k]);
            x.row(static_cast<Eigen::Index>(k)) = (slot.first / slot.second).transpose();
            y(static_cast<Eigen::Index>(k)) = behavior.at(people[use[k]].id);
          }
          const Vector rho = bwas::bwas_correlations(x, y);
          b["participants"] = use.size();
          b["mean_abs_rho"] = rho.cwiseAbs().mean();
          b["max_abs_rho"] = rho.cwiseAbs().maxCoeff();
          // Behavior reliability from the first two sessions of each participant.
          std::vector<double> v1, v2;
          for (const auto& pid : measures->participants()) {
            const auto ses = measures->sessions(pid);
            std::vector<double> vals;
            for (const auto& s : ses)
              if (auto v = measures->value(pid, s, "behavior")) vals.push_back(*v);
            if (vals.size() >= 2) {
              v1.push_back(vals[0]);
              v2.push_back(vals[1]);
            }
          }
          if (v1.size() >= 3) {
            const auto icc = bwas::icc_from_test_retest(v1, v2);
            b["behavior_icc"] = icc.icc;
            b["behavior_icc_clipped"] = icc.clipped;
          } else {
            b["behavior_icc"] = nullptr;
          }
          Matrix table(static_cast<Eigen::Index>(edges), 3);
          for (std::size_t e = 0; e < edges; ++e) {
            const auto [i, jj] = edge_pair(e, parcels);
            table(static_cast<Eigen::Index>(e), 0) = static_cast<double>(i);
            table(static_cast<Eigen::Index>(e), 1) = static_cast<double>(jj);
            table(static_cast<Eigen::Index>(e), 2) = rho(static_cast<Eigen::Index>(e));
          }
          io::write_csv_matrix(manifest.output_dir / ("bwas_" + policy_name(level) + ".csv"), table, {"i", "j", "rho"});
        } catch (const Error& e) {
          b["error"] = error_json(e)["error"];
        }
        bwas_out.push_back(b);
      }
    }
  }

  if (!edge_columns.empty()) {
    Matrix table(static_cast<Eigen::Index>(edges), static_cast<Eigen::Index>(2 + edge_columns.size()));
    for (std::size_t e = 0; e < edges; ++e) {
      const auto [i, jj] = edge_pair(e, parcels);
      table(static_cast<Eigen::Index>(e), 0) = static_cast<double>(i);
      table(static_cast<Eigen::Index>(e), 1) = static_cast<double>(jj);
    }
    for (std::size_t k = 0; k < edge_columns.size(); ++k) table.col(static_cast<Eigen::Index>(2 + k)) = edge_columns[k];
    io::write_csv_matrix(manifest.output_dir / "edge_rmse.csv", table, edge_headers);
  }

  Json summary;
  summary["schema"] = "censorfc.summary/1";
  summary["config_digest"] = digest;
  summary["config"] = config;
  summary["parcels"] = parcels;
  summary["participants"] = people.size();
  summary["cells"] = {{"total", result.cells_total},
                      {"run", result.cells_run},
                      {"skipped", result.cells_skipped},
                      {"failed", result.cells_failed}};
  summary["failures"] = failures;
  summary["acf"] = acf ? Json{{"max_lag", acf->max_lag}, {"lag1", acf->at(1)}} : Json{{"error", acf_error}};
  summary["reports"] = reports;
  summary["ess"] = ess;
  summary["wilcoxon"] = tests;
  summary["required_duration"] = required;
  summary["qcfc"] = qcfc_out;
  summary["bwas"] = bwas_out;
  result.summary_path = manifest.output_dir / "summary.json";
  io::write_file_atomic(result.summary_path, summary.dump(1) + "\n");
  result.summary = std::move(summary);
  return result;
}

// ---------------------------------------------------------------------------
// Simulation I/O

sim::SimConfig sim_config_from_json(const Json& j) {
  sim::SimConfig c;
  try {
    if (!j.is_object()) throw ConfigError("simulation config must be a JSON object");
    c.n_participants = j.value("n_participants", c.n_participants);
    c.sessions_per_participant = j.value("sessions_per_participant", c.sessions_per_participant);
    c.runs_per_session = j.value("runs_per_session", c.runs_per_session);
    c.T_volumes = j.value("T_volumes", c.T_volumes);
    c.tr_seconds = j.value("tr_seconds", c.tr_seconds);
    c.parcel_count = j.value("parcel_count", c.parcel_count);
    c.fc_rank = j.value("fc_rank", c.fc_rank);
    c.ar1_phi = j.value("ar1_phi", c.ar1_phi);
    c.true_fc_signal_var = j.value("true_fc_signal_var", c.true_fc_signal_var);
    c.trait_fc_coupling = j.value("trait_fc_coupling", c.trait_fc_coupling);
    c.state_fc_coupling = j.value("state_fc_coupling", c.state_fc_coupling);
    c.behavior_rho = j.value("behavior_rho", c.behavior_rho);
    c.behavior_icc = j.value("behavior_icc", c.behavior_icc);
    c.seed = j.value("seed", c.seed);
    if (j.contains("behavior_edges")) c.behavior_edges = j.at("behavior_edges").get<std::vector<std::size_t>>();
    const Json m = j.value("motion", Json::object());
    c.motion.baseline_fd_mm = m.value("baseline_fd_mm", c.motion.baseline_fd_mm);
    c.motion.trait_sd = m.value("trait_sd", c.motion.trait_sd);
    c.motion.state_sd = m.value("state_sd", c.motion.state_sd);
    c.motion.volume_jitter_sd = m.value("volume_jitter_sd", c.motion.volume_jitter_sd);
    c.motion.spike_rate = m.value("spike_rate", c.motion.spike_rate);
    c.motion.spike_fd_magnitude = m.value("spike_fd_magnitude", c.motion.spike_fd_magnitude);
    c.motion.burst_mean_length = m.value("burst_mean_length", c.motion.burst_mean_length);
    const Json a = j.value("artifact", Json::object());
    c.artifact.amplitude = a.value("amplitude", c.artifact.amplitude);
    c.artifact.distance_decay_mm = a.value("distance_decay_mm", c.artifact.distance_decay_mm);
    if (a.contains("distance_decay_rate")) {
      const double rate = a.at("distance_decay_rate").get<double>();
      if (!(rate > 0.0)) throw ConfigError("artifact.distance_decay_rate must be > 0");
      c.artifact.distance_decay_mm = 1.0 / rate;
    }
    if (j.contains("group_fc") && !j.at("group_fc").is_null()) {
      const auto rows = j.at("group_fc").get<std::vector<std::vector<double>>>();
      Matrix g(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != static_cast<std::size_t>(g.cols())) throw ConfigError("group_fc rows differ in length");
        for (std::size_t k = 0; k < rows[r].size(); ++k) g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
      }
      c.group_fc = std::move(g);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed simulation config: ") + e.what());
  }
  c.validate();
  return c;
}

Json sim_config_to_json(const sim::SimConfig& c) {
  Json j{{"n_participants", c.n_participants},
         {"sessions_per_participant", c.sessions_per_participant},
         {"runs_per_session", c.runs_per_session},
         {"T_volumes", c.T_volumes},
         {"tr_seconds", c.tr_seconds},
         {"parcel_count", c.parcel_count},
         {"fc_rank", c.fc_rank},
         {"ar1_phi", c.ar1_phi},
         {"true_fc_signal_var", c.true_fc_signal_var},
         {"motion",
          {{"baseline_fd_mm", c.motion.baseline_fd_mm},
           {"trait_sd", c.motion.trait_sd},
           {"state_sd", c.motion.state_sd},
           {"volume_jitter_sd", c.motion.volume_jitter_sd},
           {"spike_rate", c.motion.spike_rate},
           {"spike_fd_magnitude", c.motion.spike_fd_magnitude},
           {"burst_mean_length", c.motion.burst_mean_length}}},
         {"artifact", {{"amplitude", c.artifact.amplitude}, {"distance_decay_mm", c.artifact.distance_decay_mm}}},
         {"trait_fc_coupling", c.trait_fc_coupling},
         {"state_fc_coupling", c.state_fc_coupling},
         {"behavior_rho", c.behavior_rho},
         {"behavior_edges", c.behavior_edges},
         {"behavior_icc", c.behavior_icc},
         {"seed", c.seed}};
  if (c.group_fc) {
    Json g = Json::array();
    for (Eigen::Index r = 0; r < c.group_fc->rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < c.group_fc->cols(); ++k) row.push_back((*c.group_fc)(r, k));
      g.push_back(row);
    }
    j["group_fc"] = g;
  } else {
    j["group_fc"] = nullptr;
  }
  return j;
}

Json write_cohort(const sim::SyntheticCohort& cohort, const fs::path& dir, io::Format format) {
  const auto& cfg = cohort.config;
  fs::create_directories(dir / "runs");
  Json runs = Json::array();
  const char* ext = format == io::Format::Binary ? ".bin" : ".csv";
  for (const auto& r : cohort.runs) {
    const std::string stem = r.participant_id + "_" + r.run_id;
    const fs::path ts_rel = fs::path("runs") / (stem + "_timeseries" + ext);
    const fs::path mo_rel = fs::path("runs") / (stem + "_motion.csv");
    io::save_timeseries(dir / ts_rel, r.timeseries, format);
    io::write_sidecar(io::sidecar_path(dir / ts_rel), {r.participant_id, r.run_id, r.timeseries.tr_seconds()});
    io::write_csv_matrix(dir / mo_rel, r.motion.realignment, {"trans_x", "trans_y", "trans_z", "rot_x", "rot_y", "rot_z"});
    runs.push_back({{"participant", r.participant_id},
                    {"session", r.session_id},
                    {"run", r.run_id},
                    {"timeseries", ts_rel.generic_string()},
                    {"motion", mo_rel.generic_string()},
                    {"tr_seconds", r.timeseries.tr_seconds()}});
  }
  io::write_cohort(dir / "measures.csv", cohort.measures);
  io::write_csv_matrix(dir / "centroids.csv", cohort.truth.centroids, {"x", "y", "z"});

  const auto& t = cohort.truth;
  Json gt;
  gt["schema"] = "censorfc.ground_truth/1";
  gt["config"] = sim_config_to_json(cfg);
  gt["acf"] = vector_json(t.acf);
  gt["group_z"] = vector_json([&] {
    Vector z(static_cast<Eigen::Index>(edge_count(cfg.parcel_count)));
    for (std::size_t e = 0; e < edge_count(cfg.parcel_count); ++e) {
      const auto [i, j] = edge_pair(e, cfg.parcel_count);
      z(static_cast<Eigen::Index>(e)) =
          std::atanh(t.group_correlation(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    return z;
  }());
  gt["sessions"] = Json::array();
  for (const auto& s : t.sessions)
    gt["sessions"].push_back({{"participant", cohort.participant_id(s.participant)},
                              {"session", cohort.session_id(s.session)},
                              {"trait", s.trait},
                              {"state", s.state},
                              {"target_fd_mm", s.target_fd_mm},
                              {"z", vector_json(s.z)}});
  gt["runs"] = Json::array();
  for (const auto& r : cohort.runs)
    gt["runs"].push_back({{"participant", r.participant_id}, {"run", r.run_id}, {"spike_volumes", r.spike_volumes}});
  gt["behavior_true"] = t.behavior_true;
  gt["behavior_rho"] = vector_json(t.behavior_rho);
  gt["behavior_edges"] = t.behavior_edges;
  gt["behavior_icc"] = t.behavior_icc;
  gt["fc_icc"] = vector_json(t.fc_icc);
  gt["trait_fc_coupling"] = t.trait_fc_coupling;
  gt["state_fc_coupling"] = t.state_fc_coupling;
  io::write_file_atomic(dir / "ground_truth.json", gt.dump(1) + "\n");

  // Default grid: half and full session length; truth thresholds scaled to what one session provides.
  const double session_minutes =
      static_cast<double>(cfg.runs_per_session * cfg.T_volumes) * cfg.tr_seconds / 60.0;
  const double half = std::floor(session_minutes / 2.0 * 10.0) / 10.0;
  const double full = std::floor(session_minutes * 10.0) / 10.0;
  Json durations = Json::array();
  if (half > 0.0 && half < full) durations.push_back(half);
  if (full > 0.0) durations.push_back(full);
  Json manifest;
  manifest["runs"] = runs;
  manifest["grid"] = {{"durations_minutes", durations}, {"policies", {"none", "lenient", "stringent", "expanded"}}};
  manifest["splits"] = Json::object();
  const double truth_minutes = session_minutes * static_cast<double>(cfg.sessions_per_participant - 1);
  manifest["settings"] = {{"drop_initial", 0},
                          {"highpass_hz", 0.01},
                          {"nuisance", "none"},
                          {"truth_policy", "none"},
                          {"min_truth_minutes", std::min(50.0, std::floor(truth_minutes * 0.5 * 10.0) / 10.0)},
                          {"min_heldout_volumes", std::min<std::size_t>(150, cfg.T_volumes / 2)},
                          {"max_lag", 100},
                          {"target_rmse", nullptr},
                          {"qcfc", true},
                          {"threads", 0},
                          {"seed", cfg.seed}};
  manifest["output_dir"] = "pipeline_out";
  manifest["measures"] = "measures.csv";
  manifest["centroids"] = "centroids.csv";
  io::write_file_atomic(dir / "manifest.json", manifest.dump(1) + "\n");
  return manifest;
}

}  // namespace censorfc::pipeline
