// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/bwas.hpp"
#include "censorfc/censor.hpp"
#include "censorfc/connectome.hpp"
#include "censorfc/core.hpp"
#include "censorfc/effss.hpp"
#include "censorfc/errors.hpp"
#include "censorfc/io.hpp"
#include "censorfc/pipeline.hpp"
#include "censorfc/qcfc.hpp"
#include "censorfc/schemas.hpp"
#include "censorfc/simcohort.hpp"
#include "censorfc/stats.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using censorfc::pipeline::Json;
using namespace censorfc;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string format = "csv";
  std::string out = ".";
  std::string log_level = "warn";
};

// Exit codes: 0 success, 1 runtime failure, 2 invalid input or configuration.
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

io::Format format_of(const Globals& g) { return io::parse_format(g.format); }

const char* ext_of(const Globals& g) { return format_of(g) == io::Format::Binary ? ".bin" : ".csv"; }

void emit(const Globals& g, const std::string& name, const Json& report) {
  const fs::path dir(g.out);
  fs::create_directories(dir);
  io::write_file_atomic(dir / (name + ".json"), report.dump(1) + "\n");
  std::cout << report.dump(1) << "\n";
}

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(std::isfinite(v(i)) ? Json(v(i)) : Json(nullptr));
  return a;
}

Json stats_json(const CensorStats& s) {
  return Json{{"flagged", s.flagged},
              {"flagged_fd", s.flagged_fd},
              {"flagged_dvars", s.flagged_dvars},
              {"expansion_added", s.expansion_added},
              {"segment_removed", s.segment_removed}};
}

Json policy_json(const censor::CensorPolicy& p) {
  return Json{{"level", std::string(to_string(p.level))},
              {"fd_threshold_mm", p.fd_threshold_mm},
              {"use_dvars", p.use_dvars},
              {"fd_lag", p.fd_lag},
              {"fd_filter_hz", p.fd_filter_hz ? Json(*p.fd_filter_hz) : Json(nullptr)},
              {"expand_before", p.expand_before},
              {"expand_after", p.expand_after},
              {"min_segment", p.min_segment}};
}

Matrix read_realignment(const std::string& path, std::size_t drop) {
  io::CsvTable t;
  try {
    t = io::read_csv(path, false);
  } catch (const ParseError& e) {
    if (e.row() != 1) throw;
    t = io::read_csv(path, true);
  }
  if (t.values.cols() != 6) throw ShapeError("motion file " + path + " must have 6 columns");
  const auto d = static_cast<Eigen::Index>(drop);
  if (d >= t.values.rows()) throw ShapeError("dropping " + std::to_string(drop) + " volumes empties " + path);
  return t.values.bottomRows(t.values.rows() - d);
}

/// Column vector from a one-column CSV, with or without a header.
Vector read_column(const std::string& path, std::size_t col = 0) {
  io::CsvTable t;
  try {
    t = io::read_csv(path, false);
  } catch (const ParseError& e) {
    if (e.row() != 1) throw;
    t = io::read_csv(path, true);
  }
  if (static_cast<Eigen::Index>(col) >= t.values.cols())
    throw ShapeError(path + " has no column " + std::to_string(col));
  return t.values.col(static_cast<Eigen::Index>(col));
}

io::CsvTable read_any_csv(const std::string& path) {
  try {
    return io::read_csv(path, false);
  } catch (const ParseError& e) {
    if (e.row() != 1) throw;
    return io::read_csv(path, true);
  }
}

/// Gives every option an environment fallback CENSORFC_[SUB_]NAME unless it already has one.
void attach_env(CLI::App& app, const std::string& prefix) {
  for (auto* opt : app.get_options()) {
    if (!opt->get_envname().empty() || opt->get_lnames().empty()) continue;
    const auto& long_name = opt->get_lnames().front();
    if (long_name == "help") continue;
    std::string env = prefix + long_name;
    for (auto& c : env) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    opt->envname(env);
  }
  for (auto* sub : app.get_subcommands({})) {
    std::string p = prefix + sub->get_name() + "_";
    attach_env(*sub, p);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motion censoring evaluation for parcel-level fMRI functional connectivity"};
  app.require_subcommand(1);
  app.fallthrough();  // global options are accepted after the subcommand
  app.set_version_flag("--version", "censorfc 1.0.0");
  Globals g;
  std::uint64_t seed_value = 0;
  std::size_t threads_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Random seed (simulate, pipeline provenance)");
  auto* threads_opt = app.add_option("--threads", threads_value, "Worker threads (0 = all cores)");
  app.add_option("--format", g.format, "Matrix output format")->check(CLI::IsMember({"csv", "bin"}));
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--log-level", g.log_level, "Log level")->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  // censor
  auto* c_censor = app.add_subcommand("censor", "Build a censoring mask from realignment parameters");
  std::string ts_path, motion_path, level = "stringent", mask_path;
  double tr = 0.0;
  std::size_t drop = io::LoadOptions{}.drop_initial;
  std::size_t drop_residual = 0;
  std::optional<double> fd_threshold, fd_filter;
  std::optional<std::size_t> min_segment;
  std::size_t fd_lag = 1;
  bool expand = false;
  std::optional<bool> use_dvars;
  c_censor->add_option("--timeseries", ts_path, "Parcel timeseries (needed for DVARS)")->required();
  c_censor->add_option("--motion", motion_path, "T x 6 realignment CSV")->required();
  c_censor->add_option("--level", level, "none | lenient | stringent | expanded");
  c_censor->add_flag("--expand", expand, "Use the expanded level (neighbourhood and segment rules)");
  c_censor->add_option("--fd-thresh,--fd-threshold", fd_threshold, "Override the level's FD threshold (mm)");
  c_censor->add_option("--min-segment", min_segment, "Shortest kept segment under expansion");
  c_censor->add_flag("--dvars,!--no-dvars", use_dvars, "Force DVARS flags on or off");
  c_censor->add_option("--lag,--fd-lag", fd_lag, "Volume lag for FD differences");
  c_censor->add_option("--filter-hz,--fd-filter-hz", fd_filter, "Low-pass realignment before FD");
  c_censor->add_option("--tr", tr, "Repetition time in seconds (0 = from file)");
  c_censor->add_option("--drop-initial", drop, "Initial volumes to discard");

  // denoise
  auto* c_denoise = app.add_subcommand("denoise", "Simultaneous nuisance, high-pass and spike regression");
  double highpass = 0.01;
  std::string nuisance = "none";
  c_denoise->add_option("--timeseries", ts_path, "Parcel timeseries")->required();
  c_denoise->add_option("--motion", motion_path, "T x 6 realignment CSV (for --level masks and 24p)");
  c_denoise->add_option("--mask", mask_path, "Mask file (one 0/1 per line); otherwise built from --level");
  c_denoise->add_option("--level", level, "Censoring level when no mask is given");
  c_denoise->add_option("--tr", tr, "Repetition time in seconds (0 = from file)");
  c_denoise->add_option("--drop-initial", drop, "Initial volumes to discard");
  c_denoise->add_option("--hp-hz,--highpass", highpass, "DCT high-pass cutoff in Hz (<= 0 disables)");
  c_denoise->add_option("--nuisance", nuisance, "none, 24p, or a T x M CSV of nuisance columns");

  // fc
  auto* c_fc = app.add_subcommand("fc", "Fisher-z functional connectivity of a residual timeseries");
  c_fc->add_option("--timeseries", ts_path, "Residual timeseries")->required();
  c_fc->add_option("--mask", mask_path, "Keep only these volumes before estimating FC");
  c_fc->add_option("--tr", tr, "Repetition time in seconds (0 = from file)");
  c_fc->add_option("--drop-initial", drop_residual, "Initial volumes to discard");

  // fc-error
  auto* c_err = app.add_subcommand("fc-error", "FC error against ground truth");
  std::string truth_manifest, est_path, truth_path;
  c_err->add_option("--truth-manifest", truth_manifest, "JSON listing estimate/truth FC pairs per participant");
  c_err->add_option("--estimate", est_path, "Single estimate FC file");
  c_err->add_option("--truth", truth_path, "Single truth FC file");

  // ess
  auto* c_ess = app.add_subcommand("ess", "Autocorrelation and effective scan duration");
  std::vector<std::string> ts_list, mask_list;
  std::string acf_path;
  std::size_t max_lag = effss::kDefaultMaxLag;
  c_ess->add_option("--acf", acf_path, "ACF values, lag 0 first (one per line or one column)");
  c_ess->add_option("--timeseries", ts_list, "Timeseries to estimate the ACF from (repeatable)");
  c_ess->add_option("--mask", mask_list, "Masks to evaluate (repeatable)");
  c_ess->add_option("--max-lag", max_lag, "ACF lags kept");
  c_ess->add_option("--tr", tr, "Repetition time in seconds (0 = from file)");
  c_ess->add_option("--drop-initial", drop_residual, "Initial volumes to discard");

  // qcfc
  auto* c_qcfc = app.add_subcommand("qcfc", "Standard, repeated-measures and validation QC-FC");
  std::string cohort_path, fd_measure = "mean_fd", centroids_path, qc_mode = "rm";
  c_qcfc->add_option("--cohort", cohort_path, "Long-format cohort table")->required();
  c_qcfc->add_option("--fd-measure", fd_measure, "Motion measure name");
  c_qcfc->add_option("--geometry,--centroids", centroids_path, "P x 3 parcel centroids for distance dependence");
  c_qcfc->add_option("--mode", qc_mode, "standard | rm | validation")
      ->check(CLI::IsMember({"standard", "rm", "validation"}));

  // bwas
  auto* c_bwas = app.add_subcommand("bwas", "Reliability, attenuation and sample-size tools");
  c_bwas->require_subcommand(1);
  auto* b_icc = c_bwas->add_subcommand("icc", "ICC from two visits");
  std::string retest_path;
  double t_ref = 0.0;
  std::vector<double> t_new;
  b_icc->add_option("--retest", retest_path, "CSV with two columns: visit 1, visit 2")->required();
  b_icc->add_option("--t-ref", t_ref, "Scan minutes behind each visit");
  b_icc->add_option("--t-new", t_new, "Durations to extrapolate to (requires --t-ref)");
  auto* b_plan = c_bwas->add_subcommand("plan", "Variance and sample size for a BWAS effect");
  double rho = 0.0, icc_x = 1.0, icc_y = 1.0;
  std::optional<double> target_var;
  std::optional<std::size_t> plan_n;
  b_plan->add_option("--rho", rho, "True correlation")->required();
  b_plan->add_option("--icc-x", icc_x, "Reliability of the brain measure")->required();
  b_plan->add_option("--icc-y", icc_y, "Reliability of the behavior measure")->required();
  b_plan->add_option("--target-var", target_var, "Target sampling variance");
  b_plan->add_option("--n", plan_n, "Sample size to evaluate");
  auto* b_att = c_bwas->add_subcommand("attenuation", "Empirical attenuation against corrected truth");
  std::string icc_path;
  double icc_floor = bwas::kDefaultIccFloor, epsilon = bwas::kDefaultTruthEpsilon;
  std::optional<double> att_icc_y;
  b_att->add_option("--truth", truth_path, "Per-edge truth correlations (first column)")->required();
  b_att->add_option("--est", est_path, "Per-edge estimates; one column per visit replicate")->required();
  b_att->add_option("--icc-x", icc_path, "Per-edge ICC of the truth FC (enables bias correction)");
  b_att->add_option("--icc-y", att_icc_y, "Behavior ICC for bias correction");
  b_att->add_option("--icc-floor", icc_floor, "Exclude edges below this ICC");
  b_att->add_option("--epsilon", epsilon, "Exclude edges with |truth| below this");

  // required-duration
  auto* c_req = app.add_subcommand("required-duration", "Scan duration needed to reach a target rMSE");
  std::string curve_path;
  double target = 0.0, clamp_low = 4.0, clamp_high = 30.0;
  c_req->add_option("--curve", curve_path, "CSV of duration_minutes,rmse")->required();
  c_req->add_option("--target", target, "Target rMSE")->required();
  c_req->add_option("--clamp-low", clamp_low, "Result when already below target");
  c_req->add_option("--clamp-high", clamp_high, "Result when never reached");

  // simulate
  auto* c_sim = app.add_subcommand("simulate", "Write a synthetic cohort, ground truth and pipeline manifest");
  std::string sim_config;
  c_sim->add_option("--config", sim_config, "Simulation config JSON (defaults when omitted)");

  // pipeline
  auto* c_pipe = app.add_subcommand("pipeline", "Run the duration x censoring grid from a manifest");
  std::string manifest_path;
  bool force = false;
  c_pipe->add_option("--manifest", manifest_path, "Pipeline manifest JSON")->required();
  c_pipe->add_flag("--force", force, "Recompute cells that already have outputs");

  // schema
  auto* c_schema = app.add_subcommand("schema", "Print a published JSON schema (list when no name)");
  std::string schema_name;
  c_schema->add_option("name", schema_name, "Schema name");

  attach_env(app, "CENSORFC_");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << pipeline::error_json(ArgumentError(e.what())).dump() << "\n";
    return kExitInvalid;
  }
  if (*seed_opt) g.seed = seed_value;
  if (*threads_opt) g.threads = threads_value;
  spdlog::set_level(spdlog::level::from_str(g.log_level));

  auto load_ts = [&](const std::string& path, std::size_t drop_volumes) {
    io::LoadOptions opt;
    opt.drop_initial = drop_volumes;
    opt.run_id = fs::path(path).stem().string();
    return io::load_timeseries(path, tr, opt);
  };
  auto make_policy = [&] {
    auto p = censor::CensorPolicy::preset(expand ? CensorLevel::Expanded : parse_censor_level(level));
    if (fd_threshold) p.fd_threshold_mm = *fd_threshold;
    if (min_segment) p.min_segment = *min_segment;
    if (use_dvars) p.use_dvars = *use_dvars;
    p.fd_filter_hz = fd_filter;
    p.fd_lag = fd_lag;
    p.validate();
    return p;
  };

  try {
    if (*c_censor) {
      const auto ts = load_ts(ts_path, drop);
      const auto rp = read_realignment(motion_path, drop);
      const auto policy = make_policy();
      const auto c = pipeline::censor_run(ts, rp, policy);
      fs::create_directories(g.out);
      io::write_mask(fs::path(g.out) / "mask.txt", c.mask.keep);
      emit(g, "censor",
           Json{{"policy", policy_json(policy)},
                {"volumes", c.mask.volumes()},
                {"kept", c.mask.kept()},
                {"stats", stats_json(c.mask.stats)},
                {"dvars_space", "parcellated"},
                {"mean_fd", c.fd.size() > 1 ? c.fd.tail(c.fd.size() - 1).mean() : 0.0},
                {"high_motion_fraction", censor::high_motion_fraction(c.fd)},
                {"mask", (fs::path(g.out) / "mask.txt").string()}});
    } else if (*c_denoise) {
      const auto ts = load_ts(ts_path, drop);
      pipeline::DenoiseOptions opts{highpass, "none", {}};
      if (nuisance == "none" || nuisance == "24p") {
        opts.nuisance = nuisance;
      } else {
        opts.extra_nuisance = read_any_csv(nuisance).values;
      }
      Matrix rp;
      if (!motion_path.empty()) rp = read_realignment(motion_path, drop);
      CensorMask mask;
      if (!mask_path.empty()) {
        mask.keep = io::read_mask(mask_path);
        if (mask.keep.size() != ts.volumes()) throw ShapeError("mask length differs from timeseries volumes");
        mask.policy = CensorLevel::None;
      } else if (!motion_path.empty()) {
        mask = pipeline::censor_run(ts, rp, make_policy()).mask;
      } else {
        mask.keep.assign(ts.volumes(), true);
      }
      const auto resid = pipeline::denoise_run(ts, rp, mask, opts);
      fs::create_directories(g.out);
      const auto out_path = fs::path(g.out) / (std::string("residuals") + ext_of(g));
      io::save_timeseries(out_path, resid, format_of(g));
      io::write_sidecar(io::sidecar_path(out_path), {ts.participant_id(), ts.run_id(), ts.tr_seconds()});
      emit(g, "denoise",
           Json{{"volumes", ts.volumes()},
                {"kept", mask.kept()},
                {"parcels", ts.parcels()},
                {"highpass_hz", highpass},
                {"nuisance", opts.extra_nuisance.size() > 0 ? "file" : nuisance},
                {"nuisance_columns", opts.extra_nuisance.cols() + (nuisance == "24p" ? 24 : 0)},
                {"spike_columns", mask.volumes() - mask.kept()},
                {"residuals", out_path.string()}});
    } else if (*c_fc) {
      auto ts = load_ts(ts_path, drop_residual);
      if (!mask_path.empty()) ts = ts.select(io::read_mask(mask_path));
      const auto fc = connectome::fc_estimate(ts);
      fs::create_directories(g.out);
      const auto out_path = fs::path(g.out) / (std::string("fc") + ext_of(g));
      io::save_fc(out_path, fc, format_of(g));
      emit(g, "fc",
           Json{{"parcels", fc.parcel_count},
                {"edges", fc.edges()},
                {"n_volumes_retained", fc.n_volumes_retained},
                {"mean_z", fc.z.mean()},
                {"fc", out_path.string()}});
    } else if (*c_err) {
      std::vector<Vector> se;
      std::vector<std::string> ids;
      std::size_t partitions = 0;
      if (!truth_manifest.empty()) {
        const Json m = Json::parse(io::read_file(truth_manifest));
        const fs::path base = fs::path(truth_manifest).parent_path();
        for (const auto& p : m.at("participants")) {
          std::vector<FcMatrix> est, tru;
          std::vector<double> w;
          for (const auto& part : p.at("partitions")) {
            est.push_back(io::load_fc(base / part.at("estimate").get<std::string>()));
            tru.push_back(io::load_fc(base / part.at("truth").get<std::string>()));
            w.push_back(part.value("weight", static_cast<double>(tru.back().n_volumes_retained)));
          }
          partitions += est.size();
          se.push_back(connectome::squared_error(est, tru, w));
          ids.push_back(p.value("id", std::to_string(ids.size())));
        }
      } else if (!est_path.empty() && !truth_path.empty()) {
        const std::vector<FcMatrix> est{io::load_fc(est_path)}, tru{io::load_fc(truth_path)};
        const std::vector<double> w{1.0};
        se.push_back(connectome::squared_error(est, tru, w));
        ids.push_back("estimate");
        partitions = 1;
      } else {
        throw ArgumentError("fc-error needs --truth-manifest or both --estimate and --truth");
      }
      const auto rep = connectome::summarize_errors(se);
      Json per = Json::array();
      for (std::size_t i = 0; i < ids.size(); ++i)
        per.push_back({{"id", ids[i]}, {"rmse", rep.participant_rmse(static_cast<Eigen::Index>(i))}});
      fs::create_directories(g.out);
      Matrix table(rep.edge_rmse.size(), 1);
      table.col(0) = rep.edge_rmse;
      io::write_csv_matrix(fs::path(g.out) / "edge_rmse.csv", table, {"rmse"});
      emit(g, "fc_error",
           Json{{"overall_rmse", rep.overall_rmse},
                {"mse", rep.mse()},
                {"edges", rep.edge_rmse.size()},
                {"partitions", partitions},
                {"participants", per}});
    } else if (*c_ess) {
      std::optional<effss::AcfEstimate> acf;
      std::vector<ParcelTimeseries> runs;
      if (!acf_path.empty()) {
        Vector v = read_column(acf_path);
        if (static_cast<std::size_t>(v.size()) > max_lag + 1) v.conservativeResize(static_cast<Eigen::Index>(max_lag + 1));
        acf = effss::AcfEstimate::from_values(std::move(v));
        acf->max_lag = std::min<std::size_t>(max_lag, static_cast<std::size_t>(acf->acf.size()) - 1);
      } else if (!ts_list.empty()) {
        for (const auto& p : ts_list) runs.push_back(load_ts(p, drop_residual));
        acf = effss::estimate_acf(runs, max_lag);
      } else {
        throw ArgumentError("ess needs --acf or --timeseries");
      }
      if (tr <= 0.0 && !runs.empty()) tr = runs.front().tr_seconds();
      std::vector<std::pair<std::string, KeepVector>> masks;
      for (const auto& m : mask_list) masks.emplace_back(m, io::read_mask(m));
      if (masks.empty()) {
        if (runs.empty()) throw ArgumentError("ess with --acf needs at least one --mask");
        for (std::size_t i = 0; i < runs.size(); ++i) masks.emplace_back(ts_list[i], KeepVector(runs[i].volumes(), true));
      }
      Json rows = Json::array();
      for (const auto& [name, keep] : masks) {
        const auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
        const double te = effss::t_eff(*acf, keep);
        rows.push_back({{"mask", name},
                        {"volumes", keep.size()},
                        {"n_kept", kept},
                        {"t_eff_volumes", te},
                        {"t_eff_minutes", tr > 0.0 ? Json(te * tr / 60.0) : Json(nullptr)},
                        {"efficiency", te / static_cast<double>(kept)}});
      }
      emit(g, "ess", Json{{"max_lag", acf->max_lag}, {"acf", vec_json(acf->acf)}, {"masks", rows}});
    } else if (*c_qcfc) {
      const auto cohort = io::read_cohort(cohort_path);
      const auto m = qcfc::cohort_matrices(cohort, fd_measure);
      std::optional<qcfc::ParcelGeometry> geo;
      if (!centroids_path.empty()) geo.emplace(read_any_csv(centroids_path).values);
      auto describe = [&](const Vector& x) -> Json {
        if (x.size() == 0 || !x.allFinite()) return nullptr;
        Json s{{"mean", x.mean()}, {"mean_abs", x.cwiseAbs().mean()}};
        if (geo) s["distance_r"] = qcfc::distance_dependence(x, *geo);
        return s;
      };
      auto dense = [](const std::vector<std::optional<double>>& v) {
        Vector x(static_cast<Eigen::Index>(v.size()));
        for (std::size_t e = 0; e < v.size(); ++e)
          x(static_cast<Eigen::Index>(e)) = v[e].value_or(std::numeric_limits<double>::quiet_NaN());
        return x;
      };
      const qcfc::RmDesign design(m.participant, m.fd);
      Json report{{"mode", qc_mode}, {"observations", design.observations()}, {"participants", design.participants()}};
      std::vector<std::string> header;
      std::vector<Vector> columns;
      if (qc_mode == "validation") {
        const auto v = qcfc::validation_qcfc(m.participant, m.fd, m.fc);
        report["validation"] = describe(v.r);
        report["participants_used"] = v.participants_used;
        report["participants_excluded"] = v.participants_excluded;
        report["fd_ties"] = v.fd_ties;
        header.push_back("validation");
        columns.push_back(v.r);
      } else {
        const auto res = qcfc::rm_qcfc(design, m.fc);
        report["standard"] = describe(res.standard);
        header.push_back("standard");
        columns.push_back(res.standard);
        if (qc_mode == "rm") {
          report["between"] = describe(dense(res.between));
          report["within"] = describe(dense(res.within));
          header.insert(header.end(), {"between", "within"});
          columns.push_back(dense(res.between));
          columns.push_back(dense(res.within));
        }
      }
      Matrix table(columns.front().size(), static_cast<Eigen::Index>(columns.size()));
      for (std::size_t c = 0; c < columns.size(); ++c) table.col(static_cast<Eigen::Index>(c)) = columns[c];
      fs::create_directories(g.out);
      io::write_csv_matrix(fs::path(g.out) / "qcfc_edges.csv", table, header);
      emit(g, "qcfc", report);
    } else if (*b_icc) {
      const auto t = read_any_csv(retest_path);
      if (t.values.cols() != 2) throw ShapeError("retest file needs exactly two columns");
      const Vector x1 = t.values.col(0), x2 = t.values.col(1);
      const auto est = bwas::icc_from_test_retest(stats::view(x1), stats::view(x2), t_ref);
      Json ex = Json::array();
      if (!t_new.empty()) {
        if (!(t_ref > 0.0)) throw ArgumentError("--t-new requires --t-ref > 0");
        for (double tn : t_new) ex.push_back({{"minutes", tn}, {"icc", bwas::icc_extrapolate(est, tn)}});
      }
      emit(g, "bwas_icc",
           Json{{"signal_var", est.signal_var},
                {"noise_var", est.noise_var},
                {"icc", est.icc},
                {"clipped", est.clipped},
                {"n", x1.size()},
                {"t_ref_minutes", est.t_ref_minutes},
                {"extrapolated", ex}});
    } else if (*b_plan) {
      Json r{{"rho", rho},
             {"icc_x", icc_x},
             {"icc_y", icc_y},
             {"proportional_strength", bwas::proportional_strength(icc_x, icc_y)},
             {"expected_rho_hat", rho * bwas::proportional_strength(icc_x, icc_y)},
             {"correction_factor", icc_x * icc_y > 0.0 ? Json(bwas::correction_factor(icc_x, icc_y)) : Json(nullptr)}};
      r["target_var"] = target_var ? Json(*target_var) : Json(nullptr);
      r["required_n"] = target_var ? Json(bwas::required_n(rho, icc_x, icc_y, *target_var)) : Json(nullptr);
      r["n"] = plan_n ? Json(*plan_n) : Json(nullptr);
      r["variance"] = plan_n ? Json(bwas::bwas_variance(rho, icc_x, icc_y, *plan_n)) : Json(nullptr);
      emit(g, "bwas_plan", r);
    } else if (*b_att) {
      Vector truth = read_column(truth_path);
      const auto est = read_any_csv(est_path);
      std::vector<Vector> reps;
      for (Eigen::Index c = 0; c < est.values.cols(); ++c) reps.emplace_back(est.values.col(c));
      std::vector<bool> excluded;
      std::size_t clipped = 0;
      if (!icc_path.empty()) {
        if (!att_icc_y) throw ArgumentError("--icc-x needs --icc-y");
        const Vector ix = read_column(icc_path);
        const auto corr = bwas::bias_correct(stats::view(truth), stats::view(ix), *att_icc_y, icc_floor);
        excluded.resize(static_cast<std::size_t>(truth.size()));
        for (std::size_t e = 0; e < corr.edges.size(); ++e) {
          excluded[e] = corr.edges[e].status == bwas::CorrectionStatus::Excluded;
          truth(static_cast<Eigen::Index>(e)) = excluded[e] ? 0.0 : corr.edges[e].rho;
        }
        clipped = corr.clipped;
      }
      const auto res = bwas::empirical_attenuation(reps, truth, excluded, epsilon);
      fs::create_directories(g.out);
      Matrix table(res.ratio.size(), 1);
      table.col(0) = res.ratio;
      io::write_csv_matrix(fs::path(g.out) / "attenuation_edges.csv", table, {"ratio"});
      emit(g, "bwas_attenuation",
           Json{{"mean_ratio", std::isfinite(res.mean_ratio) ? Json(res.mean_ratio) : Json(nullptr)},
                {"included", res.included},
                {"excluded_floor", res.excluded_floor},
                {"excluded_near_zero", res.excluded_near_zero},
                {"clipped", clipped},
                {"replicates", reps.size()}});
    } else if (*c_req) {
      const auto t = read_any_csv(curve_path);
      if (t.values.cols() != 2) throw ShapeError("curve file needs columns duration_minutes,rmse");
      std::vector<connectome::CurvePoint> curve;
      for (Eigen::Index r = 0; r < t.values.rows(); ++r) curve.push_back({t.values(r, 0), t.values(r, 1)});
      emit(g, "required_duration",
           Json{{"target_rmse", target},
                {"minutes", connectome::required_duration(curve, target, clamp_low, clamp_high)},
                {"clamp_low", clamp_low},
                {"clamp_high", clamp_high}});
    } else if (*c_sim) {
      Json cfg_json = Json::object();
      if (!sim_config.empty()) cfg_json = Json::parse(io::read_file(sim_config));
      auto cfg = pipeline::sim_config_from_json(cfg_json);
      if (g.seed) cfg.seed = *g.seed;
      const auto cohort = sim::generate(cfg);
      const auto manifest = pipeline::write_cohort(cohort, g.out, format_of(g));
      std::cout << Json{{"out", g.out},
                        {"runs", cohort.runs.size()},
                        {"participants", cfg.n_participants},
                        {"manifest", (fs::path(g.out) / "manifest.json").string()},
                        {"config", pipeline::sim_config_to_json(cfg)}}
                       .dump(1)
                << "\n";
    } else if (*c_pipe) {
      auto manifest = pipeline::Manifest::load(manifest_path);
      pipeline::Overrides ov;
      ov.threads = g.threads;
      ov.seed = g.seed;
      if (app.get_option("--out")->count() > 0)
        ov.output_dir = fs::path(g.out);
      ov.force = force;
      const auto res = pipeline::run_pipeline(std::move(manifest), ov);
      std::cout << Json{{"summary", res.summary_path.string()},
                        {"cells", res.cells_total},
                        {"run", res.cells_run},
                        {"skipped", res.cells_skipped},
                        {"failed", res.cells_failed}}
                       .dump(1)
                << "\n";
    } else if (*c_schema) {
      if (schema_name.empty()) {
        for (auto n : schemas::names()) std::cout << n << "\n";
      } else {
        const auto s = schemas::get(schema_name);
        if (!s) throw ArgumentError("unknown schema '" + schema_name + "'");
        std::cout << *s << "\n";
      }
    }
  } catch (const censorfc::Error& e) {
    std::cerr << pipeline::error_json(e).dump() << "\n";
    const std::string kind = e.kind();
    const bool invalid = kind == "ValidationError" || kind == "ConfigError" || kind == "ArgumentError" ||
                         kind == "ParseError" || kind == "ShapeError";
    return invalid ? kExitInvalid : kExitRuntime;
  } catch (const Json::exception& e) {
    std::cerr << pipeline::error_json(ParseError(e.what())).dump() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << pipeline::error_json(e).dump() << "\n";
    return kExitRuntime;
  }
  return 0;
}
