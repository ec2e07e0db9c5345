#include "gwlss/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "gwlss/harness.hpp"
#include "gwlss/io.hpp"

namespace gwlss {

namespace {

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::function<void(long, long)> progress_printer(const char* tag, bool enabled) {
  if (!enabled) return nullptr;
  return [tag](long done, long total) {
    std::cerr << "[" << tag << "] " << done << "/" << total << " replicas\n";
  };
}

Json entry_json(const EntrySpec& e) {
  Json j{{"family", e.family}};
  if (e.family == "two_point") j["p"] = e.p;
  return j;
}

Json experiment_json(const ExperimentConfig& cfg, const EnsembleSpec& spec) {
  return Json{{"profile", profile_json(*spec.profile)},
              {"beta", cfg.beta},
              {"offdiag", entry_json(cfg.offdiag)},
              {"diag", entry_json(cfg.diag)},
              {"spec_hash", spec.hash()}};
}

RunConfig run_config(const ExperimentConfig& cfg, const EnsembleSpec& spec) {
  RunConfig rc;
  rc.spec = spec;
  rc.fns = build_testfns(cfg);
  rc.replicas = cfg.replicas;
  rc.master_seed = cfg.seed;
  rc.lambda_grid = cfg.lambda;
  rc.threads = cfg.threads;
  rc.predict_options = cfg.predict;
  return rc;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig cfg, const CommandOptions& opt) {
  if (opt.quick) {
    if (cfg.profile.type != "csv") {
      cfg.profile.N = std::min(cfg.profile.N, cfg.quick_N);
      cfg.profile.W = std::min(cfg.profile.W, (cfg.profile.N - 1) / 2);
    }
    cfg.replicas = std::min(cfg.replicas, cfg.quick_replicas);
    cfg.maxpoly_replicas = std::min(cfg.maxpoly_replicas, cfg.quick_replicas);
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  if (opt.replicas) {
    cfg.replicas = *opt.replicas;
    cfg.maxpoly_replicas = *opt.replicas;
  }
  if (opt.out_dir) cfg.out_dir = *opt.out_dir;
  return cfg;
}

CommandOutput cmd_predict(const ExperimentConfig& cfg) {
  const auto spec = build_spec(cfg);
  Json preds = Json::array();
  for (const auto& f : build_testfns(cfg)) {
    Json p = prediction_json(predict(f, spec, cfg.predict));
    p["testfn"] = f.name();
    preds.push_back(p);
  }
  const Json j{{"command", "predict"}, {"experiment", experiment_json(cfg, spec)},
               {"predictions", preds}};
  CommandOutput out{kExitPass, dump(j)};
  write_text(out_path(cfg, "predict.json"), out.report);
  return out;
}

CommandOutput cmd_simulate(const ExperimentConfig& cfg, bool progress) {
  const auto spec = build_spec(cfg);
  auto rc = run_config(cfg, spec);
  rc.attach_prediction = false;
  rc.progress = progress_printer("simulate", progress);
  const auto result = run_ensemble(rc);
  Json j = run_result_json(result);
  j["command"] = "simulate";
  j["experiment"] = experiment_json(cfg, spec);
  CommandOutput out{kExitPass, dump(j)};
  write_text(out_path(cfg, "samples.csv"), samples_csv(result));
  write_text(out_path(cfg, "simulate.json"), out.report);
  return out;
}

CommandOutput cmd_verify(const ExperimentConfig& cfg, bool progress) {
  const auto spec = build_spec(cfg);
  auto rc = run_config(cfg, spec);
  rc.progress = progress_printer("verify", progress);
  const auto result = run_ensemble(rc);

  bool pass = true;
  Json checks = Json::array();
  for (const auto& f : result.functions) {
    CltPrediction pred = f.prediction;
    pred.V *= cfg.variance_scale;
    const auto rep = compare(f, pred, result.N, result.lambda_grid, cfg.verify);
    Json c = compare_json(rep);
    c["testfn"] = f.name;
    c["prediction"] = prediction_json(pred);
    c["kstats"] = kstats_json(f.kstats);
    c["variance_scale"] = cfg.variance_scale;
    c["paths_agree"] = pred.paths_agree;
    pass = pass && rep.pass && pred.paths_agree;
    checks.push_back(c);
  }
  const Json j{{"command", "verify"},
               {"pass", pass},
               {"experiment", experiment_json(cfg, spec)},
               {"seed", cfg.seed},
               {"replicas", result.replicas},
               {"thresholds",
                {{"cf", "4/sqrt(R) + cf_const/N"},
                 {"cf_const", cfg.verify.cf_const},
                 {"z_threshold", cfg.verify.z_threshold},
                 {"paths_agree", "|V_series - V_integral| <= max(1e-5 V, 1e-7)"}}},
               {"checks", checks},
               {"log", result.log}};
  CommandOutput out{pass ? kExitPass : kExitVerifyFailed, dump(j)};
  write_text(out_path(cfg, "samples.csv"), samples_csv(result));
  write_text(out_path(cfg, "verify.json"), out.report);
  return out;
}

CommandOutput cmd_maxpoly(const ExperimentConfig& cfg, bool progress) {
  const auto spec = build_spec(cfg);
  RunConfig rc;
  rc.spec = spec;
  rc.replicas = cfg.maxpoly_replicas;
  rc.master_seed = cfg.seed;
  rc.threads = cfg.threads;
  rc.clt = false;
  rc.maxfield = true;
  rc.rigidity = true;
  rc.max_options = cfg.maxpoly;
  rc.attach_prediction = false;
  rc.lambda_grid.clear();
  rc.progress = progress_printer("maxpoly", progress);
  const auto result = run_ensemble(rc);

  Json j = run_result_json(result);
  j["command"] = "maxpoly";
  j["experiment"] = experiment_json(cfg, spec);
  j["kappa"] = cfg.maxpoly.kappa;
  j["grid"] = cfg.maxpoly.grid;
  j["normalization"] = "sqrt(2/beta) log N";
  CommandOutput out{kExitPass, dump(j)};
  write_text(out_path(cfg, "maxpoly.csv"), maxfield_csv(result));
  write_text(out_path(cfg, "maxpoly.json"), out.report);

  if (cfg.dump_fields) {
    const double edge = 2.0 - cfg.maxpoly.kappa;
    std::vector<double> grid(cfg.maxpoly.grid);
    for (int i = 0; i < cfg.maxpoly.grid; ++i)
      grid[i] = -edge + 2.0 * edge * i / (cfg.maxpoly.grid - 1);
    for (long r = 0; r < result.replicas; ++r) {
      const auto s = eigenvalues(sample(spec, cfg.seed, static_cast<std::uint32_t>(r)));
      std::vector<double> g = grid;
      for (double& E : g)
        if (std::binary_search(s.eigs.begin(), s.eigs.end(), E)) E += 1e-9;
      write_text(out_path(cfg, "fields/replica_" + std::to_string(r) + ".csv"), field_csv(s, g));
    }
  }
  return out;
}

CommandOutput cmd_profile(const ExperimentConfig& cfg) {
  const auto profile = profile_from_descriptor(cfg.profile);
  Json j = profile_json(profile);
  j["command"] = "profile";
  CommandOutput out{kExitPass, dump(j)};
  write_text(out_path(cfg, "profile.csv"), matrix_csv(profile.matrix()));
  write_text(out_path(cfg, "profile.json"), out.report);
  return out;
}

CommandOutput run_command(const std::string& name, const ExperimentConfig& cfg, bool progress) {
  if (name == "predict") return cmd_predict(cfg);
  if (name == "simulate") return cmd_simulate(cfg, progress);
  if (name == "verify") return cmd_verify(cfg, progress);
  if (name == "maxpoly") return cmd_maxpoly(cfg, progress);
  if (name == "profile") return cmd_profile(cfg);
  fail(ErrorKind::InvalidArgument, "unknown command '" + name + "'");
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Numerical:
      return kExitNumerical;
    case ErrorKind::Config:
    case ErrorKind::Io:
    case ErrorKind::InvalidArgument:
      return kExitConfig;
  }
  return kExitNumerical;
}

}  // namespace gwlss
