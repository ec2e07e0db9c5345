// gwlss command-line front end. Links only the C API.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "gwlss/gwlss.h"

namespace {

int exit_code(gwlss_status st) {
  switch (st) {
    case GWLSS_OK:
      return 0;
    case GWLSS_VERIFY_FAILED:
      return 1;
    case GWLSS_ERR_CONFIG:
    case GWLSS_ERR_INVALID_ARGUMENT:
    case GWLSS_ERR_IO:
      return 2;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gwlss: CLT functionals and Monte Carlo checks for generalized Wigner matrices"};
  app.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  int threads = -1;
  long replicas = 0;
  std::string out_dir;
  bool quick = false;
  bool quiet = false;

  const char* commands[][2] = {
      {"predict", "Evaluate V, E and B for each test function"},
      {"simulate", "Sample LSS replicas; write samples.csv and a JSON summary"},
      {"verify", "Compare simulation against prediction; exit 1 on failure"},
      {"maxpoly", "Maximum of the log-characteristic polynomial and rigidity"},
      {"profile", "Construct and inspect the variance profile"},
  };
  CLI::Option* seed_opt = nullptr;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("-c,--config", config, "Experiment file (YAML or JSON)")->required();
    auto* so = sub->add_option("--seed", seed, "Master seed, overrides the file");
    sub->add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--replicas", replicas, "Replica count, overrides the file")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_flag("--quick", quick, "Reduced N and replica count");
    sub->add_flag("-q,--quiet", quiet, "No progress on stderr");
    sub->callback([&seed_opt, so] { seed_opt = so; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  gwlss_overrides ov{};
  ov.has_seed = seed_opt && seed_opt->count() > 0;
  ov.seed = seed;
  ov.threads = threads;
  ov.replicas = replicas;
  ov.quick = quick;
  ov.out_dir = out_dir.empty() ? nullptr : out_dir.c_str();
  ov.progress = !quiet;

  gwlss_experiment* x = nullptr;
  gwlss_status st = gwlss_experiment_load(config.c_str(), &ov, &x);
  if (st != GWLSS_OK) {
    std::fprintf(stderr, "gwlss: %s\n", gwlss_last_error());
    return exit_code(st);
  }
  char* report = nullptr;
  st = gwlss_experiment_run(x, command.c_str(), &report);
  gwlss_experiment_free(x);
  if (report) {
    std::fputs(report, stdout);
    gwlss_string_free(report);
  }
  if (st == GWLSS_VERIFY_FAILED) std::fprintf(stderr, "gwlss: verification failed\n");
  else if (st != GWLSS_OK) std::fprintf(stderr, "gwlss: %s\n", gwlss_last_error());
  return exit_code(st);
}
