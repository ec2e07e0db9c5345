#pragma once

// Experiment files: one YAML (or JSON) document per experiment. Every key is
// checked against the schema before anything is computed; unknown keys and
// type mismatches are reported with their line and column.

#include <cstdint>
#include <string>
#include <vector>

#include "gwlss/ensemble.hpp"
#include "gwlss/functionals.hpp"
#include "gwlss/harness.hpp"
#include "gwlss/profile.hpp"
#include "gwlss/testfn.hpp"

namespace gwlss {

struct EntrySpec {
  std::string family = "gaussian";
  double p = 0.5;
};

struct ExperimentConfig {
  ProfileDescriptor profile;
  int beta = 1;
  EntrySpec offdiag;
  EntrySpec diag;
  std::vector<std::string> testfns;

  long replicas = 1000;
  std::uint64_t seed = 0;
  std::vector<double> lambda{0.25, 0.5, 1.0};
  int threads = 0;

  CompareOptions verify;
  double variance_scale = 1.0;  // multiplies the predicted V before comparison

  MaxFieldOptions maxpoly;
  long maxpoly_replicas = 20;
  bool dump_fields = false;

  PredictOptions predict;

  long quick_N = 200;
  long quick_replicas = 200;

  std::string out_dir = "out";
  std::string source;  // file the config was read from
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

EnsembleSpec build_spec(const ExperimentConfig& cfg);
std::vector<TestFunction> build_testfns(const ExperimentConfig& cfg);

}  // namespace gwlss
