#pragma once

// Monte Carlo orchestration: replicas are sampled and diagonalized in
// parallel, and every per-replica result is written to its own slot, so the
// aggregate depends only on (spec, seed, R) and never on the schedule.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gwlss/ensemble.hpp"
#include "gwlss/functionals.hpp"
#include "gwlss/spectral.hpp"
#include "gwlss/testfn.hpp"

namespace gwlss {

struct MaxFieldOptions {
  double kappa = 0.2;
  int grid = 2000;
};

struct RunConfig {
  EnsembleSpec spec;
  std::vector<TestFunction> fns;
  long replicas = 2;
  std::uint64_t master_seed = 0;
  std::vector<double> lambda_grid{0.25, 0.5, 1.0};
  int threads = 0;  // 0: hardware concurrency
  bool clt = true;
  bool maxfield = false;
  bool rigidity = false;
  MaxFieldOptions max_options;
  bool attach_prediction = true;
  PredictOptions predict_options;
  /// Called with the number of finished replicas; from the calling thread only.
  std::function<void(long, long)> progress;

  void check() const;
};

struct KStats {
  double k1 = 0.0, k2 = 0.0, k3 = 0.0;
  double se1 = 0.0, se2 = 0.0, se3 = 0.0;
};

struct FunctionResult {
  std::string name;
  std::vector<double> samples;
  std::vector<cplx> char_emp;  // one per lambda
  KStats kstats;
  bool has_prediction = false;
  CltPrediction prediction;
};

struct MaxFieldReplica {
  double re = 0.0;        // sup Re L_N / (sqrt(2/beta) log N)
  double im_plus = 0.0;   // sup Im L_N / ...
  double im_minus = 0.0;  // sup -Im L_N / ...
  double rigidity_max = 0.0;
  double rigidity_min = 0.0;
  int perturbed = 0;      // grid points moved off an eigenvalue
};

struct MaxFieldSummary {
  double median_re = 0.0;
  double median_im_plus = 0.0;
  double median_im_minus = 0.0;
  double median_rigidity_max = 0.0;
  double median_rigidity_min = 0.0;
  long replicas = 0;
  long perturbations = 0;
};

struct RunResult {
  std::uint64_t spec_hash = 0;
  std::uint64_t master_seed = 0;
  long N = 0;
  int beta = 1;
  long replicas = 0;
  std::vector<double> lambda_grid;
  std::vector<FunctionResult> functions;
  std::vector<MaxFieldReplica> maxfield;
  MaxFieldSummary maxfield_summary;
  std::vector<std::string> log;  // deterministic event log (collisions, warnings)
};

/// Runs body(r) for r in [0, R) on `threads` workers. Exceptions are
/// rethrown for the smallest failing replica.
void parallel_replicas(long R, int threads, const std::function<void(long)>& body,
                       const std::function<void(long, long)>& progress = nullptr);

RunResult run_ensemble(const RunConfig& config);

/// R^{-1} sum_r exp(i lambda X_r).
cplx empirical_char(const std::vector<double>& samples, double lambda);

/// Unbiased k-statistics with delete-one jackknife standard errors; R >= 4.
KStats cumulant_estimates(const std::vector<double>& samples);

struct CompareOptions {
  double cf_const = 10.0;     // CF threshold 4/sqrt(R) + cf_const/N
  double z_threshold = 4.0;
};

struct CheckItem {
  std::string name;
  double observed = 0.0;
  double predicted = 0.0;
  double statistic = 0.0;  // |difference| or |z|
  double threshold = 0.0;
  bool pass = false;
};

struct CompareReport {
  std::vector<CheckItem> items;
  bool pass = true;
  double cf_threshold = 0.0;
  double z_threshold = 0.0;
  // Third cumulant against both normalizations of B.
  double k3 = 0.0;
  double k3_se = 0.0;
  double k3_taylor = 0.0;   // -2B
  double k3_direct = 0.0;   // B
  std::string k3_supported; // "2|B|", "|B|" or "undetermined"
  int k3_sign = 0;          // sign of k3 relative to sign of B (+1, -1, 0)
};

CompareReport compare(const FunctionResult& result, const CltPrediction& prediction, long N,
                      const std::vector<double>& lambda_grid, const CompareOptions& opt = {});

/// Upper end of the lambda range where the expansion is meaningful.
double lambda_window(long N);

/// Per-replica maxima of the field on a uniform grid over |E| <= 2 - kappa.
MaxFieldReplica max_field_replica(const SpectralSample& s, int beta, const MaxFieldOptions& opt,
                                  std::vector<std::string>* log = nullptr);

MaxFieldSummary summarize_max_field(const std::vector<MaxFieldReplica>& reps);

/// Stand-alone max-field experiment over R replicas.
RunResult max_field_experiment(const EnsembleSpec& spec, const MaxFieldOptions& opt, long R,
                               std::uint64_t seed, int threads = 0);

/// i.i.d. N(mu, sigma^2) draws from the synthetic stream, for calibration.
std::vector<double> synthetic_gaussian(double mu, double sigma, long R, std::uint64_t seed);

double median(std::vector<double> v);

}  // namespace gwlss
