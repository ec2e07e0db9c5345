#include "gwlss/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "gwlss/error.hpp"
#include "gwlss/rng.hpp"

namespace gwlss {

void RunConfig::check() const {
  spec.check();
  require(replicas >= 2, "run: replicas must be >= 2");
  require(threads >= 0, "run: threads must be >= 0");
  for (double l : lambda_grid) require(std::isfinite(l), "run: lambda grid must be finite");
  if (clt) require(!fns.empty(), "run: at least one test function is required");
  if (maxfield || rigidity) {
    require(max_options.kappa > 0.0 && max_options.kappa < 1.0, "maxfield: kappa in (0, 1)");
    require(max_options.grid >= 100, "maxfield: grid must be >= 100");
  }
}

void parallel_replicas(long R, int threads, const std::function<void(long)>& body,
                       const std::function<void(long, long)>& progress) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = static_cast<int>(std::clamp<long>(workers, 1, std::max(1L, R)));

  std::atomic<long> next{0};
  std::atomic<long> done{0};
  std::mutex err_mutex;
  long err_replica = R;
  std::exception_ptr err;

  auto work = [&] {
    for (;;) {
      const long r = next.fetch_add(1);
      if (r >= R) return;
      try {
        body(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (r < err_replica) {
          err_replica = r;
          err = std::current_exception();
        }
      }
      done.fetch_add(1);
    }
  };

  if (workers == 1) {
    for (long r = 0; r < R; ++r) {
      body(r);
      if (progress) progress(r + 1, R);
    }
    return;
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (progress) progress(done.load(), R);
  }
  if (err) std::rethrow_exception(err);
}

namespace {

[[noreturn]] void rethrow_with_replica(const Error& e, long r, std::uint64_t seed) {
  std::ostringstream os;
  os << "replica " << r << " (seed " << seed << ") failed: " << e.what();
  fail(e.kind(), os.str());
}

double sup_ratio_norm(long N, int beta) {
  return std::sqrt(2.0 / beta) * std::log(static_cast<double>(N));
}

}  // namespace

RunResult run_ensemble(const RunConfig& config) {
  config.check();
  const auto& spec = config.spec;
  const long R = config.replicas;
  const long N = spec.size();
  const std::uint64_t hash = spec.hash();
  const std::size_t nf = config.clt ? config.fns.size() : 0;

  std::vector<std::vector<double>> values(nf, std::vector<double>(R));
  std::vector<MaxFieldReplica> fields(config.maxfield || config.rigidity ? R : 0);
  std::vector<std::vector<std::string>> logs(R);

  parallel_replicas(
      R, config.threads,
      [&](long r) {
        try {
          const auto H = sample(spec, config.master_seed, static_cast<std::uint32_t>(r));
          const auto s = eigenvalues(H, {hash, config.master_seed, static_cast<std::uint32_t>(r)});
          for (std::size_t k = 0; k < nf; ++k) values[k][r] = lss(s, config.fns[k]);
          if (!fields.empty()) fields[r] = max_field_replica(s, spec.beta, config.max_options, &logs[r]);
        } catch (const Error& e) {
          rethrow_with_replica(e, r, config.master_seed);
        }
      },
      config.progress);

  RunResult out;
  out.spec_hash = hash;
  out.master_seed = config.master_seed;
  out.N = N;
  out.beta = spec.beta;
  out.replicas = R;
  out.lambda_grid = config.lambda_grid;
  for (auto& l : logs)
    for (auto& line : l) out.log.push_back(std::move(line));

  const double window = lambda_window(N);
  for (double l : config.lambda_grid) {
    if (std::abs(l) > window) {
      std::ostringstream os;
      os << "lambda " << l << " is outside the validity window |lambda| <= " << window;
      out.log.push_back(os.str());
    }
  }

  for (std::size_t k = 0; k < nf; ++k) {
    FunctionResult fr;
    fr.name = config.fns[k].name();
    fr.samples = std::move(values[k]);
    for (double l : config.lambda_grid) fr.char_emp.push_back(empirical_char(fr.samples, l));
    if (R >= 4) fr.kstats = cumulant_estimates(fr.samples);
    if (config.attach_prediction) {
      fr.prediction = predict(config.fns[k], spec, config.predict_options);
      fr.has_prediction = true;
    }
    out.functions.push_back(std::move(fr));
  }
  if (!fields.empty()) {
    out.maxfield = std::move(fields);
    out.maxfield_summary = summarize_max_field(out.maxfield);
  }
  return out;
}

cplx empirical_char(const std::vector<double>& samples, double lambda) {
  if (lambda == 0.0) return 1.0;
  double c = 0.0;
  double s = 0.0;
  for (double x : samples) {
    c += std::cos(lambda * x);
    s += std::sin(lambda * x);
  }
  const double R = static_cast<double>(samples.size());
  return {c / R, s / R};
}

KStats cumulant_estimates(const std::vector<double>& samples) {
  const long R = static_cast<long>(samples.size());
  require(R >= 4, "cumulant_estimates: need at least 4 samples");

  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(R);

  // Power sums of the data shifted by its mean; the k-statistics are
  // shift-equivariant, and deleting one point only subtracts its terms.
  double S1 = 0.0, S2 = 0.0, S3 = 0.0;
  for (double x : samples) {
    const double y = x - mean;
    S1 += y;
    S2 += y * y;
    S3 += y * y * y;
  }
  auto kstat = [](double n, double s1, double s2, double s3) {
    const double k2 = (n * s2 - s1 * s1) / (n * (n - 1.0));
    const double k3 = (n * n * s3 - 3.0 * n * s2 * s1 + 2.0 * s1 * s1 * s1) /
                      (n * (n - 1.0) * (n - 2.0));
    return std::pair{k2, k3};
  };

  const double n = static_cast<double>(R);
  KStats k;
  const auto [k2, k3] = kstat(n, S1, S2, S3);
  k.k1 = mean + S1 / n;
  k.k2 = std::max(k2, 0.0);
  k.k3 = k3;

  std::vector<double> j1(R), j2(R), j3(R);
  for (long i = 0; i < R; ++i) {
    const double y = samples[i] - mean;
    const double s1 = S1 - y;
    const auto [a2, a3] = kstat(n - 1.0, s1, S2 - y * y, S3 - y * y * y);
    j1[i] = mean + s1 / (n - 1.0);
    j2[i] = a2;
    j3[i] = a3;
  }
  auto jack_se = [n](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt((n - 1.0) / n * ss);
  };
  k.se1 = jack_se(j1);
  k.se2 = jack_se(j2);
  k.se3 = jack_se(j3);
  return k;
}

double lambda_window(long N) { return 0.5 * std::pow(static_cast<double>(N), 0.4); }

CompareReport compare(const FunctionResult& result, const CltPrediction& prediction, long N,
                      const std::vector<double>& lambda_grid, const CompareOptions& opt) {
  require(result.char_emp.size() == lambda_grid.size(), "compare: lambda grid mismatch");
  const double R = static_cast<double>(result.samples.size());
  CompareReport rep;
  rep.cf_threshold = 4.0 / std::sqrt(R) + opt.cf_const / static_cast<double>(N);
  rep.z_threshold = opt.z_threshold;

  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const cplx pred = predicted_char(lambda_grid[i], prediction);
    CheckItem it;
    std::ostringstream name;
    name << "char(" << lambda_grid[i] << ")";
    it.name = name.str();
    it.observed = std::abs(result.char_emp[i]);
    it.predicted = std::abs(pred);
    it.statistic = std::abs(result.char_emp[i] - pred);
    it.threshold = rep.cf_threshold;
    it.pass = it.statistic <= it.threshold;
    rep.items.push_back(it);
  }

  const auto& k = result.kstats;
  auto zitem = [&](const char* name, double obs, double pred, double se) {
    CheckItem it;
    it.name = name;
    it.observed = obs;
    it.predicted = pred;
    it.statistic = se > 0.0 ? std::abs(obs - pred) / se : (obs == pred ? 0.0 : HUGE_VAL);
    it.threshold = opt.z_threshold;
    it.pass = it.statistic <= it.threshold;
    return it;
  };
  rep.items.push_back(zitem("mean", k.k1, prediction.E, k.se1));
  rep.items.push_back(zitem("variance", k.k2, prediction.V, k.se2));

  // Third cumulant: |k3| against the two normalizations of B.
  rep.k3 = k.k3;
  rep.k3_se = k.se3;
  rep.k3_taylor = -2.0 * prediction.B;
  rep.k3_direct = prediction.B;
  const auto taylor = zitem("third_cumulant", std::abs(k.k3), 2.0 * std::abs(prediction.B), k.se3);
  const auto direct = zitem("third_cumulant", std::abs(k.k3), std::abs(prediction.B), k.se3);
  if (prediction.B == 0.0) {
    rep.k3_supported = "undetermined";
    rep.items.push_back(taylor);
  } else {
    const bool use_taylor = taylor.statistic <= direct.statistic;
    rep.k3_supported = use_taylor ? "2|B|" : "|B|";
    rep.items.push_back(use_taylor ? taylor : direct);
    if (k.k3 != 0.0) rep.k3_sign = (k.k3 > 0) == (prediction.B > 0) ? 1 : -1;
  }

  for (const auto& it : rep.items) rep.pass = rep.pass && it.pass;
  return rep;
}

MaxFieldReplica max_field_replica(const SpectralSample& s, int beta, const MaxFieldOptions& opt,
                                  std::vector<std::string>* log) {
  require(opt.kappa > 0.0 && opt.kappa < 1.0, "maxfield: kappa in (0, 1)");
  require(opt.grid >= 100, "maxfield: grid must be >= 100");
  const long N = s.size();
  const double norm = sup_ratio_norm(N, beta);
  const double edge = 2.0 - opt.kappa;

  MaxFieldReplica rep;
  double sup_re = -HUGE_VAL;
  double sup_im = -HUGE_VAL;
  double sup_neg_im = -HUGE_VAL;
  for (int i = 0; i < opt.grid; ++i) {
    double E = -edge + 2.0 * edge * i / (opt.grid - 1);
    if (std::binary_search(s.eigs.begin(), s.eigs.end(), E)) {
      E += 1e-9;
      ++rep.perturbed;
      if (log) {
        std::ostringstream os;
        os.precision(17);
        os << "replica " << s.source.replica << ": grid point " << i
           << " hit an eigenvalue, moved to E = " << E;
        log->push_back(os.str());
      }
    }
    const cplx L = log_char_field(s, E, 0.0);
    sup_re = std::max(sup_re, L.real());
    sup_im = std::max(sup_im, L.imag());
    sup_neg_im = std::max(sup_neg_im, -L.imag());
  }
  rep.re = sup_re / norm;
  rep.im_plus = sup_im / norm;
  rep.im_minus = sup_neg_im / norm;

  const auto rig = rigidity_stats(s, std::min(opt.kappa, 0.49));
  const double rscale = std::sqrt(static_cast<double>(beta));
  rep.rigidity_max = rig.max * rscale;
  rep.rigidity_min = rig.min * rscale;
  return rep;
}

double median(std::vector<double> v) {
  require(!v.empty(), "median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MaxFieldSummary summarize_max_field(const std::vector<MaxFieldReplica>& reps) {
  MaxFieldSummary s;
  s.replicas = static_cast<long>(reps.size());
  if (reps.empty()) return s;
  std::vector<double> re, ip, im, rmax, rmin;
  for (const auto& r : reps) {
    re.push_back(r.re);
    ip.push_back(r.im_plus);
    im.push_back(r.im_minus);
    rmax.push_back(r.rigidity_max);
    rmin.push_back(r.rigidity_min);
    s.perturbations += r.perturbed;
  }
  s.median_re = median(re);
  s.median_im_plus = median(ip);
  s.median_im_minus = median(im);
  s.median_rigidity_max = median(rmax);
  s.median_rigidity_min = median(rmin);
  return s;
}

RunResult max_field_experiment(const EnsembleSpec& spec, const MaxFieldOptions& opt, long R,
                               std::uint64_t seed, int threads) {
  RunConfig cfg;
  cfg.spec = spec;
  cfg.replicas = R;
  cfg.master_seed = seed;
  cfg.threads = threads;
  cfg.clt = false;
  cfg.maxfield = true;
  cfg.rigidity = true;
  cfg.max_options = opt;
  cfg.attach_prediction = false;
  cfg.lambda_grid.clear();
  return run_ensemble(cfg);
}

std::vector<double> synthetic_gaussian(double mu, double sigma, long R, std::uint64_t seed) {
  const auto key = rng::key_from_seed(seed);
  std::vector<double> out(R);
  for (long r = 0; r < R; ++r)
    out[r] = mu + sigma * rng::standard_normal(rng::block(key, rng::Stream::Synthetic, 0,
                                                          static_cast<std::uint64_t>(r), 0));
  return out;
}

}  // namespace gwlss
