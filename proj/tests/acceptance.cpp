// Acceptance suite: one PASS/FAIL line per criterion.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "gwlss/ensemble.hpp"
#include "gwlss/functionals.hpp"
#include "gwlss/harness.hpp"
#include "gwlss/profile.hpp"
#include "gwlss/semicircle.hpp"
#include "gwlss/spectral.hpp"
#include "gwlss/testfn.hpp"
#include "oracles.hpp"

using namespace gwlss;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

EnsembleSpec make_spec(VarianceProfile p, int beta, EntryDistribution off = EntryDistribution::gaussian(),
                       EntryDistribution diag = EntryDistribution::gaussian()) {
  EnsembleSpec s;
  s.beta = beta;
  s.profile = std::make_shared<const VarianceProfile>(std::move(p));
  s.offdiag = off;
  s.diag = diag;
  return s;
}

PredictOptions series_only() {
  PredictOptions o;
  o.with_integral = false;
  return o;
}

// 1. V(x) = tr S, oracle Var(tr H) = sum_i S_ii.
Outcome identity_variance() {
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const long N = 20 + 7 * k;
    const auto p = profile_random_ds(N, 100 + k, 0.2 + 0.04 * k);
    const double oracle = p.matrix().diagonal().sum();
    for (int beta : {1, 2}) {
      const auto spec = make_spec(p, beta);
      const double V = predict(TestFunction::parse("x"), spec, series_only()).V;
      worst = std::max(worst, std::abs(V - oracle));
    }
  }
  return {worst <= 1e-10, "max |V - sum S_ii| = " + fmt(worst)};
}

// 2. Series and double-integral routes agree.
Outcome path_equivalence() {
  const auto p = profile_random_ds(50, 7, 0.6);
  const std::vector<TestFunction> fns{TestFunction::parse("x"), TestFunction::parse("x2"),
                                      TestFunction::parse("T3"),
                                      TestFunction::closure([](double x) { return std::exp(-x * x); }, "exp(-x^2)")};
  bool ok = true;
  double worst = 0.0;
  for (int beta : {1, 2}) {
    for (const auto& law : {EntryDistribution::gaussian(), EntryDistribution::rademacher()}) {
      const auto spec = make_spec(p, beta, law, EntryDistribution::two_point(0.3));
      const auto summary = cumulant_summary(spec);
      for (const auto& f : fns) {
        const auto t = adaptive_coeffs(f, p);
        const double vs = variance_series(t, p, summary, beta).value;
        const double vi = variance_integral(f, p, summary, beta);
        const double tol = std::max(1e-5 * std::abs(vs), 1e-7);
        worst = std::max(worst, std::abs(vs - vi) / tol);
        ok = ok && std::abs(vs - vi) <= tol;
      }
    }
  }
  return {ok, "max |series - integral| / tolerance = " + fmt(worst)};
}

// 3. Eigen-form resolvent trace against a dense solve.
Outcome sherman_morrison() {
  const auto p = profile_random_ds(100, 11, 0.6);
  const Eigen::MatrixXcd S = p.matrix().cast<cplx>();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(100, 100);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> rad(0.0, 0.99), ang(-oracle::pi, oracle::pi);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const cplx M = std::polar(rad(gen), ang(gen));
    const cplx dense = (S * (I - M * S).partialPivLu().solve(I)).trace();
    const double scale = std::max(1.0, std::abs(dense));
    worst = std::max(worst, std::abs(p.resolvent_trace(M) - dense) / scale);
    worst = std::max(worst, std::abs(p.resolvent_trace_split(M) - dense) / scale);
  }
  return {worst <= 1e-9, "max relative error = " + fmt(worst)};
}

// 4. f = x^2 against the closed-form Var(tr H^2).
Outcome exact_x2_variance() {
  bool ok = true;
  std::string detail;
  for (long N : {100L, 400L}) {
    const auto p = profile_random_ds(N, 21 + N, 0.5);
    const auto& S = p.matrix();
    for (const auto& law : {EntryDistribution::gaussian(), EntryDistribution::rademacher()}) {
      const auto spec = make_spec(p, 1, law, EntryDistribution::gaussian());
      double exact = 0.0;
      for (long i = 0; i < N; ++i) {
        exact += 2.0 * S(i, i) * S(i, i);  // Gaussian diagonal, kappa4 = 0
        for (long j = i + 1; j < N; ++j)
          exact += 4.0 * (law.kappa4() * S(i, j) * S(i, j) + 2.0 * S(i, j) * S(i, j));
      }
      const double V = predict(TestFunction::parse("x2"), spec, series_only()).V;
      const double diff = std::abs(V - exact);
      ok = ok && diff <= 10.0 / N;
      detail += "N=" + std::to_string(N) + " " + law.name() + " diff=" + fmt(diff) + "; ";
    }
  }
  return {ok, detail};
}

// 5. Mean correction: exact zero for x^2 and Monte Carlo means.
Outcome mean_correction_check() {
  bool ok = true;
  std::string detail;
  {
    const auto p = profile_flat(200);
    const auto spec = make_spec(p, 1);
    const double E = mean_correction(TestFunction::parse("x2"), p, cumulant_summary(spec), 1);
    ok = std::abs(E) <= 5e-3;
    detail += "E_1(x2) = " + fmt(E) + "; ";
  }
  const long N = 300;
  for (const char* kind : {"flat", "band"}) {
    for (int beta : {1, 2}) {
      RunConfig rc;
      rc.spec = make_spec(std::string(kind) == "flat" ? profile_flat(N) : profile_band(N, 30), beta);
      rc.fns = {TestFunction::parse("x2"), TestFunction::gauss(0.3, 0.7)};
      rc.replicas = 4000;
      rc.master_seed = 500 + beta;
      rc.lambda_grid = {};
      const auto res = run_ensemble(rc);
      for (const auto& fr : res.functions) {
        const double z = (fr.kstats.k1 - fr.prediction.E) / fr.kstats.se1;
        ok = ok && std::abs(z) <= 4.0;
        detail += std::string(kind) + " b" + std::to_string(beta) + " " + fr.name + " z=" + fmt(z, 3) + "; ";
      }
    }
  }
  return {ok, detail};
}

// 6. Empirical characteristic function of x^2.
Outcome characteristic_function() {
  const long N = 400, R = 4000;
  const double tol = 4.0 / std::sqrt(double(R)) + 10.0 / N;
  bool ok = true;
  std::string detail;
  for (int beta : {1, 2}) {
    RunConfig rc;
    rc.spec = make_spec(profile_flat(N), beta);
    rc.fns = {TestFunction::parse("x2")};
    rc.replicas = R;
    rc.master_seed = 600 + beta;
    rc.lambda_grid = {0.25, 0.5, 1.0};
    const auto res = run_ensemble(rc);
    const auto& fr = res.functions[0];
    for (std::size_t k = 0; k < rc.lambda_grid.size(); ++k) {
      const double d = std::abs(fr.char_emp[k] - predicted_char(rc.lambda_grid[k], fr.prediction));
      ok = ok && d <= tol;
      detail += "b" + std::to_string(beta) + " l=" + fmt(rc.lambda_grid[k]) + " d=" + fmt(d, 3) + "; ";
    }
  }
  return {ok, detail + "tol=" + fmt(tol)};
}

// 7. Third cumulant of tr H with a skewed diagonal.
Outcome third_cumulant() {
  RunConfig rc;
  rc.spec = make_spec(profile_flat(100), 1, EntryDistribution::gaussian(), EntryDistribution::two_point(0.1));
  rc.fns = {TestFunction::parse("x")};
  rc.replicas = 50000;
  rc.master_seed = 700;
  rc.lambda_grid = {};
  rc.predict_options = series_only();
  const auto res = run_ensemble(rc);
  const auto& fr = res.functions[0];
  const auto rep = compare(fr, fr.prediction, 100, {});
  const double k3 = fr.kstats.k3, se = fr.kstats.se3;
  const double B = fr.prediction.B;
  const double s3 = cumulant_summary(rc.spec).s3_hat;
  const bool near2B = std::abs(std::abs(k3) - 2.0 * std::abs(B)) <= 0.5 * 2.0 * std::abs(B);
  const bool nearS3 = std::abs(std::abs(k3) - std::abs(s3)) <= 0.5 * std::abs(s3);
  const bool resolved = std::abs(k3) >= 3.0 * se;
  return {(near2B || nearS3) && resolved,
          "k3=" + fmt(k3) + " se=" + fmt(se) + " B=" + fmt(B) + " s3=" + fmt(s3) +
              " supported=" + rep.k3_supported + " sign=" + std::to_string(rep.k3_sign)};
}

// 8. Positivity over random configurations.
Outcome positivity() {
  std::mt19937_64 gen(8);
  const std::vector<std::string> fns{"x", "x2", "T3", "gauss(0.3,0.7)", "gauss(-1,0.4)", "poly(0,1,-2,0.5)",
                                     "logre(0.2,0.5)", "logim(-0.7,0.3)"};
  const std::vector<std::string> laws{"gaussian", "rademacher", "two_point", "uniform"};
  std::uniform_int_distribution<int> pickf(0, int(fns.size()) - 1), pickl(0, 3), pickb(1, 2), pickN(10, 60);
  std::uniform_real_distribution<double> pp(0.05, 0.95), rough(0.0, 1.0);
  double worst = 1e300;
  for (int k = 0; k < 200; ++k) {
    const long N = pickN(gen);
    auto p = k % 3 == 0   ? profile_band(N, std::max(1L, N / 5))
             : k % 3 == 1 ? profile_random_ds(N, 800 + k, rough(gen))
                          : profile_flat(N);
    const auto off = EntryDistribution::from_name(laws[pickl(gen)], pp(gen));
    const auto diag = EntryDistribution::from_name(laws[pickl(gen)], pp(gen));
    const auto spec = make_spec(std::move(p), pickb(gen), off, diag);
    worst = std::min(worst, predict(TestFunction::parse(fns[pickf(gen)]), spec, series_only()).V);
  }
  return {worst >= -1e-10, "min V = " + fmt(worst)};
}

// 9. Logarithmic growth of the GbetaE log variance.
Outcome gbe_log_growth() {
  bool ok = true;
  std::string detail;
  for (int beta : {1, 2}) {
    const double target = std::log(10.0) / beta;
    for (LogPart part : {LogPart::Real, LogPart::Imag}) {
      double prev = gbe_log_variance({0.0, 1e-2}, beta, part);
      for (double eta : {1e-3, 1e-4}) {
        const double v = gbe_log_variance({0.0, eta}, beta, part);
        const double rel = std::abs((v - prev) - target) / target;
        ok = ok && rel <= 0.15;
        detail += "b" + std::to_string(beta) + (part == LogPart::Real ? " re" : " im") + " " + fmt(rel, 3) + "; ";
        prev = v;
      }
    }
  }
  return {ok, "relative deviations: " + detail};
}

// 10 and 11 share one set of runs.
RunResult max_field_runs() {
  return max_field_experiment(make_spec(profile_flat(1000), 1), MaxFieldOptions{0.2, 2000}, 20, 1000);
}

Outcome max_field(const RunResult& r) {
  const auto& m = r.maxfield_summary;
  auto in = [](double x) { return x > 0.5 && x < 1.5; };
  return {in(m.median_re) && in(m.median_im_plus) && in(m.median_im_minus),
          "medians re=" + fmt(m.median_re) + " +im=" + fmt(m.median_im_plus) + " -im=" + fmt(m.median_im_minus) +
              " over " + std::to_string(m.replicas) + " replicas"};
}

Outcome rigidity(const RunResult& r) {
  long hits = 0;
  for (const auto& rep : r.maxfield) hits += rep.rigidity_max > 0.3 && rep.rigidity_max < 1.7;
  const double frac = double(hits) / double(r.maxfield.size());
  return {frac >= 0.8, std::to_string(hits) + "/" + std::to_string(r.maxfield.size()) + " in (0.3, 1.7)"};
}

// 12. Chebyshev layer invariants.
Outcome chebyshev_layer() {
  double orth = 0.0, lin = 0.0, par = 0.0, logq = 0.0;
  for (int m = 0; m <= 50; ++m) {
    const auto c = cheb_coeffs(TestFunction::chebyshev_mode(m), 50, 128);
    for (int n = 0; n <= 50; ++n)
      orth = std::max(orth, std::abs(c.t[n] - (n == m ? (m == 0 ? 2.0 : 1.0) : 0.0)));
  }
  const auto f = TestFunction::gauss(0.3, 0.7);
  const auto g = TestFunction::parse("poly(1,-2,0.5,3)");
  const auto h = TestFunction::closure([&](double x) { return 2.5 * f(x) - 1.5 * g(x); });
  const auto cf = cheb_coeffs(f, 64, 512), cg = cheb_coeffs(g, 64, 512), ch = cheb_coeffs(h, 64, 512);
  for (int n = 0; n <= 64; ++n) lin = std::max(lin, std::abs(ch.t[n] - (2.5 * cf.t[n] - 1.5 * cg.t[n])));
  const auto odd = cheb_coeffs(TestFunction::closure([](double x) { return std::sin(x) + x * x * x; }), 64, 512);
  const auto even = cheb_coeffs(TestFunction::gauss(0.0, 0.8), 64, 512);
  for (int n = 0; n <= 64; ++n) par = std::max(par, std::abs(n % 2 == 0 ? odd.t[n] : even.t[n]));
  for (double eta : {0.3, 0.7}) {
    for (double E : {0.0, 1.1}) {
      const auto fre = TestFunction::log_real(E, eta);
      const auto fim = TestFunction::log_imag(E, eta);
      for (int n = 1; n <= 20; ++n) {
        logq = std::max(logq, std::abs(log_test_coeffs({E, eta}, n, LogPart::Real).real() - oracle::cheb_coeff(fre, n)));
        logq = std::max(logq, std::abs(log_test_coeffs({E, eta}, n, LogPart::Imag).real() - oracle::cheb_coeff(fim, n)));
      }
    }
  }
  return {orth <= 1e-12 && lin <= 1e-12 && par <= 1e-12 && logq <= 1e-8,
          "orthogonality " + fmt(orth) + ", linearity " + fmt(lin) + ", parity " + fmt(par) + ", log " + fmt(logq)};
}

// 13. CLI determinism.
int shell(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  const auto dir = work / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "sim.yaml") << "profile: {type: band, N: 80, W: 10}\n"
                                     "ensemble: {beta: 2, offdiag: rademacher, diag: {family: two_point, p: 0.2}}\n"
                                     "testfn: [x, x2, \"gauss(0.3,0.7)\"]\n"
                                     "run: {replicas: 200, seed: 1313}\n";
  std::vector<std::string> csv;
  for (const auto& [tag, threads] : std::vector<std::pair<std::string, int>>{{"a", 1}, {"b", 1}, {"c", 4}, {"d", 4}}) {
    const int rc = shell(cli + " simulate -q -c " + (dir / "sim.yaml").string() + " --threads " +
                         std::to_string(threads) + " --out " + (dir / tag).string() + " > /dev/null");
    if (rc != 0) return {false, "simulate exited " + std::to_string(rc)};
    csv.push_back(slurp(dir / tag / "samples.csv"));
  }
  const bool same = !csv[0].empty() && std::all_of(csv.begin(), csv.end(), [&](const auto& s) { return s == csv[0]; });
  return {same, "samples.csv " + std::to_string(csv[0].size()) + " bytes, 2 runs x threads {1, 4}"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string cli;
  std::string workdir = "acceptance_work";
  std::vector<int> only;
  app.add_option("--cli", cli, "Path to the gwlss executable")->required();
  app.add_option("--workdir", workdir, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workdir);

  const std::set<int> selected(only.begin(), only.end());
  auto wanted = [&](int k) { return selected.empty() || selected.count(k) > 0; };

  int failures = 0;
  auto report = [&](int k, const std::string& name, const std::function<Outcome()>& body) {
    if (!wanted(k)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << k << " " << name << ": " << o.detail << " [" << fmt(secs, 3)
              << " s]" << std::endl;
  };

  report(1, "identity variance", identity_variance);
  report(2, "path equivalence", path_equivalence);
  report(3, "resolvent trace", sherman_morrison);
  report(4, "x^2 exact variance", exact_x2_variance);
  report(5, "mean correction", mean_correction_check);
  report(6, "characteristic function", characteristic_function);
  report(7, "third cumulant", third_cumulant);
  report(8, "positivity", positivity);
  report(9, "GbetaE log variance", gbe_log_growth);
  if (wanted(10) || wanted(11)) {
    RunResult runs;
    bool have = false;
    auto shared = [&]() -> const RunResult& {
      if (!have) {
        runs = max_field_runs();
        have = true;
      }
      return runs;
    };
    report(10, "max log-characteristic polynomial", [&] { return max_field(shared()); });
    report(11, "rigidity", [&] { return rigidity(shared()); });
  }
  report(12, "Chebyshev layer", chebyshev_layer);
  report(13, "determinism", [&] { return determinism(cli, workdir); });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
