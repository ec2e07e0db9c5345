#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "gwlss/error.hpp"
#include "gwlss/harness.hpp"
#include "gwlss/rng.hpp"
#include "gwlss/semicircle.hpp"
#include "oracles.hpp"

using namespace gwlss;

namespace {

EnsembleSpec flat_spec(long N, int beta, EntryDistribution diag = EntryDistribution::gaussian()) {
  EnsembleSpec s;
  s.beta = beta;
  s.profile = std::make_shared<const VarianceProfile>(profile_flat(N));
  s.diag = diag;
  return s;
}

FunctionResult synthetic_result(const std::vector<double>& x, const std::vector<double>& grid) {
  FunctionResult fr;
  fr.samples = x;
  for (double l : grid) fr.char_emp.push_back(empirical_char(x, l));
  fr.kstats = cumulant_estimates(x);
  return fr;
}

bool same_result(const RunResult& a, const RunResult& b) {
  if (a.functions.size() != b.functions.size() || a.log != b.log) return false;
  for (std::size_t k = 0; k < a.functions.size(); ++k) {
    const auto& fa = a.functions[k];
    const auto& fb = b.functions[k];
    if (fa.samples != fb.samples || fa.char_emp != fb.char_emp) return false;
    if (fa.kstats.k1 != fb.kstats.k1 || fa.kstats.k2 != fb.kstats.k2 || fa.kstats.k3 != fb.kstats.k3 ||
        fa.kstats.se3 != fb.kstats.se3)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("empirical characteristic function") {
  CHECK(empirical_char({0.3, -1.2, 5.0}, 0.0) == cplx(1.0, 0.0));
  const std::vector<double> zeros(17, 0.0);
  for (double l : {0.1, 1.0, 7.0}) CHECK(empirical_char(zeros, l) == cplx(1.0, 0.0));

  const long R = 100000;
  const auto x = synthetic_gaussian(0.4, 1.3, R, 5);
  const cplx emp = empirical_char(x, 1.0);
  const cplx ref = std::exp(cplx(-0.5 * 1.3 * 1.3, 0.4));
  CHECK(std::abs(emp - ref) <= 4.0 / std::sqrt(double(R)));
  for (double l : {0.3, 2.0, 11.0}) CHECK(std::abs(empirical_char(x, l)) <= 1.0);
}

TEST_CASE("k-statistics") {
  const auto c = cumulant_estimates(std::vector<double>(10, 2.5));
  CHECK(c.k1 == 2.5);
  CHECK(c.k2 == 0.0);
  CHECK(c.k3 == 0.0);

  std::vector<double> pm(1000);
  for (std::size_t i = 0; i < pm.size(); ++i) pm[i] = i % 2 ? 1.0 : -1.0;
  const auto s = cumulant_estimates(pm);
  CHECK(std::abs(s.k3) <= 1e-12 + s.se3);
  CHECK(s.k2 == doctest::Approx(1000.0 / 999.0).epsilon(1e-12));

  // Brute-force oracle: textbook formulas and an O(R^2) jackknife.
  std::mt19937_64 gen(3);
  std::gamma_distribution<double> gd(2.0, 1.0);
  std::vector<double> y(40);
  for (auto& v : y) v = gd(gen);
  auto kstats = [](const std::vector<double>& v) {
    const double n = double(v.size());
    double m = 0;
    for (double a : v) m += a;
    m /= n;
    double m2 = 0, m3 = 0;
    for (double a : v) m2 += std::pow(a - m, 2), m3 += std::pow(a - m, 3);
    m2 /= n, m3 /= n;
    return std::array<double, 3>{m, m2 * n / (n - 1), m3 * n * n / ((n - 1) * (n - 2))};
  };
  const auto ref = kstats(y);
  const auto got = cumulant_estimates(y);
  CHECK(got.k1 == doctest::Approx(ref[0]).epsilon(1e-13));
  CHECK(got.k2 == doctest::Approx(ref[1]).epsilon(1e-12));
  CHECK(got.k3 == doctest::Approx(ref[2]).epsilon(1e-11));
  std::vector<std::array<double, 3>> loo;
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto z = y;
    z.erase(z.begin() + static_cast<long>(i));
    loo.push_back(kstats(z));
  }
  for (int c3 = 0; c3 < 3; ++c3) {
    double m = 0;
    for (const auto& a : loo) m += a[c3];
    m /= 40;
    double ss = 0;
    for (const auto& a : loo) ss += (a[c3] - m) * (a[c3] - m);
    const double se = std::sqrt(39.0 / 40.0 * ss);
    const double g3 = c3 == 0 ? got.se1 : c3 == 1 ? got.se2 : got.se3;
    CHECK(g3 == doctest::Approx(se).epsilon(1e-9));
  }
  CHECK_THROWS_AS(cumulant_estimates({1, 2, 3}), Error);
}

TEST_CASE("k3 of skewed draws") {
  const long R = 1000000;
  const auto d = EntryDistribution::two_point(0.2);
  const auto key = rng::key_from_seed(99);
  std::vector<double> x(R);
  for (long r = 0; r < R; ++r) x[r] = d.draw(rng::block(key, rng::Stream::Synthetic, 0, r, 0));
  const auto k = cumulant_estimates(x);
  CHECK(std::abs(k.k3 - 1.5) <= 5 * k.se3);
  CHECK(std::abs(k.k2 - 1.0) <= 5 * k.se2);
}

TEST_CASE("compare calibration") {
  const std::vector<double> grid{0.25, 0.5, 1.0};
  const long R = 2000;
  CltPrediction pred;
  pred.V = 2.0;
  pred.E = 0.1;
  const auto fr = synthetic_result(synthetic_gaussian(0.1, std::sqrt(2.0), R, 12), grid);
  const auto ok = compare(fr, pred, 300, grid);
  CHECK(ok.pass);
  CHECK(ok.cf_threshold == doctest::Approx(4.0 / std::sqrt(2000.0) + 10.0 / 300));
  CHECK(ok.items.size() == 6);
  CHECK(ok.k3_supported == "undetermined");

  auto doubled = pred;
  doubled.V *= 2;
  const auto bad = compare(fr, doubled, 300, grid);
  CHECK_FALSE(bad.pass);
  for (const auto& it : bad.items)
    if (it.name == "variance") CHECK(it.statistic > 5.0);

  // Inflated V never passes over many seeds.
  auto inflated = pred;
  inflated.V *= 4;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto f = synthetic_result(synthetic_gaussian(0.1, std::sqrt(2.0), R, seed), grid);
    CHECK(compare(f, pred, 300, grid).pass);
    CHECK_FALSE(compare(f, inflated, 300, grid).pass);
  }
}

TEST_CASE("third cumulant convention") {
  // Skewed synthetic data with k3 = 0.2 against B = 0.1 and B = 0.2.
  const long R = 200000;
  const auto d = EntryDistribution::two_point(0.2);
  const auto key = rng::key_from_seed(4);
  std::vector<double> x(R);
  for (long r = 0; r < R; ++r) x[r] = d.draw(rng::block(key, rng::Stream::Synthetic, 0, r, 0)) * std::cbrt(0.2 / 1.5);
  const std::vector<double> grid{};
  auto fr = synthetic_result(x, grid);
  CltPrediction p;
  p.V = fr.kstats.k2;
  p.E = fr.kstats.k1;
  p.B = 0.1;
  const auto a = compare(fr, p, 100, grid);
  CHECK(a.k3_supported == "2|B|");
  CHECK(a.k3_sign == 1);
  CHECK(a.k3_taylor == doctest::Approx(-0.2));
  p.B = -0.2;
  const auto b = compare(fr, p, 100, grid);
  CHECK(b.k3_supported == "|B|");
  CHECK(b.k3_sign == -1);
  CHECK(b.pass);
}

TEST_CASE("run determinism and trace variance") {
  RunConfig rc;
  rc.spec = flat_spec(60, 1);
  rc.fns = {TestFunction::parse("x"), TestFunction::parse("x2")};
  rc.replicas = 6;
  rc.master_seed = 77;
  rc.attach_prediction = false;
  rc.threads = 1;
  const auto a = run_ensemble(rc);
  const auto b = run_ensemble(rc);
  rc.threads = 4;
  const auto c = run_ensemble(rc);
  CHECK(same_result(a, b));
  CHECK(same_result(a, c));
  rc.master_seed = 78;
  CHECK_FALSE(same_result(a, run_ensemble(rc)));

  rc.replicas = 2;
  const auto two = run_ensemble(rc);
  rc.threads = 1;
  CHECK(same_result(two, run_ensemble(rc)));

  // k2 of tr H against tr S = 1.
  RunConfig big;
  big.spec = flat_spec(300, 1);
  big.fns = {TestFunction::parse("x")};
  big.replicas = 2000;
  big.master_seed = 2;
  big.lambda_grid = {0.0, 0.5};
  big.attach_prediction = false;
  const auto r = run_ensemble(big);
  const auto& k = r.functions[0].kstats;
  CHECK(std::abs(k.k2 - 1.0) <= 4 * k.se2);
  CHECK(r.functions[0].char_emp[0] == cplx(1.0, 0.0));
  CHECK(k.k2 >= 0.0);
}

TEST_CASE("run config validation and warnings") {
  RunConfig rc;
  rc.spec = flat_spec(10, 2);
  rc.fns = {TestFunction::parse("x")};
  rc.replicas = 1;
  CHECK_THROWS_AS(run_ensemble(rc), Error);
  rc.replicas = 3;
  rc.lambda_grid = {0.5, 40.0};
  rc.attach_prediction = false;
  const auto r = run_ensemble(rc);
  CHECK(std::any_of(r.log.begin(), r.log.end(), [](const std::string& s) { return s.find("validity window") != std::string::npos; }));
  rc.lambda_grid = {NAN};
  CHECK_THROWS_AS(run_ensemble(rc), Error);
}

TEST_CASE("replica failures name the replica") {
  RunConfig rc;
  rc.spec = flat_spec(10, 1);
  rc.fns = {TestFunction::closure([](double x) { return x > 0.05 ? NAN : x; }, "bad")};
  rc.replicas = 4;
  rc.master_seed = 5;
  rc.attach_prediction = false;
  try {
    (void)run_ensemble(rc);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("replica 0 (seed 5)") != std::string::npos);
  }
  // A failing body reports the smallest replica whatever the schedule.
  for (int threads : {1, 3}) {
    try {
      parallel_replicas(8, threads, [](long r) {
        if (r >= 3) throw Error(ErrorKind::Numerical, "boom " + std::to_string(r));
      });
      CHECK(false);
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "boom 3");
    }
  }
  long count = 0;
  parallel_replicas(10, 1, [](long) {}, [&](long done, long total) {
    CHECK(total == 10);
    count = done;
  });
  CHECK(count == 10);
}

TEST_CASE("max field replica") {
  // Symmetric spectrum with an eigenvalue exactly on the middle grid point.
  const long N = 201;
  std::vector<double> eigs;
  for (long k = 1; k <= N; ++k) eigs.push_back(semicircle::classical_location(k, N) - 1.0 / N);
  eigs[100] = 0.0;
  std::sort(eigs.begin(), eigs.end());
  SpectralSample s = sample_from_eigs(eigs);
  std::vector<std::string> log;
  MaxFieldOptions opt{0.2, 101};
  const auto rep = max_field_replica(s, 1, opt, &log);
  CHECK(rep.perturbed == 1);
  REQUIRE(log.size() == 1);
  CHECK(log[0].find("grid point 50") != std::string::npos);

  // Oracle: direct sup of the field on the same grid.
  double sup_re = -1e300, sup_im = -1e300, sup_nim = -1e300;
  for (int i = 0; i < 101; ++i) {
    double E = -1.8 + 3.6 * i / 100;
    if (i == 50) E += 1e-9;
    const cplx L = log_char_field(s, E, 0.0);
    sup_re = std::max(sup_re, L.real());
    sup_im = std::max(sup_im, L.imag());
    sup_nim = std::max(sup_nim, -L.imag());
  }
  const double norm = std::sqrt(2.0) * std::log(double(N));
  CHECK(rep.re == doctest::Approx(sup_re / norm).epsilon(1e-12));
  CHECK(rep.im_plus == doctest::Approx(sup_im / norm).epsilon(1e-12));
  CHECK(rep.im_minus == doctest::Approx(sup_nim / norm).epsilon(1e-12));
  // beta = 2 rescales the field by sqrt(2) and the rigidity by sqrt(2).
  const auto rep2 = max_field_replica(s, 2, opt);
  CHECK(rep2.re == doctest::Approx(rep.re * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep2.rigidity_max == doctest::Approx(rep.rigidity_max * std::sqrt(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(max_field_replica(s, 1, MaxFieldOptions{0.2, 50}), Error);
  CHECK_THROWS_AS(max_field_replica(s, 1, MaxFieldOptions{1.2, 200}), Error);
}

TEST_CASE("max field summary is order insensitive") {
  const auto r = max_field_experiment(flat_spec(120, 1), MaxFieldOptions{0.2, 300}, 7, 11);
  CHECK(r.maxfield.size() == 7);
  auto shuffled = r.maxfield;
  std::reverse(shuffled.begin(), shuffled.end());
  std::rotate(shuffled.begin(), shuffled.begin() + 3, shuffled.end());
  const auto a = summarize_max_field(r.maxfield);
  const auto b = summarize_max_field(shuffled);
  CHECK(a.median_re == b.median_re);
  CHECK(a.median_im_plus == b.median_im_plus);
  CHECK(a.median_im_minus == b.median_im_minus);
  CHECK(a.median_rigidity_max == b.median_rigidity_max);
  CHECK(a.replicas == 7);
  CHECK(median({3.0, 1.0, 2.0, 10.0}) == 2.5);
  CHECK(r.maxfield_summary.median_re == a.median_re);
}
