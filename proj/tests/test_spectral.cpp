#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "gwlss/error.hpp"
#include "gwlss/semicircle.hpp"
#include "gwlss/spectral.hpp"
#include "oracles.hpp"

using namespace gwlss;
using oracle::pi;

namespace {

EnsembleSpec flat_spec(long N, int beta) {
  EnsembleSpec s;
  s.beta = beta;
  s.profile = std::make_shared<const VarianceProfile>(profile_flat(N));
  return s;
}

}  // namespace

TEST_CASE("small exact spectra") {
  SampledMatrix Z;
  Z.real = Eigen::MatrixXd::Zero(5, 5);
  for (double l : eigenvalues(Z).eigs) CHECK(l == 0.0);

  SampledMatrix P;
  P.real = Eigen::MatrixXd{{0, 1}, {1, 0}};
  const auto s = eigenvalues(P);
  CHECK(s.eigs[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(s.eigs[1] == doctest::Approx(1.0).epsilon(1e-15));

  SampledMatrix C;
  C.beta = 2;
  C.complex = Eigen::MatrixXcd{{{0, 0}, {0, 1}}, {{0, -1}, {0, 0}}};
  const auto c = eigenvalues(C);
  CHECK(c.eigs[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(c.eigs[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("conservation and exact linear statistics") {
  for (int beta : {1, 2}) {
    const auto spec = flat_spec(200, beta);
    const auto H = sample(spec, 3, 0);
    const auto s = eigenvalues(H, {spec.hash(), 3, 0});
    CHECK(std::is_sorted(s.eigs.begin(), s.eigs.end()));
    CHECK(s.source.spec_hash == spec.hash());
    double sum = 0, sum2 = 0;
    for (double l : s.eigs) sum += l, sum2 += l * l;
    CHECK(std::abs(sum - H.trace()) <= 1e-8 * 200);
    CHECK(std::abs(sum2 - H.frobenius_sq()) <= 1e-8 * 200);

    CHECK(lss(s, TestFunction::parse("poly(1)")) == 0.0);
    CHECK(std::abs(lss(s, TestFunction::parse("x")) - H.trace()) <= 1e-8 * 200);
    CHECK(std::abs(lss(s, TestFunction::parse("x2")) - (H.frobenius_sq() - 200)) <= 1e-8 * 200);

    const auto f = TestFunction::gauss(0.3, 0.7);
    const auto g = TestFunction::parse("poly(0.5,-1,0,2)");
    const auto h = TestFunction::closure([&](double x) { return 1.5 * f(x) - 0.25 * g(x); });
    CHECK(std::abs(lss(s, h) - (1.5 * lss(s, f) - 0.25 * lss(s, g))) <= 1e-10);
  }
}

TEST_CASE("lss rejects runaway eigenvalues") {
  CHECK_THROWS_AS(lss(sample_from_eigs({-1.0, 0.0, 6.0}), TestFunction::parse("x")), Error);
}

TEST_CASE("log characteristic field at eta = 0") {
  const auto spec = flat_spec(101, 1);
  const auto s = eigenvalues(sample(spec, 8, 0));
  const long N = s.size();

  const cplx L0 = log_char_field(s, 0.0, 0.0);
  long above = 0;
  double re = 0.0;
  for (double l : s.eigs) {
    above += l > 0.0;
    re += std::log(std::abs(l));
  }
  CHECK(L0.imag() == doctest::Approx(pi * (above - N / 2.0)).epsilon(1e-12));
  CHECK(L0.real() == doctest::Approx(re + N * 0.5).epsilon(1e-12));

  for (double E : {-1.3, 0.2, 1.1}) {
    const cplx L = log_char_field(s, E, 0.0);
    const double k = L.imag() / pi + N * (1.0 - semicircle::sc_cdf(E));
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }

  auto shuffled = s.eigs;
  std::mt19937 gen(1);
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  SpectralSample p;
  p.eigs = shuffled;
  CHECK(std::abs(log_char_field(p, 0.4, 0.0) - log_char_field(s, 0.4, 0.0)) < 1e-9);
  CHECK(std::abs(log_char_field(p, 0.4, 0.1) - log_char_field(s, 0.4, 0.1)) < 1e-9);

  CHECK_THROWS_AS(log_char_field(s, s.eigs[50], 0.0), Error);
  CHECK_THROWS_AS(log_char_field(s, 2.5, 0.0), Error);
  CHECK_THROWS_AS(log_char_field(s, 0.0, -0.1), Error);
}

TEST_CASE("log characteristic field for eta > 0") {
  const auto spec = flat_spec(80, 2);
  const auto s = eigenvalues(sample(spec, 9, 0));
  const long N = s.size();
  double prev = -1e300;
  for (double eta : {0.01, 0.1, 0.5, 1.0}) {
    const double E = 0.3;
    double direct = 0.0;
    cplx sum = 0.0;
    for (double l : s.eigs) {
      direct += 0.5 * std::log((l - E) * (l - E) + eta * eta);
      sum += std::log(cplx(E - l, eta));
    }
    CHECK(direct >= prev);
    prev = direct;
    // Deterministic part from quadrature of log(z - x) rho_sc.
    const double qr = oracle::sc_integral([&](double x) { return std::log(cplx(E - x, eta)).real(); }, E);
    const double qi = oracle::sc_integral([&](double x) { return std::log(cplx(E - x, eta)).imag(); }, E);
    const cplx L = log_char_field(s, E, eta);
    CHECK(std::abs(L - (sum - double(N) * cplx(qr, qi))) < 1e-7 * N);
  }
  // Small eta approaches the eta = 0 closed form.
  const cplx a = log_char_field(s, 0.3, 1e-10), b = log_char_field(s, 0.3, 0.0);
  CHECK(std::abs(a - b) < 1e-6);
}

TEST_CASE("rigidity statistics") {
  const long N = 400;
  std::vector<double> gam(N);
  for (long k = 1; k <= N; ++k) gam[k - 1] = semicircle::classical_location(k, N);
  const auto exact = rigidity_stats(sample_from_eigs(gam), 0.2);
  CHECK(exact.max == 0.0);
  CHECK(exact.min == 0.0);

  // Oracle: direct evaluation of the statistic on a perturbed spectrum.
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nd(0.0, 0.5 / N);
  auto eigs = gam;
  for (auto& l : eigs) l += nd(gen);
  std::sort(eigs.begin(), eigs.end());
  double mx = -1e300, mn = 1e300;
  for (long k = static_cast<long>(std::ceil(0.2 * N)); k <= static_cast<long>(std::floor(0.8 * N)); ++k) {
    const double c = (pi / std::sqrt(2.0)) * semicircle::rho_sc(gam[k - 1]) * N / std::log(double(N));
    mx = std::max(mx, c * (eigs[k - 1] - gam[k - 1]));
    mn = std::min(mn, c * (eigs[k - 1] - gam[k - 1]));
  }
  const auto r = rigidity_stats(sample_from_eigs(eigs), 0.2);
  CHECK(r.max == doctest::Approx(mx).epsilon(1e-12));
  CHECK(r.min == doctest::Approx(mn).epsilon(1e-12));

  // Reflection swaps max and -min up to the one-index offset of F(gamma_k) = k/N.
  auto refl = eigs;
  for (auto& l : refl) l = -l;
  std::sort(refl.begin(), refl.end());
  const auto rr = rigidity_stats(sample_from_eigs(refl), 0.2);
  const double shift = (pi / std::sqrt(2.0)) / std::log(double(N));
  CHECK(std::abs(rr.max + r.min) <= 1.5 * shift);
  CHECK(std::abs(rr.min + r.max) <= 1.5 * shift);

  CHECK_THROWS_AS(rigidity_stats(sample_from_eigs(eigs), 0.6), Error);
}

TEST_CASE("empirical Stieltjes transform") {
  const long N = 500;
  const auto spec = flat_spec(N, 1);
  const cplx z(0.0, 2.0);
  int good = 0;
  const int R = 20;
  for (int r = 0; r < R; ++r) {
    const auto s = eigenvalues(sample(spec, 31, r));
    const cplx m = empirical_stieltjes(s, z);
    if (std::abs(m - semicircle::msc(z)) <= std::pow(std::log(double(N)), 2) / (N * z.imag())) ++good;
    CHECK(m.imag() > 0);
    CHECK(std::abs(empirical_stieltjes(s, std::conj(z)) - std::conj(m)) < 1e-15);
  }
  CHECK(good >= 0.95 * R);
  CHECK_THROWS_AS(empirical_stieltjes(sample_from_eigs({0.0, 1.0}), cplx(0.5, 0.0)), Error);
}
