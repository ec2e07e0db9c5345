#include "gwlss/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gwlss/error.hpp"
#include "gwlss/semicircle.hpp"

namespace gwlss {

namespace {

constexpr double kConservationTol = 1e-8;
constexpr double kSpectrumBound = 5.0;

template <class Matrix>
std::vector<double> solve(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

SpectralSample eigenvalues(const SampledMatrix& H, SampleSource source) {
  SpectralSample s;
  s.eigs = H.beta == 1 ? solve(H.real) : solve(H.complex);
  std::sort(s.eigs.begin(), s.eigs.end());
  s.trace = H.trace();
  s.frobenius_sq = H.frobenius_sq();
  s.source = source;

  double sum = 0.0;
  double sum_sq = 0.0;
  for (double l : s.eigs) {
    sum += l;
    sum_sq += l * l;
  }
  const double tol = kConservationTol * static_cast<double>(s.size());
  if (std::abs(sum - s.trace) > tol || std::abs(sum_sq - s.frobenius_sq) > tol) {
    std::ostringstream os;
    os << "eigenvalue conservation check failed (replica " << source.replica << ", seed "
       << source.seed << "): sum " << sum << " vs trace " << s.trace << ", sum of squares "
       << sum_sq << " vs " << s.frobenius_sq;
    fail(ErrorKind::Numerical, os.str());
  }
  return s;
}

SpectralSample sample_from_eigs(std::vector<double> eigs) {
  SpectralSample s;
  std::sort(eigs.begin(), eigs.end());
  for (double l : eigs) {
    s.trace += l;
    s.frobenius_sq += l * l;
  }
  s.eigs = std::move(eigs);
  return s;
}

double lss(const SpectralSample& s, const TestFunction& f) {
  double acc = 0.0;
  for (double l : s.eigs) {
    if (!(std::abs(l) <= kSpectrumBound)) {
      std::ostringstream os;
      os << "eigenvalue " << l << " outside [-5, 5] (replica " << s.source.replica << ")";
      fail(ErrorKind::Numerical, os.str());
    }
    const double v = f(l);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << f.name() << " is not finite at eigenvalue " << l;
      fail(ErrorKind::Numerical, os.str());
    }
    acc += v;
  }
  const double centre = f.semicircle_mean();
  if (!std::isfinite(centre)) fail(ErrorKind::Numerical, f.name() + ": semicircle mean is not finite");
  return acc - static_cast<double>(s.size()) * centre;
}

cplx log_char_field(const SpectralSample& s, double E, double eta) {
  require(eta >= 0.0, "log_char_field: eta must be >= 0");
  const double N = static_cast<double>(s.size());
  if (eta == 0.0) {
    require(std::abs(E) < 2.0, "log_char_field: E must lie in (-2, 2) at eta = 0");
    double re = 0.0;
    long above = 0;
    for (double l : s.eigs) {
      if (l == E) {
        std::ostringstream os;
        os.precision(17);
        os << "log_char_field: E = " << E << " coincides with an eigenvalue";
        fail(ErrorKind::Numerical, os.str());
      }
      re += std::log(std::abs(l - E));
      if (l > E) ++above;
    }
    const auto pot = semicircle::log_potential(E);
    return {re - N * pot.re, std::numbers::pi * static_cast<double>(above) - N * pot.im};
  }
  double re = 0.0;
  double im = 0.0;
  for (double l : s.eigs) {
    const double d = E - l;
    re += 0.5 * std::log(d * d + eta * eta);
    im += std::atan2(eta, d);
  }
  return cplx(re, im) - N * semicircle::log_potential_complex({E, eta});
}

RigidityStats rigidity_stats(const SpectralSample& s, double kappa) {
  require(kappa > 0.0 && kappa < 0.5, "rigidity_stats: kappa must lie in (0, 1/2)");
  const long N = s.size();
  require(N >= 2, "rigidity_stats: need N >= 2");
  const double n = static_cast<double>(N);
  const double scale = std::numbers::pi / std::sqrt(2.0) * n / std::log(n);
  const long k_lo = std::max(1L, static_cast<long>(std::ceil(kappa * n)));
  const long k_hi = std::min(N, static_cast<long>(std::floor((1.0 - kappa) * n)));
  RigidityStats r{-HUGE_VAL, HUGE_VAL};
  for (long k = k_lo; k <= k_hi; ++k) {
    const double gamma = semicircle::classical_location(k, N);
    const double v = scale * semicircle::rho_sc(gamma) * (s.eigs[k - 1] - gamma);
    r.max = std::max(r.max, v);
    r.min = std::min(r.min, v);
  }
  return r;
}

cplx empirical_stieltjes(const SpectralSample& s, cplx z) {
  require(z.imag() != 0.0, "empirical_stieltjes: z must be off the real axis");
  cplx acc = 0.0;
  for (double l : s.eigs) acc += 1.0 / (l - z);
  return acc / static_cast<double>(s.size());
}

}  // namespace gwlss
