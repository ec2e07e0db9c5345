#include "gwlss/semicircle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gwlss/error.hpp"

namespace gwlss::semicircle {

using std::numbers::pi;

SpectralPoint SpectralPoint::boundary(double x) {
  require(std::abs(x) < 2.0, "boundary spectral point requires |x| < 2");
  return SpectralPoint{cplx(x, 0.0), Side::BoundaryFromAbove};
}

cplx msc(cplx z) {
  require(z.imag() != 0.0, "msc: real argument, use msc_boundary");
  // Roots of m^2 + z m + 1 have product 1. Take the large-modulus root
  // without cancellation and invert it.
  const cplx r = std::sqrt((z - 2.0) * (z + 2.0));
  const cplx s = (std::real(std::conj(z) * r) >= 0.0) ? r : -r;
  const cplx q = -0.5 * (z + s);
  return 1.0 / q;
}

cplx msc_boundary(double x) {
  require(std::abs(x) < 2.0, "msc_boundary requires |x| < 2");
  return cplx(-0.5 * x, 0.5 * std::sqrt((2.0 - x) * (2.0 + x)));
}

cplx msc(const SpectralPoint& p) {
  switch (p.side) {
    case Side::BoundaryFromAbove:
      return msc_boundary(p.z.real());
    case Side::Upper:
    case Side::Lower:
      break;
  }
  return msc(p.z);
}

cplx msc_diff_quotient(cplx z, cplx w) {
  require(z != w, "msc_diff_quotient: z == w, use msc_derivative");
  return (msc(z) - msc(w)) / (z - w);
}

cplx msc_derivative(cplx z) {
  const cplx m = msc(z);
  return m * m / (1.0 - m * m);
}

double rho_sc(double x) {
  const double v = (2.0 - x) * (2.0 + x);
  return v > 0.0 ? std::sqrt(v) / (2.0 * pi) : 0.0;
}

double sc_cdf(double E) {
  if (E <= -2.0) return 0.0;
  if (E >= 2.0) return 1.0;
  const double F = 0.5 + E * std::sqrt((2.0 - E) * (2.0 + E)) / (4.0 * pi) +
                   std::asin(0.5 * E) / pi;
  return std::clamp(F, 0.0, 1.0);
}

double classical_location(long k, long N) {
  require(N >= 1 && k >= 1 && k <= N, "classical_location: need 1 <= k <= N");
  if (k == N) return 2.0;
  const double target = static_cast<double>(k) / static_cast<double>(N);
  double lo = -2.0;
  double hi = 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (sc_cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

LogPotential log_potential(double E) {
  require(std::abs(E) < 2.0, "log_potential requires |E| < 2");
  return {0.25 * E * E - 0.5, pi * (1.0 - sc_cdf(E))};
}

cplx log_potential_complex(cplx z) {
  require(z.imag() > 0.0, "log_potential_complex requires Im z > 0");
  const cplx m = msc(z);
  return 0.5 * m * m - std::log(-m);
}

double moment(int k) {
  require(k >= 0, "moment: negative order");
  if (k % 2 != 0) return 0.0;
  double c = 1.0;
  for (int n = 0; n < k / 2; ++n) c = c * 2.0 * (2.0 * n + 1.0) / (n + 2.0);
  return c;
}

}  // namespace gwlss::semicircle
