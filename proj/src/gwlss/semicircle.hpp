#pragma once

// Closed-form quantities of the semicircle law
//   rho_sc(x) = sqrt((4 - x^2)_+) / (2 pi)
// and of its Stieltjes transform m_sc(z), the root of m^2 + z m + 1 = 0
// lying in the closed unit disk.

#include <complex>

namespace gwlss::semicircle {

using cplx = std::complex<double>;

enum class Side { Upper, Lower, BoundaryFromAbove };

/// A spectral parameter z = E + i eta, together with the side from which a
/// real-axis point is approached.
struct SpectralPoint {
  cplx z;
  Side side = Side::Upper;

  static SpectralPoint boundary(double x);
};

/// m_sc(z) for Im z != 0. Throws for real z; use msc_boundary there.
cplx msc(cplx z);

/// m_sc(x + i0) = (-x + i sqrt(4 - x^2)) / 2 for |x| < 2.
cplx msc_boundary(double x);

/// Evaluates a SpectralPoint, dispatching to the boundary form when needed.
cplx msc(const SpectralPoint& p);

/// (m_sc(z) - m_sc(w)) / (z - w). Throws when z == w.
cplx msc_diff_quotient(cplx z, cplx w);

/// m_sc'(z) = m^2 / (1 - m^2).
cplx msc_derivative(cplx z);

double rho_sc(double x);

/// F_sc(E) = integral of rho_sc over (-inf, E].
double sc_cdf(double E);

/// gamma_k with F_sc(gamma_k) = k / N, by bisection to 1e-12.
double classical_location(long k, long N);

struct LogPotential {
  double re;  // integral of log|E - x| rho_sc(x) dx
  double im;  // integral of Im log(E - x) rho_sc(x) dx, branch (-pi, pi]
};

/// Logarithmic potential on the bulk (|E| < 2).
LogPotential log_potential(double E);

/// N^{-1}-normalized centering of the log-characteristic polynomial:
/// integral of log(z - x) rho_sc(x) dx for Im z > 0, principal branch.
/// Closed form m^2/2 - log(-m) with m = m_sc(z).
cplx log_potential_complex(cplx z);

/// Semicircle moments: integral of x^k rho_sc(x) dx (Catalan numbers).
double moment(int k);

}  // namespace gwlss::semicircle
