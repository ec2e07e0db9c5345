#pragma once

// Per-sample spectral quantities: eigenvalues, linear statistics, the
// log-characteristic-polynomial field and rigidity of individual eigenvalues.

#include <complex>
#include <cstdint>
#include <vector>

#include "gwlss/ensemble.hpp"
#include "gwlss/testfn.hpp"

namespace gwlss {

struct SampleSource {
  std::uint64_t spec_hash = 0;
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
};

struct SpectralSample {
  std::vector<double> eigs;  // ascending
  double trace = 0.0;        // tr H
  double frobenius_sq = 0.0; // sum |H_ij|^2
  SampleSource source;

  long size() const { return static_cast<long>(eigs.size()); }
};

/// Dense eigensolve. Throws Numerical if the solver fails or the trace and
/// Frobenius identities are violated by more than 1e-8 N.
SpectralSample eigenvalues(const SampledMatrix& H, SampleSource source = {});

/// Builds a sample from a precomputed spectrum (sorted on entry).
SpectralSample sample_from_eigs(std::vector<double> eigs);

/// sum_i f(lambda_i) - N * integral f rho_sc.
double lss(const SpectralSample& s, const TestFunction& f);

/// L_N(E + i eta) = sum_j log(z - lambda_j) - N integral log(z - x) rho_sc(x) dx.
cplx log_char_field(const SpectralSample& s, double E, double eta);

struct RigidityStats {
  double max;  // max_k c_k (lambda_k - gamma_k)
  double min;  // min_k of the same statistic
};

/// Extremes of (pi/sqrt 2) rho_sc(gamma_k) N (lambda_k - gamma_k) / log N
/// over kappa N <= k <= (1 - kappa) N.
RigidityStats rigidity_stats(const SpectralSample& s, double kappa);

/// N^{-1} sum_j 1 / (lambda_j - z), Im z != 0.
cplx empirical_stieltjes(const SpectralSample& s, cplx z);

}  // namespace gwlss
