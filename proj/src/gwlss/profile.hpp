#pragma once

// Doubly stochastic variance profiles S_ij = E|H_ij|^2 and their spectral
// data. The Perron pair (1, e/sqrt(N)) is split off as S = A + N^{-1} e e*;
// everything downstream works from the eigenvalues of S and of A.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gwlss {

using cplx = std::complex<double>;

struct ProfileReport {
  double row_sum_err;   // max_j |sum_i S_ij - 1|
  double min_entry_n;   // N * min S_ij
  double max_entry_n;   // N * max S_ij
  double spectral_gap;  // 1 - s_2
};

/// Checks a candidate variance matrix. Throws when the row sums are off by
/// more than 1e-8 or an entry is not strictly positive.
ProfileReport validate(const Eigen::MatrixXd& S);

/// Constructor arguments, kept for provenance and the JSON descriptor.
struct ProfileDescriptor {
  ProfileDescriptor() = default;
  ProfileDescriptor(std::string t, long n = 0) : type(std::move(t)), N(n) {}

  std::string type;  // flat | band | random | matrix
  long N = 0;
  long W = 0;
  double roughness = 0.0;
  std::uint64_t seed = 0;
  std::string path;
};

class VarianceProfile {
 public:
  /// Takes ownership of S and decomposes it. Enforces exact symmetry,
  /// strict positivity and |row sum - 1| <= 1e-10.
  explicit VarianceProfile(Eigen::MatrixXd S, ProfileDescriptor descriptor = {"matrix"});

  long size() const { return static_cast<long>(S_.rows()); }
  const Eigen::MatrixXd& matrix() const { return S_; }
  const ProfileDescriptor& descriptor() const { return descriptor_; }
  const ProfileReport& report() const { return report_; }

  /// Eigenvalues in descending order; spectrum()[0] is the Perron value.
  const std::vector<double>& spectrum() const { return spectrum_; }
  /// Eigenvalues of A = S - N^{-1} e e*, i.e. the spectrum with the Perron
  /// value removed (descending).
  const std::vector<double>& a_spectrum() const { return a_spectrum_; }
  /// max |a_i|; the deflated part has norm <= a_radius() < 1.
  double a_radius() const { return a_radius_; }
  double c_low() const { return report_.min_entry_n; }
  double c_high() const { return report_.max_entry_n; }

  double trace() const { return trace_; }

  /// tr S^j for j = 1..J.
  std::vector<double> trace_powers(int J) const;

  /// tr(S (1 - M S)^{-1}) from the eigenvalues. Throws if some
  /// |1 - M s_i| <= 1e-10.
  cplx resolvent_trace(cplx M) const;

  /// Same quantity via the Sherman-Morrison split
  /// tr(S (1 - M A)^{-1}) + M / (1 - M).
  cplx resolvent_trace_split(cplx M) const;

  /// sum_i M a_i / (1 - M a_i)^2 = tr(M A (1 - M A)^{-2}).
  cplx deflated_kernel(cplx M) const;

  /// Dense matrix A = S - N^{-1} e e*.
  Eigen::MatrixXd deflated_matrix() const;

 private:
  Eigen::MatrixXd S_;
  ProfileDescriptor descriptor_;
  ProfileReport report_{};
  std::vector<double> spectrum_;
  std::vector<double> a_spectrum_;
  double a_radius_ = 0.0;
  double trace_ = 0.0;
};

VarianceProfile profile_flat(long N);

/// Circulant band of half-width W blended with the flat profile,
/// S = (1 - eps0) S_band + eps0 / N, eps0 = 1e-3.
VarianceProfile profile_band(long N, long W);

inline constexpr double kBandBlend = 1e-3;

/// Symmetric Sinkhorn scaling of M_ij = exp(roughness * g_ij), g symmetric
/// standard normal drawn from `seed`.
VarianceProfile profile_random_ds(long N, std::uint64_t seed, double roughness);

/// Rebuilds a profile from its descriptor (flat, band, random, or a matrix CSV path).
VarianceProfile profile_from_descriptor(const ProfileDescriptor& d);

}  // namespace gwlss
