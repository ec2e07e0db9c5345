#include "gwlss/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gwlss/error.hpp"
#include "gwlss/rng.hpp"

namespace gwlss {

namespace {

constexpr double kValidateRowTol = 1e-8;
constexpr double kProfileRowTol = 1e-10;
constexpr double kSinkhornTol = 1e-12;
constexpr int kSinkhornMaxIter = 10000;
constexpr double kResolventGuard = 1e-10;

// Row sums, entry bounds and positivity; the spectral gap is filled in later.
ProfileReport check_entries(const Eigen::MatrixXd& S) {
  require(S.rows() == S.cols(), "variance profile must be square");
  require(S.rows() >= 2, "variance profile needs N >= 2");
  const double N = static_cast<double>(S.rows());
  ProfileReport r{};
  r.row_sum_err = (S.rowwise().sum().array() - 1.0).abs().maxCoeff();
  r.row_sum_err = std::max(r.row_sum_err, (S.colwise().sum().array() - 1.0).abs().maxCoeff());
  r.min_entry_n = S.minCoeff() * N;
  r.max_entry_n = S.maxCoeff() * N;
  if (!(r.min_entry_n > 0.0)) {
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    S.minCoeff(&i, &j);
    std::ostringstream os;
    os << "variance profile entry S(" << i << "," << j << ") = " << S(i, j)
       << " is not strictly positive";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  if (!(r.row_sum_err <= kValidateRowTol)) {
    std::ostringstream os;
    os << "variance profile is not doubly stochastic: max |row sum - 1| = " << r.row_sum_err;
    fail(ErrorKind::InvalidArgument, os.str());
  }
  return r;
}

}  // namespace

ProfileReport validate(const Eigen::MatrixXd& S) {
  ProfileReport r = check_entries(S);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending
  r.spectral_gap = 1.0 - ev(ev.size() - 2);
  return r;
}

VarianceProfile::VarianceProfile(Eigen::MatrixXd S, ProfileDescriptor descriptor)
    : S_(std::move(S)), descriptor_(std::move(descriptor)) {
  report_ = check_entries(S_);
  const long N = size();
  for (long i = 0; i < N; ++i)
    for (long j = i + 1; j < N; ++j)
      require(S_(i, j) == S_(j, i), "variance profile is not exactly symmetric");
  if (report_.row_sum_err > kProfileRowTol) {
    std::ostringstream os;
    os << "variance profile row sums deviate by " << report_.row_sum_err << " > 1e-10";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  descriptor_.N = N;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S_);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "profile eigensolver failed");
  const Eigen::VectorXd e = Eigen::VectorXd::Constant(N, 1.0 / std::sqrt(static_cast<double>(N)));
  Eigen::Index perron = 0;
  (es.eigenvectors().transpose() * e).cwiseAbs().maxCoeff(&perron);

  spectrum_.assign(es.eigenvalues().data(), es.eigenvalues().data() + N);
  std::sort(spectrum_.begin(), spectrum_.end(), std::greater<>());
  for (long i = 0; i < N; ++i)
    if (i != perron) a_spectrum_.push_back(es.eigenvalues()(i));
  std::sort(a_spectrum_.begin(), a_spectrum_.end(), std::greater<>());

  const double s_perron = es.eigenvalues()(perron);
  if (std::abs(s_perron - 1.0) > 1e-9)
    fail(ErrorKind::Numerical, "Perron eigenvalue of the profile deviates from 1");
  a_radius_ = 0.0;
  for (double a : a_spectrum_) a_radius_ = std::max(a_radius_, std::abs(a));
  if (!(a_radius_ < 1.0))
    fail(ErrorKind::InvalidArgument, "variance profile has no spectral gap (|a| >= 1)");
  report_.spectral_gap = 1.0 - spectrum_[1];
  trace_ = S_.trace();
}

std::vector<double> VarianceProfile::trace_powers(int J) const {
  require(J >= 1, "trace_powers: J >= 1");
  std::vector<double> out(J, 0.0);
  for (double s : spectrum_) {
    double p = 1.0;
    for (int j = 0; j < J; ++j) {
      p *= s;
      out[j] += p;
    }
  }
  return out;
}

cplx VarianceProfile::resolvent_trace(cplx M) const {
  cplx acc = 0.0;
  for (double s : spectrum_) {
    const cplx d = 1.0 - M * s;
    if (std::abs(d) <= kResolventGuard) {
      std::ostringstream os;
      os.precision(17);
      os << "resolvent_trace: 1 - M s is singular for eigenvalue s = " << s << " at M = " << M;
      fail(ErrorKind::Numerical, os.str());
    }
    acc += s / d;
  }
  return acc;
}

cplx VarianceProfile::resolvent_trace_split(cplx M) const {
  // tr(S (1 - M A)^{-1}): on e the inverse is the identity (A e = 0), so the
  // Perron direction contributes 1; the rest is sum a/(1 - M a).
  const cplx perron_gap = 1.0 - M;
  if (std::abs(perron_gap) <= kResolventGuard)
    fail(ErrorKind::Numerical, "resolvent_trace_split: M too close to 1 (Perron direction)");
  cplx acc = 1.0;
  for (double a : a_spectrum_) acc += a / (1.0 - M * a);
  return acc + M / perron_gap;
}

cplx VarianceProfile::deflated_kernel(cplx M) const {
  cplx acc = 0.0;
  for (double a : a_spectrum_) {
    const cplx d = 1.0 - M * a;
    acc += M * a / (d * d);
  }
  return acc;
}

Eigen::MatrixXd VarianceProfile::deflated_matrix() const {
  const double N = static_cast<double>(size());
  return S_.array() - 1.0 / N;
}

VarianceProfile profile_flat(long N) {
  require(N >= 2, "profile_flat: N >= 2");
  Eigen::MatrixXd S = Eigen::MatrixXd::Constant(N, N, 1.0 / static_cast<double>(N));
  return VarianceProfile(std::move(S), {"flat", N});
}

VarianceProfile profile_band(long N, long W) {
  require(N >= 3, "profile_band: N >= 3");
  require(W >= 1 && 2 * W + 1 <= N, "profile_band: need 1 <= W <= (N-1)/2");
  const double band = (1.0 - kBandBlend) / static_cast<double>(2 * W + 1);
  const double flat = kBandBlend / static_cast<double>(N);
  Eigen::MatrixXd S(N, N);
  for (long i = 0; i < N; ++i) {
    for (long j = 0; j < N; ++j) {
      const long d = std::abs(i - j);
      const long circ = std::min(d, N - d);
      S(i, j) = (circ <= W ? band : 0.0) + flat;
    }
  }
  ProfileDescriptor desc{"band", N};
  desc.W = W;
  return VarianceProfile(std::move(S), desc);
}

VarianceProfile profile_random_ds(long N, std::uint64_t seed, double roughness) {
  require(N >= 2, "profile_random_ds: N >= 2");
  require(roughness >= 0.0 && roughness <= 1.0, "profile_random_ds: roughness in [0, 1]");
  const auto key = rng::key_from_seed(seed);
  Eigen::MatrixXd M(N, N);
  for (long i = 0; i < N; ++i) {
    for (long j = i; j < N; ++j) {
      const auto idx = static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(N) + j;
      const double g =
          rng::standard_normal(rng::block(key, rng::Stream::ProfileNoise, 0, idx, 0));
      M(i, j) = M(j, i) = std::exp(roughness * g);
    }
  }
  // Symmetric Sinkhorn: S = D M D with d_i <- sqrt(d_i / (M d)_i), whose
  // fixed point has d_i (M d)_i = 1.
  Eigen::VectorXd d = M.rowwise().sum().cwiseSqrt().cwiseInverse();
  double residual = 0.0;
  int iter = 0;
  for (; iter < kSinkhornMaxIter; ++iter) {
    const Eigen::VectorXd Md = M * d;
    residual = (d.cwiseProduct(Md).array() - 1.0).abs().maxCoeff();
    if (residual < kSinkhornTol) break;
    d = d.cwiseQuotient(Md).cwiseSqrt();
  }
  if (iter == kSinkhornMaxIter) {
    std::ostringstream os;
    os << "Sinkhorn scaling did not converge in " << kSinkhornMaxIter
       << " iterations (residual " << residual << ")";
    fail(ErrorKind::Numerical, os.str());
  }
  Eigen::MatrixXd S(N, N);
  for (long i = 0; i < N; ++i)
    for (long j = i; j < N; ++j) S(i, j) = S(j, i) = d(i) * M(i, j) * d(j);
  ProfileDescriptor desc{"random", N};
  desc.seed = seed;
  desc.roughness = roughness;
  return VarianceProfile(std::move(S), desc);
}

}  // namespace gwlss
