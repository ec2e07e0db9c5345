#include "gwlss/ensemble.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "gwlss/error.hpp"

namespace gwlss {

EntryDistribution EntryDistribution::gaussian() { return {Family::Gaussian, 0.5, 0.0, 0.0}; }

EntryDistribution EntryDistribution::rademacher() { return {Family::Rademacher, 0.5, 0.0, -2.0}; }

EntryDistribution EntryDistribution::two_point(double p) {
  require(p > 0.0 && p < 1.0, "two_point: p must lie in (0, 1)");
  const double v = p * (1.0 - p);
  return {Family::TwoPoint, p, (1.0 - 2.0 * p) / std::sqrt(v), (1.0 - 6.0 * v) / v};
}

EntryDistribution EntryDistribution::uniform() { return {Family::Uniform, 0.5, 0.0, -1.2}; }

EntryDistribution EntryDistribution::from_name(const std::string& family, double p) {
  if (family == "gaussian") return gaussian();
  if (family == "rademacher") return rademacher();
  if (family == "two_point") return two_point(p);
  if (family == "uniform") return uniform();
  fail(ErrorKind::Config, "unknown entry family '" + family + "'");
}

std::string EntryDistribution::name() const {
  switch (family_) {
    case Family::Gaussian:
      return "gaussian";
    case Family::Rademacher:
      return "rademacher";
    case Family::TwoPoint:
      return "two_point";
    case Family::Uniform:
      return "uniform";
  }
  return "?";
}

double EntryDistribution::draw(const rng::Counter& words) const {
  switch (family_) {
    case Family::Gaussian:
      return rng::standard_normal(words);
    case Family::Rademacher:
      return (words[0] & 1u) ? 1.0 : -1.0;
    case Family::TwoPoint: {
      const double u = rng::uniforms(words).u0;
      const double q = 1.0 - p_;
      const double s = std::sqrt(p_ * q);
      return u < p_ ? q / s : -p_ / s;
    }
    case Family::Uniform:
      return std::sqrt(3.0) * (2.0 * rng::uniforms(words).u0 - 1.0);
  }
  return 0.0;
}

void EnsembleSpec::check() const {
  require(beta == 1 || beta == 2, "ensemble beta must be 1 or 2");
  require(profile != nullptr, "ensemble has no variance profile");
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

std::uint64_t EnsembleSpec::hash() const {
  check();
  std::uint64_t h = 0xCBF29CE484222325ull;
  const double head[] = {static_cast<double>(beta), static_cast<double>(offdiag.family()),
                         offdiag.p(), static_cast<double>(diag.family()), diag.p()};
  h = fnv1a(h, head, sizeof(head));
  const auto& S = profile->matrix();
  return fnv1a(h, S.data(), sizeof(double) * static_cast<std::size_t>(S.size()));
}

CumulantSummary cumulant_summary(const EnsembleSpec& spec) {
  spec.check();
  const auto& S = spec.profile->matrix();
  const long N = spec.size();
  const double k3d = spec.diag.kappa3();
  const double k4d = spec.diag.kappa4();
  const double k4o = spec.offdiag.kappa4();

  double diag3 = 0.0;
  double diag4 = 0.0;
  double off4 = 0.0;
  for (long i = 0; i < N; ++i) {
    diag3 += std::pow(S(i, i), 1.5) * k3d;
    diag4 += S(i, i) * S(i, i) * k4d;
    for (long j = 0; j < N; ++j)
      if (j != i) off4 += S(i, j) * S(i, j);
  }
  off4 *= k4o;

  CumulantSummary c;
  c.s3_hat = diag3;
  c.s3_tilde = std::sqrt(static_cast<double>(N)) * diag3;
  c.s4_tilde = off4;
  // kappa4(Re H_ij) = kappa4(Im H_ij) = (S_ij / 2)^2 kappa4(offdiag).
  c.s4_tilde_cplx = 0.5 * off4;
  c.s4_hat = spec.beta == 1 ? off4 + diag4 : 0.5 * off4 + 0.5 * diag4;
  return c;
}

double SampledMatrix::trace() const {
  return beta == 1 ? real.trace() : complex.trace().real();
}

double SampledMatrix::frobenius_sq() const {
  return beta == 1 ? real.squaredNorm() : complex.squaredNorm();
}

SampledMatrix sample(const EnsembleSpec& spec, std::uint64_t seed, std::uint32_t replica) {
  spec.check();
  const auto& S = spec.profile->matrix();
  const long N = spec.size();
  const auto key = rng::key_from_seed(seed);
  auto words = [&](long i, long j, std::uint32_t draw) {
    const auto idx = static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(N) + j;
    return rng::block(key, rng::Stream::MatrixEntry, replica, idx, draw);
  };

  SampledMatrix H;
  H.beta = spec.beta;
  if (spec.beta == 1) {
    H.real.resize(N, N);
    for (long i = 0; i < N; ++i) {
      H.real(i, i) = std::sqrt(S(i, i)) * spec.diag.draw(words(i, i, 0));
      for (long j = i + 1; j < N; ++j)
        H.real(i, j) = H.real(j, i) = std::sqrt(S(i, j)) * spec.offdiag.draw(words(i, j, 0));
    }
    return H;
  }
  H.complex.resize(N, N);
  for (long i = 0; i < N; ++i) {
    H.complex(i, i) = std::sqrt(S(i, i)) * spec.diag.draw(words(i, i, 0));
    for (long j = i + 1; j < N; ++j) {
      const double s = std::sqrt(0.5 * S(i, j));
      const cplx h(s * spec.offdiag.draw(words(i, j, 0)), s * spec.offdiag.draw(words(i, j, 1)));
      H.complex(i, j) = h;
      H.complex(j, i) = std::conj(h);
    }
  }
  return H;
}

}  // namespace gwlss
