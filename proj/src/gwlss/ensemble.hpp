#pragma once

// Entry laws with closed-form cumulants, the (beta, S, laws) ensemble
// specification, its cumulant summaries, and seeded matrix sampling.

#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "gwlss/profile.hpp"
#include "gwlss/rng.hpp"

namespace gwlss {

enum class Family { Gaussian, Rademacher, TwoPoint, Uniform };

/// A standardized (mean 0, variance 1) entry law.
class EntryDistribution {
 public:
  static EntryDistribution gaussian();
  static EntryDistribution rademacher();
  /// (Bernoulli(p) - p) / sqrt(p (1 - p)).
  static EntryDistribution two_point(double p);
  /// Uniform on (-sqrt 3, sqrt 3).
  static EntryDistribution uniform();

  /// Builds from a family name ("gaussian", "rademacher", "two_point", "uniform").
  static EntryDistribution from_name(const std::string& family, double p = 0.5);

  Family family() const { return family_; }
  double p() const { return p_; }
  double kappa3() const { return kappa3_; }
  double kappa4() const { return kappa4_; }
  std::string name() const;

  /// One standardized variate from one Philox block.
  double draw(const rng::Counter& words) const;

 private:
  EntryDistribution(Family f, double p, double k3, double k4)
      : family_(f), p_(p), kappa3_(k3), kappa4_(k4) {}

  Family family_;
  double p_;
  double kappa3_;
  double kappa4_;
};

struct EnsembleSpec {
  int beta = 1;  // 1 real symmetric, 2 complex Hermitian
  std::shared_ptr<const VarianceProfile> profile;
  EntryDistribution offdiag = EntryDistribution::gaussian();
  EntryDistribution diag = EntryDistribution::gaussian();

  long size() const { return profile->size(); }
  void check() const;
  /// Stable 64-bit fingerprint of (beta, laws, S).
  std::uint64_t hash() const;
};

struct CumulantSummary {
  double s3_hat = 0.0;        // sum_i kappa3(H_ii)
  double s4_hat = 0.0;        // s4_hat_beta for the spec's beta
  double s3_tilde = 0.0;      // sqrt(N) * s3_hat
  double s4_tilde = 0.0;      // sum_{a != j} kappa4(H_aj), real case
  double s4_tilde_cplx = 0.0; // sum_{a != j} kappa4(Re H_aj) + kappa4(Im H_aj)
};

CumulantSummary cumulant_summary(const EnsembleSpec& spec);

/// A sampled Hermitian matrix; exactly one of the two members is populated.
struct SampledMatrix {
  int beta = 1;
  Eigen::MatrixXd real;
  Eigen::MatrixXcd complex;

  long size() const { return beta == 1 ? real.rows() : complex.rows(); }
  double trace() const;
  /// sum_{ij} |H_ij|^2
  double frobenius_sq() const;
};

/// H for replica `replica` of master seed `seed`. Entry (i, j), i <= j, is
/// addressed by counter, so the result is independent of call order.
SampledMatrix sample(const EnsembleSpec& spec, std::uint64_t seed, std::uint32_t replica);

}  // namespace gwlss
