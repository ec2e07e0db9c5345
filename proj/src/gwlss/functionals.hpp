#pragma once

// Deterministic functionals of the linear-spectral-statistic CLT:
//   V_beta(f)  variance (Chebyshev series and double-integral routes),
//   E_beta(f)  mean correction,
//   B(f)       cubic term,
// and the closed-form log-kernel L(z, w) for log test functions.

#include <complex>
#include <string>

#include "gwlss/ensemble.hpp"
#include "gwlss/profile.hpp"
#include "gwlss/testfn.hpp"

namespace gwlss {

struct SeriesVariance {
  double value = 0.0;
  double truncation_bound = 0.0;  // (1/2beta) * tail * sup_j tr S^j
  bool tail_dominates = false;    // truncation_bound > 10% of |value|
};

/// V_beta(f) = (1/2beta) sum_j j t_j^2 tr S^j - ((2-beta)/4) t_1^2 tr S
///           + (s4/2) t_2^2 + (s3/2) t_1 t_2.
SeriesVariance variance_series(const ChebCoeffs& t, const VarianceProfile& profile,
                               const CumulantSummary& summary, int beta);

struct IntegralOptions {
  int nodes_x = 400;
  int nodes_y = 401;  // distinct from nodes_x so x_j never equals y_k
};

/// The same V_beta(f) from the double-integral representation with kernel
/// (4 - xy) / (sqrt(4-x^2) sqrt(4-y^2)) and the deflated correction g(x, y).
double variance_integral(const TestFunction& f, const VarianceProfile& profile,
                         const CumulantSummary& summary, int beta,
                         const IntegralOptions& opt = {});

/// g(x, y) built from the deflated spectrum, |x|, |y| < 2.
double deflated_g(const VarianceProfile& profile, double x, double y);

/// E_beta(f), evaluated on `nodes` Gauss-Chebyshev nodes.
double mean_correction(const TestFunction& f, const VarianceProfile& profile,
                       const CumulantSummary& summary, int beta, int nodes = 800);

/// B(f) = (s3/8) t_1^3.
double cubic_term(const ChebCoeffs& t, const CumulantSummary& summary);

struct CltPrediction {
  double V = 0.0;
  double E = 0.0;
  double B = 0.0;
  int beta = 1;
  std::string provenance = "series";
  int J = 0;
  double tail_estimate = 0.0;
  double truncation_bound = 0.0;
  bool tail_warning = false;
  bool has_integral = false;
  double V_integral = 0.0;
  bool paths_agree = true;
};

/// exp(-lambda^2 V / 2 + i lambda^3 B / 3 + i lambda E).
cplx predicted_char(double lambda, const CltPrediction& pred);

struct PredictedCumulants {
  double k1;          // E
  double k2;          // V
  double k3_taylor;   // -2B, from matching log phi against the exponent
  double k3_magnitude;  // 2|B|
};

PredictedCumulants predicted_cumulants(const CltPrediction& pred);

struct PredictOptions {
  int J = 256;
  int M = 2048;
  int J_max = 8192;
  bool with_integral = true;
  IntegralOptions integral;
  int mean_nodes = 800;
};

/// Coefficients with J grown until the last decade of sum j t_j^2 tr S^j is
/// below 1e-9 of the partial sum (or J_max is reached).
ChebCoeffs adaptive_coeffs(const TestFunction& f, const VarianceProfile& profile,
                           const PredictOptions& opt = {});

/// Full prediction (V by both routes when requested, E, B).
CltPrediction predict(const TestFunction& f, const EnsembleSpec& spec,
                      const PredictOptions& opt = {});

/// Paths agree when |series - integral| <= max(1e-5 V, 1e-7).
bool variance_paths_agree(double series, double integral);

/// L(z, w) = 2 pi^2 log[(z + R(z))(w + R(w)) / (2 (zw - 4 + R(z) R(w)))],
/// R(z) = sqrt(z^2 - 4) with its cut on [-2, 2].
cplx L_kernel(cplx z, cplx w);

/// V_GbetaE of Re log(z - .) or Im log(z - .) through L.
double gbe_log_variance(cplx z, int beta, LogPart part);

}  // namespace gwlss
