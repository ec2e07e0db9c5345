#include "gwlss/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gwlss/error.hpp"
#include "gwlss/semicircle.hpp"

namespace gwlss {

using std::numbers::pi;

namespace {

void check_beta(int beta) { require(beta == 1 || beta == 2, "beta must be 1 or 2"); }

double coeff(const ChebCoeffs& t, int n) {
  return n < static_cast<int>(t.t.size()) ? t.t[n] : 0.0;
}

// The beta-dependent low-order corrections shared by both variance routes.
double low_order_terms(double t1, double t2, const VarianceProfile& profile,
                       const CumulantSummary& summary, int beta) {
  return -0.25 * (2 - beta) * t1 * t1 * profile.trace() + 0.5 * summary.s4_hat * t2 * t2 +
         0.5 * summary.s3_hat * t1 * t2;
}

}  // namespace

SeriesVariance variance_series(const ChebCoeffs& t, const VarianceProfile& profile,
                               const CumulantSummary& summary, int beta) {
  check_beta(beta);
  const int J = static_cast<int>(t.t.size()) - 1;
  double sum = 0.0;
  double sup_tr = 1.0;
  if (J >= 1) {
    const auto tr = profile.trace_powers(J);
    for (int j = 1; j <= J; ++j) {
      sum += j * t.t[j] * t.t[j] * tr[j - 1];
      sup_tr = std::max(sup_tr, std::abs(tr[j - 1]));
    }
  }
  SeriesVariance out;
  out.value = sum / (2.0 * beta) +
              low_order_terms(coeff(t, 1), coeff(t, 2), profile, summary, beta);
  out.truncation_bound = t.tail_estimate * sup_tr / (2.0 * beta);
  out.tail_dominates = out.truncation_bound > 0.1 * std::abs(out.value);
  return out;
}

double deflated_g(const VarianceProfile& profile, double x, double y) {
  const cplx mx = semicircle::msc_boundary(x);
  const cplx my = semicircle::msc_boundary(y);
  return (profile.deflated_kernel(mx * my) + profile.deflated_kernel(mx * std::conj(my))).real();
}

double variance_integral(const TestFunction& f, const VarianceProfile& profile,
                         const CumulantSummary& summary, int beta, const IntegralOptions& opt) {
  check_beta(beta);
  require(opt.nodes_x >= 2 && opt.nodes_y >= 2, "variance_integral: too few nodes");
  const auto xs = gauss_chebyshev_nodes(opt.nodes_x);
  const auto ys = gauss_chebyshev_nodes(opt.nodes_y);
  std::vector<double> fx(xs.size());
  std::vector<double> fy(ys.size());
  std::vector<double> dfx(xs.size());
  std::vector<cplx> mx(xs.size());
  std::vector<cplx> my(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fx[i] = f(xs[i]);
    dfx[i] = f.derivative(xs[i], 1);
    mx[i] = semicircle::msc_boundary(xs[i]);
  }
  for (std::size_t k = 0; k < ys.size(); ++k) {
    fy[k] = f(ys[k]);
    my[k] = semicircle::msc_boundary(ys[k]);
  }
  const bool deflated = profile.a_radius() > 0.0;

  double flat = 0.0;
  double corr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double row_flat = 0.0;
    double row_corr = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const double dx = xs[i] - ys[k];
      // The kernel singularity at x = y is removable: the limit is f'(x)^2.
      const double q = dx != 0.0 ? (fx[i] - fy[k]) / dx : dfx[i];
      row_flat += q * q * (4.0 - xs[i] * ys[k]);
      if (deflated) {
        const cplx g = profile.deflated_kernel(mx[i] * my[k]) +
                       profile.deflated_kernel(mx[i] * std::conj(my[k]));
        row_corr += fy[k] * g.real();
      }
    }
    flat += row_flat;
    corr += fx[i] * row_corr;
  }
  const double norm = static_cast<double>(xs.size()) * static_cast<double>(ys.size());
  const double v_hat = flat / (2.0 * norm) + corr / norm;

  const auto t = cheb_coeffs(f, 2, 2048);
  const double V = v_hat / beta + low_order_terms(t.t[1], t.t[2], profile, summary, beta);
  if (!std::isfinite(V)) fail(ErrorKind::Numerical, "variance_integral produced a non-finite value");
  return V;
}

double mean_correction(const TestFunction& f, const VarianceProfile& profile,
                       const CumulantSummary& summary, int beta, int nodes) {
  check_beta(beta);
  require(nodes >= 8, "mean_correction: too few nodes");
  const auto xs = gauss_chebyshev_nodes(nodes);
  double quartic = 0.0;
  double cubic = 0.0;
  double quadratic = 0.0;
  double resolvent = 0.0;
  for (double x : xs) {
    const double fx = f(x);
    const double x2 = x * x;
    quartic += fx * (x2 * x2 - 4.0 * x2 + 2.0);
    cubic += fx * (x2 * x - x2 - 2.0 * x + 4.0);
    if (beta == 1) {
      quadratic += fx * (2.0 - x2);
      const cplx m = semicircle::msc_boundary(x);
      const cplx M = m * m;
      resolvent += fx * (M * profile.resolvent_trace(M)).real();
    }
  }
  const double n = static_cast<double>(nodes);
  double E = summary.s4_hat * quartic / (2.0 * n) + summary.s3_hat * cubic / (8.0 * n);
  if (beta == 1) {
    E += profile.trace() * quadratic / (2.0 * n) + 0.25 * (f(2.0) + f(-2.0)) + resolvent / n;
  }
  return E;
}

double cubic_term(const ChebCoeffs& t, const CumulantSummary& summary) {
  const double t1 = coeff(t, 1);
  return summary.s3_hat / 8.0 * t1 * t1 * t1;
}

cplx predicted_char(double lambda, const CltPrediction& pred) {
  const double l2 = lambda * lambda;
  return std::exp(cplx(-0.5 * l2 * pred.V, l2 * lambda * pred.B / 3.0 + lambda * pred.E));
}

PredictedCumulants predicted_cumulants(const CltPrediction& pred) {
  return {pred.E, pred.V, -2.0 * pred.B, 2.0 * std::abs(pred.B)};
}

ChebCoeffs adaptive_coeffs(const TestFunction& f, const VarianceProfile& profile,
                           const PredictOptions& opt) {
  const bool analytic_log =
      (f.kind() == TestFnKind::LogReal || f.kind() == TestFnKind::LogImag) &&
      f.log_point().imag() > 0.0;
  int J = std::max(opt.J, 20);
  for (;;) {
    ChebCoeffs t = analytic_log ? log_kind_coeffs(f, J) : cheb_coeffs(f, J, std::max(opt.M, 8 * J));
    const auto tr = profile.trace_powers(J);
    double partial = 0.0;
    double last_decade = 0.0;
    for (int j = 1; j <= J; ++j) {
      const double term = j * t.t[j] * t.t[j] * tr[j - 1];
      partial += term;
      if (j > J - 10) last_decade += std::abs(term);
    }
    if (last_decade <= 1e-9 * std::abs(partial) || J >= opt.J_max) return t;
    J = std::min(2 * J, opt.J_max);
  }
}

bool variance_paths_agree(double series, double integral) {
  return std::abs(series - integral) <= std::max(1e-5 * std::abs(series), 1e-7);
}

CltPrediction predict(const TestFunction& f, const EnsembleSpec& spec, const PredictOptions& opt) {
  spec.check();
  const auto& profile = *spec.profile;
  const auto summary = cumulant_summary(spec);
  const auto t = adaptive_coeffs(f, profile, opt);
  const auto series = variance_series(t, profile, summary, spec.beta);

  CltPrediction p;
  p.beta = spec.beta;
  p.V = series.value;
  p.J = t.J;
  p.tail_estimate = t.tail_estimate;
  p.truncation_bound = series.truncation_bound;
  p.tail_warning = series.tail_dominates;
  p.E = mean_correction(f, profile, summary, spec.beta, opt.mean_nodes);
  p.B = cubic_term(t, summary);
  if (opt.with_integral) {
    p.has_integral = true;
    p.V_integral = variance_integral(f, profile, summary, spec.beta, opt.integral);
    p.paths_agree = variance_paths_agree(p.V, p.V_integral);
  }
  return p;
}

namespace {

cplx R_branch(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 2.0)
    fail(ErrorKind::InvalidArgument, "L_kernel: argument on (-inf, 2]");
  return std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
}

}  // namespace

cplx L_kernel(cplx z, cplx w) {
  const cplx rz = R_branch(z);
  const cplx rw = R_branch(w);
  const cplx ratio = (z + rz) * (w + rw) / (2.0 * (z * w - 4.0 + rz * rw));
  return 2.0 * pi * pi * std::log(ratio);
}

double gbe_log_variance(cplx z, int beta, LogPart part) {
  check_beta(beta);
  require(z.imag() > 0.0 && std::abs(z.real()) < 2.0,
          "gbe_log_variance: need Im z > 0 and |Re z| < 2");
  const cplx zb = std::conj(z);
  const cplx lzz = L_kernel(z, z);
  const cplx lzb = L_kernel(z, zb);
  const cplx lbb = L_kernel(zb, zb);
  cplx v;
  switch (part) {
    case LogPart::Real:
      v = 0.25 * (lzz + 2.0 * lzb + lbb);
      break;
    case LogPart::Imag:
      v = 0.25 * (2.0 * lzb - lzz - lbb);
      break;
    case LogPart::Complex:
      fail(ErrorKind::InvalidArgument, "gbe_log_variance: part must be real or imag");
  }
  return v.real() / (2.0 * beta * pi * pi);
}

}  // namespace gwlss
