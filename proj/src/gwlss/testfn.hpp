#pragma once

// Test functions f on [-5, 5] and their Chebyshev expansions in the scaled
// basis T_n(2 cos t) = cos(n t), with coefficients
//   t_n(f) = (2/pi) * integral_{-2}^{2} T_n(x) f(x) / sqrt(4 - x^2) dx.

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gwlss {

using cplx = std::complex<double>;

enum class TestFnKind { Polynomial, Gauss, Closure, LogReal, LogImag };

/// Weighted L^1 norms of f, f', f'' used as admissibility metadata.
struct Smoothness {
  double norm0;
  double norm1;
  double norm2;
};

class TestFunction {
 public:
  using Callback = std::function<double(double)>;

  /// f(x) = sum_k coeffs[k] x^k.
  static TestFunction polynomial(std::vector<double> coeffs);
  /// f(x) = exp(-(x - center)^2 / (2 width^2)).
  static TestFunction gauss(double center, double width);
  /// Black-box smooth f; derivatives by central differences unless given.
  static TestFunction closure(Callback f, std::string name = "closure",
                              Callback derivative = nullptr);
  /// f(x) = Re log(z - x), z = E + i eta, eta >= 0.
  static TestFunction log_real(double E, double eta);
  /// f(x) = Im log(z - x) with the branch (-pi, pi].
  static TestFunction log_imag(double E, double eta);
  /// Chebyshev mode T_n.
  static TestFunction chebyshev_mode(int n);

  /// Parses a builtin descriptor: "x", "x2", "T3", "gauss(c,w)",
  /// "logre(E,eta)", "logim(E,eta)", "poly(c0,c1,...)".
  static TestFunction parse(const std::string& descriptor);

  double operator()(double x) const;
  /// Derivative of order d in {0, 1, 2}.
  double derivative(double x, int d) const;

  TestFnKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& poly_coeffs() const { return coeffs_; }
  /// Spectral parameter of the log kinds.
  cplx log_point() const { return {params_[0], params_[1]}; }
  /// f is not truncated outside the spectrum; the flag records whether the
  /// function itself vanishes outside [-5, 5].
  bool compactly_supported() const { return false; }

  /// integral f(x) rho_sc(x) dx, computed once at construction.
  double semicircle_mean() const { return sc_mean_; }

  TestFunction scaled(double c) const;
  /// Overall multiplier applied to non-polynomial kinds.
  double scale() const { return scale_; }

 private:
  TestFunction() = default;
  void finalize();

  TestFnKind kind_ = TestFnKind::Polynomial;
  std::string name_;
  std::vector<double> coeffs_;
  std::vector<double> params_;
  Callback fn_;
  Callback dfn_;
  double scale_ = 1.0;
  double sc_mean_ = 0.0;
  int mode_ = -1;  // Chebyshev order when built by chebyshev_mode
};

/// Chebyshev T_n in the scaled convention, T_1(x) = x/2.
double cheb_T(int n, double x);

struct ChebCoeffs {
  std::vector<double> t;  // t_0 .. t_J
  int J = 0;
  double tail_estimate = 0.0;
};

/// Discrete Chebyshev transform on M Gauss-Chebyshev nodes x_j = 2 cos(pi (j+1/2)/M).
ChebCoeffs cheb_coeffs(const TestFunction& f, int J = 256, int M = 2048);

/// Same transform for raw node values f(x_j), j = 0..M-1.
ChebCoeffs cheb_coeffs_from_values(const std::vector<double>& values, int J);

/// Gauss-Chebyshev nodes of the first kind scaled to (-2, 2).
std::vector<double> gauss_chebyshev_nodes(int M);

enum class LogPart { Real, Imag, Complex };

/// t_n(log(z - .)) = 2 (-1)^{n+1} m_sc(z)^n / n for n >= 1, Im z > 0.
cplx log_test_coeffs(cplx z, int n, LogPart part);

/// Coefficients of a log kind: analytic for n >= 1, t_0 by quadrature.
ChebCoeffs log_kind_coeffs(const TestFunction& f, int J);

/// (integral over (-5,5) of |f^(d)(x)|^p / sqrt|4 - x^2| dx)^(1/p).
double weighted_norm(const TestFunction& f, int d, double p);

Smoothness smoothness(const TestFunction& f);

/// Clenshaw evaluation of t_0/2 + sum_{n>=1} t_n T_n(x), |x| <= 2.
double reconstruct(const ChebCoeffs& c, double x);

}  // namespace gwlss
