#include "gwlss/testfn.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gwlss/error.hpp"
#include "gwlss/semicircle.hpp"

namespace gwlss {

using std::numbers::pi;

namespace {

constexpr int kCenteringNodes = 2048;
constexpr double kFiniteDiffStep = 1e-5;

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
  return d;
}

// integral f rho_sc by Gauss-Chebyshev quadrature of the second kind.
double centering_quadrature(const std::function<double(double)>& f) {
  const int M = kCenteringNodes;
  double acc = 0.0;
  for (int k = 1; k <= M; ++k) {
    const double th = pi * k / (M + 1.0);
    const double s = std::sin(th);
    acc += s * s * f(2.0 * std::cos(th));
  }
  return 2.0 * acc / (M + 1.0);
}

std::vector<double> parse_args(const std::string& body, const std::string& descriptor) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      const auto rest = item.substr(used);
      if (!std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isspace(c); }))
        throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorKind::Config, "bad numeric argument '" + item + "' in test function '" +
                                  descriptor + "'");
    }
  }
  return out;
}

}  // namespace

TestFunction TestFunction::polynomial(std::vector<double> coeffs) {
  require(!coeffs.empty(), "polynomial test function needs at least one coefficient");
  TestFunction f;
  f.kind_ = TestFnKind::Polynomial;
  f.coeffs_ = std::move(coeffs);
  std::ostringstream os;
  os << "poly(";
  for (std::size_t k = 0; k < f.coeffs_.size(); ++k) os << (k ? "," : "") << f.coeffs_[k];
  os << ")";
  f.name_ = os.str();
  f.finalize();
  return f;
}

TestFunction TestFunction::gauss(double center, double width) {
  require(width > 0.0, "gauss: width must be positive");
  TestFunction f;
  f.kind_ = TestFnKind::Gauss;
  f.params_ = {center, width};
  std::ostringstream os;
  os << "gauss(" << center << "," << width << ")";
  f.name_ = os.str();
  f.finalize();
  return f;
}

TestFunction TestFunction::closure(Callback fn, std::string name, Callback derivative) {
  require(static_cast<bool>(fn), "closure test function is empty");
  TestFunction f;
  f.kind_ = TestFnKind::Closure;
  f.fn_ = std::move(fn);
  f.dfn_ = std::move(derivative);
  f.name_ = std::move(name);
  f.finalize();
  return f;
}

TestFunction TestFunction::log_real(double E, double eta) {
  require(eta >= 0.0, "logre: eta must be >= 0");
  TestFunction f;
  f.kind_ = TestFnKind::LogReal;
  f.params_ = {E, eta};
  std::ostringstream os;
  os << "logre(" << E << "," << eta << ")";
  f.name_ = os.str();
  f.finalize();
  return f;
}

TestFunction TestFunction::log_imag(double E, double eta) {
  require(eta >= 0.0, "logim: eta must be >= 0");
  TestFunction f;
  f.kind_ = TestFnKind::LogImag;
  f.params_ = {E, eta};
  std::ostringstream os;
  os << "logim(" << E << "," << eta << ")";
  f.name_ = os.str();
  f.finalize();
  return f;
}

TestFunction TestFunction::chebyshev_mode(int n) {
  require(n >= 0, "chebyshev_mode: negative order");
  // Monomial coefficients of T_n from T_{k+1} = x T_k - T_{k-1}.
  std::vector<double> prev{1.0};
  if (n == 0) {
    auto f = polynomial(prev);
    f.name_ = "T0";
    f.mode_ = 0;
    return f;
  }
  std::vector<double> cur{0.0, 0.5};
  for (int k = 1; k < n; ++k) {
    std::vector<double> next(cur.size() + 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  auto f = polynomial(cur);
  f.name_ = "T" + std::to_string(n);
  f.mode_ = n;
  f.sc_mean_ = n == 2 ? -0.5 : 0.0;
  return f;
}

TestFunction TestFunction::parse(const std::string& descriptor) {
  std::string d;
  for (char c : descriptor)
    if (!std::isspace(static_cast<unsigned char>(c))) d.push_back(c);
  if (d == "x") {
    auto f = polynomial({0.0, 1.0});
    f.name_ = "x";
    return f;
  }
  if (d == "x2") {
    auto f = polynomial({0.0, 0.0, 1.0});
    f.name_ = "x2";
    return f;
  }
  if (d.size() >= 2 && d[0] == 'T' &&
      std::all_of(d.begin() + 1, d.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return chebyshev_mode(std::stoi(d.substr(1)));
  }
  const auto open = d.find('(');
  if (open == std::string::npos || d.back() != ')')
    fail(ErrorKind::Config, "unknown test function '" + descriptor + "'");
  const auto head = d.substr(0, open);
  const auto args = parse_args(d.substr(open + 1, d.size() - open - 2), descriptor);
  auto expect = [&](std::size_t n) {
    if (args.size() != n)
      fail(ErrorKind::Config, "test function '" + descriptor + "' expects " +
                                  std::to_string(n) + " arguments");
  };
  if (head == "gauss") {
    expect(2);
    if (!(args[1] > 0.0)) fail(ErrorKind::Config, "gauss width must be positive");
    return gauss(args[0], args[1]);
  }
  if (head == "logre" || head == "logim") {
    expect(2);
    if (args[1] < 0.0) fail(ErrorKind::Config, "log test function needs eta >= 0");
    return head == "logre" ? log_real(args[0], args[1]) : log_imag(args[0], args[1]);
  }
  if (head == "poly") {
    if (args.empty()) fail(ErrorKind::Config, "poly() needs coefficients");
    return polynomial(args);
  }
  fail(ErrorKind::Config, "unknown test function '" + descriptor + "'");
}

void TestFunction::finalize() {
  namespace sc = semicircle;
  switch (kind_) {
    case TestFnKind::Polynomial: {
      double acc = 0.0;
      for (std::size_t k = 0; k < coeffs_.size(); ++k)
        acc += coeffs_[k] * sc::moment(static_cast<int>(k));
      sc_mean_ = acc;
      return;
    }
    case TestFnKind::LogReal:
    case TestFnKind::LogImag: {
      const double E = params_[0];
      const double eta = params_[1];
      const bool re = kind_ == TestFnKind::LogReal;
      if (eta > 0.0) {
        const cplx F = sc::log_potential_complex({E, eta});
        sc_mean_ = scale_ * (re ? F.real() : F.imag());
        return;
      }
      if (std::abs(E) < 2.0) {
        const auto lp = sc::log_potential(E);
        sc_mean_ = scale_ * (re ? lp.re : lp.im);
        return;
      }
      break;
    }
    case TestFnKind::Gauss:
    case TestFnKind::Closure:
      break;
  }
  sc_mean_ = centering_quadrature([this](double x) { return (*this)(x); });
}

double TestFunction::operator()(double x) const {
  switch (kind_) {
    case TestFnKind::Polynomial:
      // High modes have huge monomial coefficients; the recurrence is stable.
      return mode_ >= 0 ? scale_ * cheb_T(mode_, x) : horner(coeffs_, x);
    case TestFnKind::Gauss: {
      const double u = (x - params_[0]) / params_[1];
      return scale_ * std::exp(-0.5 * u * u);
    }
    case TestFnKind::Closure:
      return scale_ * fn_(x);
    case TestFnKind::LogReal: {
      const double dx = params_[0] - x;
      return scale_ * 0.5 * std::log(dx * dx + params_[1] * params_[1]);
    }
    case TestFnKind::LogImag:
      // atan2 returns pi (not -pi) for a negative real argument with +0 imag.
      return scale_ * std::atan2(params_[1], params_[0] - x);
  }
  return 0.0;
}

double TestFunction::derivative(double x, int d) const {
  require(d >= 0 && d <= 2, "derivative order must be 0, 1 or 2");
  if (d == 0) return (*this)(x);
  switch (kind_) {
    case TestFnKind::Polynomial: {
      if (mode_ >= 0) {
        // T'_{k+1} = T_k + x T'_k - T'_{k-1}, T''_{k+1} = 2 T'_k + x T''_k - T''_{k-1}.
        double t0 = 1.0, t1 = 0.5 * x, d0 = 0.0, d1 = 0.5, s0 = 0.0, s1 = 0.0;
        if (mode_ == 0) return 0.0;
        for (int k = 1; k < mode_; ++k) {
          const double t2 = x * t1 - t0;
          const double d2 = t1 + x * d1 - d0;
          const double s2 = 2.0 * d1 + x * s1 - s0;
          t0 = t1, t1 = t2, d0 = d1, d1 = d2, s0 = s1, s1 = s2;
        }
        return scale_ * (d == 1 ? d1 : s1);
      }
      auto c = poly_derivative(coeffs_);
      if (d == 2) c = poly_derivative(c);
      return horner(c, x);
    }
    case TestFnKind::Gauss: {
      const double w = params_[1];
      const double u = (x - params_[0]) / w;
      const double g = (*this)(x);
      return d == 1 ? -u / w * g : (u * u - 1.0) / (w * w) * g;
    }
    case TestFnKind::LogReal:
    case TestFnKind::LogImag: {
      // d/dx log(z - x) = 1/(x - z), d2/dx2 = -1/(x - z)^2.
      const cplx r = 1.0 / (cplx(x, 0.0) - log_point());
      const cplx v = d == 1 ? r : -r * r;
      return scale_ * (kind_ == TestFnKind::LogReal ? v.real() : v.imag());
    }
    case TestFnKind::Closure:
      break;
  }
  const double h = kFiniteDiffStep;
  if (d == 1) {
    if (dfn_) return scale_ * dfn_(x);
    return ((*this)(x + h) - (*this)(x - h)) / (2.0 * h);
  }
  return ((*this)(x + h) - 2.0 * (*this)(x) + (*this)(x - h)) / (h * h);
}

TestFunction TestFunction::scaled(double c) const {
  TestFunction f = *this;
  if (kind_ == TestFnKind::Polynomial) {
    for (auto& v : f.coeffs_) v *= c;
    if (mode_ >= 0) f.scale_ *= c;
  } else {
    f.scale_ *= c;
  }
  f.sc_mean_ *= c;
  std::ostringstream os;
  os << c << "*" << name_;
  f.name_ = os.str();
  return f;
}

double cheb_T(int n, double x) {
  require(n >= 0, "cheb_T: negative order");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 0.5 * x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> gauss_chebyshev_nodes(int M) {
  require(M >= 1, "gauss_chebyshev_nodes: M >= 1");
  std::vector<double> x(M);
  for (int j = 0; j < M; ++j) x[j] = 2.0 * std::cos(pi * (j + 0.5) / M);
  return x;
}

namespace {

double tail_from_coefficients(const std::vector<double>& t) {
  const int J = static_cast<int>(t.size()) - 1;
  double abs_sum = 0.0;
  for (double v : t) abs_sum += std::abs(v);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * abs_sum;
  // Geometric extrapolation from the last two windows of up to ten coefficients.
  const int w = std::min(10, J / 2);
  if (w < 1) return floor;
  double prev_decade = 0.0;
  double last_decade = 0.0;
  for (int n = J - 2 * w + 1; n <= J - w; ++n) prev_decade = std::max(prev_decade, std::abs(t[n]));
  for (int n = J - w + 1; n <= J; ++n) last_decade = std::max(last_decade, std::abs(t[n]));
  if (last_decade == 0.0) return floor;
  double ratio = prev_decade > 0.0 ? std::pow(last_decade / prev_decade, 1.0 / w) : 0.999;
  ratio = std::min(ratio, 0.999);
  return last_decade * ratio / (1.0 - ratio) + floor;
}

}  // namespace

ChebCoeffs cheb_coeffs_from_values(const std::vector<double>& values, int J) {
  const int M = static_cast<int>(values.size());
  require(J >= 0, "cheb_coeffs: J must be >= 0");
  require(M >= 2 * J && M >= 1, "cheb_coeffs: need M >= 2J nodes");
  // cos(n pi (2j+1) / (2M)) through an exact integer phase index mod 4M.
  const long period = 4L * M;
  std::vector<double> table(period);
  for (long k = 0; k < period; ++k) table[k] = std::cos(pi * static_cast<double>(k) / (2.0 * M));
  ChebCoeffs out;
  out.J = J;
  out.t.assign(J + 1, 0.0);
  for (int n = 0; n <= J; ++n) {
    double acc = 0.0;
    for (int j = 0; j < M; ++j) acc += values[j] * table[(static_cast<long>(n) * (2 * j + 1)) % period];
    out.t[n] = 2.0 * acc / M;
  }
  out.tail_estimate = tail_from_coefficients(out.t);
  return out;
}

ChebCoeffs cheb_coeffs(const TestFunction& f, int J, int M) {
  require(M >= 2 * J, "cheb_coeffs: need M >= 2J nodes");
  const auto nodes = gauss_chebyshev_nodes(M);
  std::vector<double> values(M);
  for (int j = 0; j < M; ++j) {
    values[j] = f(nodes[j]);
    if (!std::isfinite(values[j])) {
      std::ostringstream os;
      os.precision(17);
      os << "test function " << f.name() << " is singular at quadrature node " << j
         << " (x = " << nodes[j] << ")";
      fail(ErrorKind::Numerical, os.str());
    }
  }
  return cheb_coeffs_from_values(values, J);
}

cplx log_test_coeffs(cplx z, int n, LogPart part) {
  require(n >= 1, "log_test_coeffs: n = 0 is not available in closed form");
  require(z.imag() > 0.0, "log_test_coeffs: need Im z > 0");
  const cplx m = semicircle::msc(z);
  const double sign = (n % 2 == 1) ? 2.0 : -2.0;
  const cplx c = sign * std::pow(m, n) / static_cast<double>(n);
  switch (part) {
    case LogPart::Real:
      return {c.real(), 0.0};
    case LogPart::Imag:
      return {c.imag(), 0.0};
    case LogPart::Complex:
      break;
  }
  return c;
}

ChebCoeffs log_kind_coeffs(const TestFunction& f, int J) {
  require(f.kind() == TestFnKind::LogReal || f.kind() == TestFnKind::LogImag,
          "log_kind_coeffs: not a log test function");
  const cplx z = f.log_point();
  require(z.imag() > 0.0, "log_kind_coeffs: analytic coefficients need eta > 0");
  const double scale = f.scale();
  const auto part = f.kind() == TestFnKind::LogReal ? LogPart::Real : LogPart::Imag;
  ChebCoeffs out;
  out.J = J;
  out.t.assign(J + 1, 0.0);
  // t_0 by quadrature of the (smooth for eta > 0) function.
  const int M = std::max(2048, 2 * J);
  const auto nodes = gauss_chebyshev_nodes(M);
  double acc = 0.0;
  for (double x : nodes) acc += f(x);
  out.t[0] = 2.0 * acc / M;
  for (int n = 1; n <= J; ++n) out.t[n] = scale * log_test_coeffs(z, n, part).real();
  const double r = std::abs(semicircle::msc(z));
  out.tail_estimate = std::abs(scale) * 2.0 * std::pow(r, J + 1) / ((J + 1) * (1.0 - r));
  return out;
}

double weighted_norm(const TestFunction& f, int d, double p) {
  require(p >= 1.0, "weighted_norm: p must be >= 1");
  using boost::math::quadrature::gauss_kronrod;
  auto g = [&](double x) { return std::pow(std::abs(f.derivative(x, d)), p); };
  double err = 0.0;
  // x = 2 cos(t) on (-2, 2); x = +-2 cosh(u) on the tails to 5.
  const double bulk = gauss_kronrod<double, 61>::integrate(
      [&](double t) { return g(2.0 * std::cos(t)); }, 0.0, pi, 15, 1e-10, &err);
  const double umax = std::acosh(2.5);
  const double right = gauss_kronrod<double, 61>::integrate(
      [&](double u) { return g(2.0 * std::cosh(u)); }, 0.0, umax, 15, 1e-10, &err);
  const double left = gauss_kronrod<double, 61>::integrate(
      [&](double u) { return g(-2.0 * std::cosh(u)); }, 0.0, umax, 15, 1e-10, &err);
  const double total = bulk + right + left;
  if (!std::isfinite(total))
    fail(ErrorKind::Numerical, "weighted_norm: non-integrable singularity in " + f.name());
  return std::pow(total, 1.0 / p);
}

Smoothness smoothness(const TestFunction& f) {
  return {weighted_norm(f, 0, 1.0), weighted_norm(f, 1, 1.0), weighted_norm(f, 2, 1.0)};
}

double reconstruct(const ChebCoeffs& c, double x) {
  const double y = 0.5 * x;
  double b1 = 0.0;
  double b2 = 0.0;
  for (int k = static_cast<int>(c.t.size()) - 1; k >= 1; --k) {
    const double b0 = c.t[k] + 2.0 * y * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  const double t0 = c.t.empty() ? 0.0 : c.t[0];
  return 0.5 * t0 + y * b1 - b2;
}

}  // namespace gwlss
