#include "cr3d/polylib.hpp"

#include "cr3d/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>

namespace cr3d {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using RationalPoly = std::vector<Rational>;

// Every finite double is a dyadic rational, so this conversion is exact.
Rational exact(double x) {
  if (!std::isfinite(x))
    throw std::invalid_argument("polynomial parameter must be finite");
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  Rational r(scaled);
  const int shift = exponent - 53;
  if (shift >= 0)
    r *= Rational(boost::multiprecision::cpp_int(1) << shift);
  else
    r /= Rational(boost::multiprecision::cpp_int(1) << -shift);
  return r;
}

RationalPoly add(const RationalPoly& a, const RationalPoly& b) {
  RationalPoly r(std::max(a.size(), b.size()), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i)
    r[i] += b[i];
  return r;
}

RationalPoly scale(const RationalPoly& a, const Rational& s) {
  RationalPoly r(a);
  for (auto& c : r)
    c *= s;
  return r;
}

// (c0 + c1 x) * a
RationalPoly mul_linear(const RationalPoly& a, const Rational& c0, const Rational& c1) {
  RationalPoly r(a.size() + 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    r[i] += c0 * a[i];
    r[i + 1] += c1 * a[i];
  }
  return r;
}

RationalPoly differentiate(const RationalPoly& a, int order) {
  RationalPoly r(a);
  for (int o = 0; o < order; ++o) {
    if (r.size() <= 1)
      return {Rational(0)};
    RationalPoly d(r.size() - 1);
    for (std::size_t i = 1; i < r.size(); ++i)
      d[i - 1] = r[i] * static_cast<long long>(i);
    r = std::move(d);
  }
  return r;
}

UnivariatePoly to_double(const RationalPoly& a) {
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    c[i] = static_cast<double>(a[i]);
  return UnivariatePoly(std::move(c));
}

RationalPoly jacobi_exact(const Rational& a, const Rational& b, int n) {
  RationalPoly p0{Rational(1)};
  if (n == 0)
    return p0;
  // P_1 = (a+1) + (a+b+2)(x-1)/2
  RationalPoly p1{(a + 1) - (a + b + 2) / 2, (a + b + 2) / 2};
  for (int j = 2; j <= n; ++j) {
    const Rational s = 2 * j + a + b;
    const Rational d = 2 * Rational(j) * (j + a + b) * (s - 2);
    const Rational c_lin = (s - 1) * s * (s - 2) / d;
    const Rational c_const = (s - 1) * (a * a - b * b) / d;
    const Rational c_prev = 2 * (j + a - 1) * (j + b - 1) * s / d;
    RationalPoly next = add(mul_linear(p1, c_const, c_lin), scale(p0, -c_prev));
    p0 = std::move(p1);
    p1 = std::move(next);
  }
  return p1;
}

RationalPoly legendre_exact(int n) { return jacobi_exact(Rational(0), Rational(0), n); }

RationalPoly q_k_exact(int k) {
  const RationalPoly diff = add(legendre_exact(k + 1), scale(legendre_exact(k), Rational(-1)));
  return scale(differentiate(diff, 1), Rational(1, k + 1));
}

Rational factorial_ratio(int mu, int nu) {
  // mu! / nu! with the convention 0 for nu < 0
  if (nu < 0)
    return Rational(0);
  Rational r(1);
  if (mu >= nu) {
    for (int i = nu + 1; i <= mu; ++i)
      r *= i;
  } else {
    for (int i = mu + 1; i <= nu; ++i)
      r /= i;
  }
  return r;
}

Rational binomial(int n, int r) {
  Rational b(1);
  for (int i = 1; i <= r; ++i)
    b = b * (n - r + i) / i;
  return b;
}

Rational beta_explicit_exact(int k, int m, int l) {
  Rational num = binomial(m, l) * (2 * k + 2 * l + 1);
  for (int i = 0; i < m; ++i)
    num *= 2;
  if ((m - l) % 2 != 0)
    num = -num;
  Rational den(1);
  for (int r = l + 1; r <= m + l + 1; ++r)
    den *= 2 * k + r;
  return num / den;
}

// Entry (n, l) of the moment system defining beta_{k,l}.
Rational beta_system_entry(int k, int n, int l) {
  Rational pre(1);
  for (int i = 1; i <= n; ++i)
    pre *= 2 * i;
  return factorial_ratio(l + k + n, l + k - n) / pre;
}

void check_degree(int n, const char* what) {
  if (n < 0)
    throw std::invalid_argument(std::string(what) + ": degree must be non-negative");
}

}  // namespace

// ---------------------------------------------------------------------------

UnivariatePoly::UnivariatePoly() : coeffs_{0.0} {}

UnivariatePoly::UnivariatePoly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

UnivariatePoly::UnivariatePoly(std::initializer_list<double> coeffs) : coeffs_(coeffs) { normalize(); }

void UnivariatePoly::normalize() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0)
    coeffs_.pop_back();
  if (coeffs_.empty())
    coeffs_.push_back(0.0);
}

double UnivariatePoly::coeff(int i) const {
  if (i < 0 || i > degree())
    return 0.0;
  return coeffs_[static_cast<std::size_t>(i)];
}

double UnivariatePoly::operator()(double x) const {
  double r = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    r = r * x + *it;
  return r;
}

UnivariatePoly UnivariatePoly::derivative(int order) const {
  std::vector<double> c(coeffs_);
  for (int o = 0; o < order; ++o) {
    if (c.size() <= 1)
      return zero();
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i)
      d[i - 1] = c[i] * static_cast<double>(i);
    c = std::move(d);
  }
  return UnivariatePoly(std::move(c));
}

UnivariatePoly UnivariatePoly::compose_affine(double a, double b) const {
  // Horner in polynomial arithmetic: r = r*(a + b x) + c_i
  UnivariatePoly r;
  const UnivariatePoly lin({a, b});
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    r = r * lin + UnivariatePoly::constant(*it);
  return r;
}

UnivariatePoly UnivariatePoly::operator+(const UnivariatePoly& o) const {
  std::vector<double> c(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    c[i] += coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i)
    c[i] += o.coeffs_[i];
  return UnivariatePoly(std::move(c));
}

UnivariatePoly UnivariatePoly::operator-(const UnivariatePoly& o) const { return *this + o * -1.0; }

UnivariatePoly UnivariatePoly::operator*(const UnivariatePoly& o) const {
  std::vector<double> c(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j)
      c[i + j] += coeffs_[i] * o.coeffs_[j];
  return UnivariatePoly(std::move(c));
}

UnivariatePoly UnivariatePoly::operator*(double s) const {
  std::vector<double> c(coeffs_);
  for (auto& v : c)
    v *= s;
  return UnivariatePoly(std::move(c));
}

// ---------------------------------------------------------------------------

UnivariatePoly legendre(int n) {
  check_degree(n, "legendre");
  return to_double(legendre_exact(n));
}

UnivariatePoly jacobi(double alpha, double beta, int n) {
  check_degree(n, "jacobi");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw std::invalid_argument("jacobi: parameters must exceed -1");
  return to_double(jacobi_exact(exact(alpha), exact(beta), n));
}

UnivariatePoly gegenbauer(double lambda, int n) {
  if (!(lambda > -0.5) || lambda == 0.0)
    throw std::invalid_argument("gegenbauer: parameter must exceed -1/2 and be nonzero");
  if (n < 0)
    return UnivariatePoly::zero();
  const Rational lam = exact(lambda);
  RationalPoly c0{Rational(1)};
  if (n == 0)
    return to_double(c0);
  RationalPoly c1{Rational(0), 2 * lam};
  for (int j = 2; j <= n; ++j) {
    // j C_j = 2x (j + lam - 1) C_{j-1} - (j + 2 lam - 2) C_{j-2}
    RationalPoly next = add(mul_linear(c1, Rational(0), 2 * (j + lam - 1) / j),
                            scale(c0, -(j + 2 * lam - 2) / j));
    c0 = std::move(c1);
    c1 = std::move(next);
  }
  return to_double(c1);
}

UnivariatePoly q_k(int k) {
  if (k < 1)
    throw std::invalid_argument("q_k: k must be >= 1");
  return to_double(q_k_exact(k));
}

UnivariatePoly q_dk(int d, int k) {
  if (d < 2)
    throw std::invalid_argument("q_dk: d must be >= 2");
  if (k < 1)
    throw std::invalid_argument("q_dk: k must be >= 1");
  const int m = d - 2;
  RationalPoly p{Rational(0)};
  for (int l = 0; l <= m; ++l)
    p = add(p, scale(legendre_exact(k + l), beta_explicit_exact(k, m, l)));
  return to_double(differentiate(p, m));
}

BetaCoefficients beta_coeffs(int k, int m, BetaMethod method) {
  if (k < 1 || m < 0)
    throw std::invalid_argument("beta_coeffs: need k >= 1 and m >= 0");
  BetaCoefficients out{k, m, std::vector<double>(static_cast<std::size_t>(m + 1))};
  if (method == BetaMethod::explicit_formula) {
    for (int l = 0; l <= m; ++l)
      out.values[static_cast<std::size_t>(l)] = static_cast<double>(beta_explicit_exact(k, m, l));
    return out;
  }
  Eigen::MatrixXd a(m + 1, m + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(m) = 1.0;
  for (int n = 0; n <= m; ++n)
    for (int l = 0; l <= m; ++l)
      a(n, l) = static_cast<double>(beta_system_entry(k, n, l));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    throw SingularSystemError("beta_coeffs: moment system is numerically singular for k=" +
                              std::to_string(k) + ", m=" + std::to_string(m));
  const Eigen::VectorXd x = lu.solve(rhs);
  for (int l = 0; l <= m; ++l)
    out.values[static_cast<std::size_t>(l)] = x(l);
  return out;
}

std::vector<double> beta_system_residuals(const BetaCoefficients& beta) {
  std::vector<double> res(static_cast<std::size_t>(beta.m + 1));
  for (int n = 0; n <= beta.m; ++n) {
    double row = 0.0;
    for (int l = 0; l <= beta.m; ++l)
      row += static_cast<double>(beta_system_entry(beta.k, n, l)) * beta.values[static_cast<std::size_t>(l)];
    res[static_cast<std::size_t>(n)] = std::abs(row - (n == beta.m ? 1.0 : 0.0));
  }
  return res;
}

double iota_k(int k) {
  check_degree(k, "iota_k");
  const UnivariatePoly p = jacobi(0.0, 3.0, k);
  // integrand has degree k+1; the rule lives on [0, 1]
  const QuadRule rule = gauss_1d(k / 2 + 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.weights.size(); ++i) {
    const double t = 2.0 * rule.points[i][0] - 1.0;
    sum += rule.weights[i] * p(t) * (t + 1.0);
  }
  return 2.0 * sum;
}

double iota_k_closed_form(int k) { return 4.0 * (k % 2 == 0 ? 1.0 : -1.0) / (k + 2); }

bool in_validated_range(int k, int d) { return k <= 10 && d <= 5; }

}  // namespace cr3d
