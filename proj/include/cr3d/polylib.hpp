#pragma once

// Univariate orthogonal polynomials on [-1, 1] (Legendre, Jacobi, Gegenbauer)
// and the polynomials whose composition with 1 - 2*lambda yields the
// nonconforming Crouzeix-Raviart shape functions.
//
// All families are generated by three-term recurrences carried out in exact
// rational arithmetic; the monomial coefficients are rounded to double only
// once, when the UnivariatePoly is returned.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cr3d {

/// Polynomial in the monomial basis, coeffs[i] multiplies x^i.
///
/// The zero polynomial is stored as {0} with degree 0.
class UnivariatePoly {
public:
  UnivariatePoly();
  explicit UnivariatePoly(std::vector<double> coeffs);
  UnivariatePoly(std::initializer_list<double> coeffs);

  static UnivariatePoly zero() { return UnivariatePoly(); }
  static UnivariatePoly constant(double c) { return UnivariatePoly({c}); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  std::span<const double> coeffs() const { return coeffs_; }
  double coeff(int i) const;

  /// Horner evaluation.
  double operator()(double x) const;

  UnivariatePoly derivative(int order = 1) const;

  /// Returns x -> p(a + b*x).
  UnivariatePoly compose_affine(double a, double b) const;

  UnivariatePoly operator+(const UnivariatePoly& o) const;
  UnivariatePoly operator-(const UnivariatePoly& o) const;
  UnivariatePoly operator*(const UnivariatePoly& o) const;
  UnivariatePoly operator*(double s) const;

private:
  void normalize();
  std::vector<double> coeffs_;
};

/// Legendre polynomial L_n, normalized so that L_n(1) = 1.
UnivariatePoly legendre(int n);

/// Jacobi polynomial P_n^{(alpha, beta)} with P_n(1) = (alpha+1)_n / n!.
/// The parameters are converted to exact dyadic rationals before the
/// recurrence runs.
UnivariatePoly jacobi(double alpha, double beta, int n);

/// Gegenbauer polynomial C_n^{(lambda)}; the zero polynomial for n < 0.
UnivariatePoly gegenbauer(double lambda, int n);

/// Q_k = (L_{k+1} - L_k)' / (k + 1).
UnivariatePoly q_k(int k);

/// Q_{d,k}: the (d-2)-th derivative of sum_l beta_{k,l} L_{k+l}.
UnivariatePoly q_dk(int d, int k);

enum class BetaMethod { solve, explicit_formula };

struct BetaCoefficients {
  int k = 0;
  int m = 0;
  std::vector<double> values;
};

/// Coefficients beta_{k,0..m} of P_{k+m} = sum_l beta_{k,l} L_{k+l}.
/// `solve` factorizes the (m+1)x(m+1) moment system, `explicit_formula`
/// evaluates the closed form. Throws SingularSystemError if the solve path
/// meets a numerically singular matrix.
BetaCoefficients beta_coeffs(int k, int m, BetaMethod method);

/// Row residuals of the moment system for the given coefficients.
std::vector<double> beta_system_residuals(const BetaCoefficients& beta);

/// iota_k = int_{-1}^{1} P_k^{(0,3)}(t) (t+1) dt, evaluated by Gauss-Legendre.
double iota_k(int k);

/// Closed form 4 (-1)^k / (k+2).
double iota_k_closed_form(int k);

/// True inside the range the library has been validated on (k <= 10, d <= 5).
bool in_validated_range(int k, int d = 3);

class SingularSystemError : public std::runtime_error {
public:
  explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cr3d
