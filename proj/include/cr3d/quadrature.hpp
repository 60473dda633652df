#pragma once

// Quadrature on reference simplices {x_i >= 0, sum x_i <= 1} of dimension
// 1..4, built as collapsed (Duffy) tensor products of Gauss-Jacobi rules.
// Every rule is audited against the closed-form monomial integrals before it
// is handed out.

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cr3d {

class Mesh;

struct QuadRule {
  int dim = 0;
  std::vector<std::array<double, 4>> points;  // first `dim` entries are used
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return weights.size(); }
};

class ExactnessVerificationFailed : public std::runtime_error {
public:
  explicit ExactnessVerificationFailed(const std::string& what) : std::runtime_error(what) {}
};

/// Gauss-Jacobi nodes and weights on [-1, 1] for the weight (1-x)^a (1+x)^b.
struct GaussJacobi {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussJacobi gauss_jacobi(int n, double alpha, double beta);

/// n-point Gauss-Legendre rule on [0, 1], exact to degree 2n-1.
QuadRule gauss_1d(int n);

/// Collapsed-coordinate rule on the reference simplex of dimension 1..4 with
/// exact_degree >= degree. Rules are cached; the returned reference stays
/// valid for the lifetime of the program.
const QuadRule& simplex_rule(int dim, int degree);

/// Exact integral of x^a over the reference simplex: prod a_i! / (|a| + dim)!.
double monomial_integral(std::span<const int> exponents);

/// Largest relative monomial error of `rule` over all |a| <= degree.
double monomial_audit(const QuadRule& rule, int degree);

/// Integration point handed to integrands: barycentric coordinates with
/// respect to the local vertex order of the cell and the physical point.
struct QuadPoint {
  std::array<double, 4> bary{};
  std::array<double, 3> x{};
};

using Integrand = std::function<double(const QuadPoint&)>;

/// Integral of f over tet `tet`, exact for polynomial f of degree <= degree.
double integrate_tet(const Mesh& mesh, int tet, const Integrand& f, int degree);

/// Integral of f over facet `facet`; bary is with respect to the sorted facet
/// vertex triple (bary[3] == 0).
double integrate_facet(const Mesh& mesh, int facet, const Integrand& f, int degree);

/// The two reference-tet integrals behind the even/odd elimination pairings:
///   I_p = int P_{k-1}^{(0,3)}(1-2x1) (L_{k+1}-L_k)''(1-2x1)
///   I_y = int P_{k-1}^{(0,3)}(1-2x1) (L_{k+1}-L_k)''(1-2x2)
struct IyIntegrals {
  double i_p = 0.0;
  double i_y = 0.0;
};
IyIntegrals iy_integrals(int k);

}  // namespace cr3d
