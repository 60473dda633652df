#pragma once

// Basis functions of the conforming spaces S_{k,0} and S'_{k,0}, the
// nonconforming Crouzeix-Raviart functions, the basic space CR_{k,0} and the
// discontinuous pressure space P_{k-1}. Every function is stored per tet as a
// polynomial in the local barycentric coordinates.

#include "cr3d/mesh.hpp"
#include "cr3d/polylib.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cr3d {

class UnsupportedDegree : public std::invalid_argument {
public:
  explicit UnsupportedDegree(const std::string& what) : std::invalid_argument(what) {}
};

/// Monomial prod_i lambda_i^exp[i] in the local vertex order of a tet.
struct BaryTerm {
  std::array<int, 4> exp{};
  double coeff = 0.0;
};

/// Sum of barycentric monomials on one tet.
class BaryPoly {
public:
  BaryPoly() = default;
  explicit BaryPoly(std::vector<BaryTerm> terms);

  /// q(1 - 2 lambda_local) expanded into powers of lambda_local.
  static BaryPoly univariate(const UnivariatePoly& q, int local);
  static BaryPoly monomial(const std::array<int, 4>& exp, double coeff = 1.0);
  static BaryPoly constant(double c);

  const std::vector<BaryTerm>& terms() const { return terms_; }
  int degree() const;

  double operator()(const std::array<double, 4>& l) const;
  /// Partial derivatives with respect to lambda_0..lambda_3 (treated as
  /// independent variables).
  std::array<double, 4> bary_derivatives(const std::array<double, 4>& l) const;
  /// Physical gradient on a tet with barycentric gradients g.
  Vec3 gradient(const std::array<double, 4>& l, const std::array<Vec3, 4>& g) const;

  BaryPoly operator+(const BaryPoly& o) const;
  BaryPoly operator*(double s) const;

private:
  void compress();
  std::vector<BaryTerm> terms_;
};

enum class DofKind { VertexNode, EdgeNode, FacetNode, CellNode, CRCell, CRFacet, PressureNode };

const char* to_string(DofKind kind);

struct DofKey {
  DofKind kind = DofKind::VertexNode;
  int entity = -1;
  /// Multi-index over the sorted vertices of the entity (vertex 0 of a tet
  /// entity is its local vertex 0). Pressure keys use mu[0] as the local
  /// function index.
  std::array<int, 4> mu{};
  /// 0..2 for vector spaces, -1 for scalar spaces.
  int component = -1;

  std::string to_string() const;
  bool operator==(const DofKey&) const = default;
};

struct ShapeFunction {
  DofKey key;
  std::vector<int> support;     // sorted tet ids
  std::vector<BaryPoly> pieces;  // parallel to support

  /// Piece on tet t, or nullptr outside the support.
  const BaryPoly* piece(int t) const;

  /// Value and gradient; `inside` is cleared when t is not in the support.
  double evaluate(const Mesh& mesh, int t, const std::array<double, 4>& l, bool* inside = nullptr) const;
  Vec3 gradient(const Mesh& mesh, int t, const std::array<double, 4>& l, bool* inside = nullptr) const;
};

enum class SpaceKind { Sk0, Sk0prime, Bnc, CRk0, Pkm1, Pkm1_0 };

const char* to_string(SpaceKind kind);

/// Scalar finite element space with a deterministic basis order: conforming
/// keys first (vertices, edges, facets, cells by entity id, mu
/// lexicographic), then CR keys; pressure keys are tet-major.
class FESpace {
public:
  FESpace(const Mesh& mesh, int k, SpaceKind kind);

  int k() const { return k_; }
  SpaceKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(functions_.size()); }
  const ShapeFunction& function(int i) const { return functions_.at(static_cast<std::size_t>(i)); }
  const std::vector<ShapeFunction>& functions() const { return functions_; }
  /// Basis functions whose support contains tet t, as indices into functions().
  const std::vector<int>& on_tet(int t) const { return on_tet_.at(static_cast<std::size_t>(t)); }
  /// Polynomial degree of the pieces.
  int degree() const;

  std::vector<DofKey> keys() const;
  /// Keys of the vector version, key-major: index 3 i + c.
  std::vector<DofKey> vector_keys() const;

private:
  int k_;
  SpaceKind kind_;
  std::vector<ShapeFunction> functions_;
  std::vector<std::vector<int>> on_tet_;
};

/// Keys of a space; `vector` requests the 3-fold vector version.
std::vector<DofKey> enumerate(SpaceKind space, const Mesh& mesh, int k, bool vector = false);

/// Number of pressure functions per tet: binom(k+2, 3).
int pressure_dim_per_tet(int k);

/// Pressure basis on one tet in local barycentric form.
std::vector<BaryPoly> pressure_basis(int k);

/// Coefficients in the global P_{k-1} basis of a pressure given per tet
/// (absent tets are zero), by local L2 projection.
std::vector<double> pressure_coefficients(const Mesh& mesh, int k, const std::vector<int>& tets,
                                          const std::vector<BaryPoly>& pieces);

/// The nonconforming Crouzeix-Raviart functions in isolation.
ShapeFunction cr_cell_function(const Mesh& mesh, int k, int tet);
ShapeFunction cr_facet_function(const Mesh& mesh, int k, int facet);

/// Largest facet-moment defect of sum_i v_i phi_i over the scalar CR_{k,0}
/// basis: |int_F [v] q| on inner facets and |int_F v q| on boundary facets
/// for q in a monomial basis of P_{k-1}(F).
double jump_moment_audit(const FESpace& space, const std::vector<double>& v, const Mesh& mesh);

/// Same audit for a single shape function.
double jump_moment_audit(const ShapeFunction& f, const Mesh& mesh, int k);

/// L2 norm of a shape function.
double l2_norm(const ShapeFunction& f, const Mesh& mesh);

/// Smallest singular value of the diagonally equilibrated L2 + broken H1
/// Gram matrix of the scalar CR_{k,0} basis.
double direct_sum_audit(const Mesh& mesh, int k);

/// The integer matrix behind linear independence at a boundary facet for odd
/// k: diagonal Q_k(-1) = -(k+1), off-diagonal Q_k(1) = 1.
std::array<std::array<std::int64_t, 3>, 3> endpoint_matrix(int k);
std::int64_t determinant(const std::array<std::array<std::int64_t, 3>, 3>& m);

/// Defects of the two facet conditions of Q_{d,k}(1 - 2 lambda_z) on the
/// reference d-simplex: the value on the facet opposite z must be 1 and the
/// moments against P_{k-1} on the other facets must vanish.
struct QdkAudit {
  double facet_value_error = 0.0;
  double moment_residual = 0.0;
};
QdkAudit qdk_audit(int d, int k);

/// FNV-1a digest of the key sequence.
std::uint64_t dof_digest(const std::vector<DofKey>& keys);

}  // namespace cr3d
