#pragma once

// Inf-sup constants, macroelement N-spaces, critical pressures on critical
// edges and the certificates that the conforming pair admits them while the
// Crouzeix-Raviart functions eliminate them.

#include "cr3d/assembly.hpp"
#include "cr3d/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cr3d {

class NotSPD : public std::runtime_error {
public:
  explicit NotSPD(const std::string& what) : std::runtime_error(what) {}
};

class NoConvergence : public std::runtime_error {
public:
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

class StabilityError : public std::runtime_error {
public:
  enum class Kind { DisconnectedMacro, NotCritical, ApexNotOnEdge };
  StabilityError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

const char* to_string(StabilityError::Kind kind);

struct Tolerances {
  double coplanar = kDefaultCoplanarTol;
  double rank = 1e-10;
  double eig = 1e-9;
  int quad_margin = 2;
};

// ---------------------------------------------------------------------------
// Generalized symmetric eigenproblem A x = lambda M x

struct EigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // M-orthonormal columns
  int sweeps = 0;
};

/// Cholesky of M, cyclic Jacobi on L^{-1} A L^{-T}. Eigenvector signs are
/// fixed so that the largest-magnitude entry is positive.
EigenResult sym_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, int max_sweeps = 100);

/// max_i ||A x_i - lambda_i M x_i|| / ((||A|| + |lambda_i| ||M||) ||x_i||).
double eig_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, const EigenResult& r);

// ---------------------------------------------------------------------------
// Inf-sup

struct InfSupReport {
  int k = 0;
  std::string pair;
  double gamma_h = 0.0;
  std::vector<double> smallest_eigenvalues;  // up to five
  std::vector<double> eigen_residuals;       // parallel to smallest_eigenvalues
  double lambda_max = 0.0;
  int spurious_modes = 0;
  int velocity_dofs = 0;
  int pressure_dofs = 0;
  int num_tets = 0;
  int num_vertices = 0;
  bool validated_range = true;
  Tolerances tolerances;
};

/// gamma_h from S = B A^{-1} B^T on the M_p-orthogonal complement of the
/// constant pressure. With fewer than two pressure DoFs the complement is
/// empty and gamma_h stays 0 with no eigenvalues reported.
InfSupReport infsup_constant(const AssembledSystem& system, const Mesh& mesh, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Macroelement N-space

struct NspaceReport {
  std::vector<int> macro;
  int k = 0;
  VelocityKind space = VelocityKind::CR;
  int dim = 0;
  int pressure_dofs = 0;
  int velocity_dofs = 0;
  int rank = 0;
  std::vector<double> singular_values;
  /// The pairing matrix (pressure rows, vector velocity columns).
  Eigen::MatrixXd pairing;
};

/// Velocity functions vanish on the macroelement boundary; pressures are all
/// of P_{k-1} on the macro tets.
NspaceReport nspace_dim(const Mesh& mesh, const std::vector<int>& macro, int k, VelocityKind space,
                        double tol_rank = 1e-10);

// ---------------------------------------------------------------------------
// Critical pressures and certificates

struct CriticalPressure {
  int edge = -1;
  int apex = -1;
  bool inner = false;
  int k = 0;
  /// Patch tets in pattern order with signs (-1)^i, i = 1, 2, ...
  std::vector<int> tets;
  std::vector<double> signs;
  /// Per-tet form in local barycentric coordinates, parallel to tets.
  std::vector<BaryPoly> pieces;
  /// Coefficients in the global P_{k-1} basis.
  Eigen::VectorXd coefficients;
  /// Integral of the pressure over the domain.
  double mean = 0.0;
};

/// `force` skips the criticality check (used to probe non-critical edges).
CriticalPressure build_critical_pressure(const Mesh& mesh, int edge, int apex, int k,
                                         double tol_coplanar = kDefaultCoplanarTol, bool force = false);

struct SpuriousCertificate {
  double residual = 0.0;  // max |(p, div v)| / (||p|| ||grad v||)
  int checked_functions = 0;
  bool pass = false;
};

SpuriousCertificate certify_spurious(const CriticalPressure& pressure, const Mesh& mesh, int k,
                                     double threshold = 1e-10);

enum class EliminationStatus { certified, singular, precondition_unmet, not_applicable };

const char* to_string(EliminationStatus s);

struct EliminationCertificate {
  EliminationStatus status = EliminationStatus::not_applicable;
  int edge = -1;
  int k = 0;
  int tet = -1;             // K
  int facet_f = -1;         // odd k
  int facet_g = -1;         // odd k
  int y = -1;               // odd k: vertex of K opposite G
  double theta = 0.0;       // odd k
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  /// Rows of m, as edge vertex ids.
  std::array<int, 2> rows{-1, -1};
  double min_singular_value = 0.0;
  /// Largest deviation of a quadrature pairing from its closed form,
  /// relative to max(1, |closed form|).
  double pairing_error = 0.0;
  std::string message;
};

EliminationCertificate certify_elimination(const Mesh& mesh, int edge, int k,
                                           double tol_coplanar = kDefaultCoplanarTol);

/// Everything known about one (critical edge, apex) pair.
struct CriticalCertificate {
  CriticalEdgeRecord edge;
  int apex = -1;
  CriticalPressure pressure;
  SpuriousCertificate spurious;
  EliminationCertificate elimination;
};

/// detect_critical_edges, then for each edge and each of its vertices:
/// build_critical_pressure, certify_spurious, certify_elimination. The
/// callback sees each certificate as soon as it is complete.
std::vector<CriticalCertificate> certify_critical_edges(
    const Mesh& mesh, int k, const Tolerances& tol = {},
    const std::function<void(const CriticalCertificate&)>& on_certificate = {});

}  // namespace cr3d
