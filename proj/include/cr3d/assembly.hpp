#pragma once

// Dense matrices of the discrete Stokes problem:
//   A  broken velocity Gram  sum_K int_K grad u : grad v
//   B  pressure-divergence   sum_K int_K q div v
//   Mp pressure mass         sum_K int_K p q
// Vector velocity DoFs are key-major: index 3 i + c for scalar function i and
// component c.

#include "cr3d/fespace.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cr3d {

class DimensionMismatch : public std::invalid_argument {
public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

enum class VelocityKind { CR, conforming };

const char* to_string(VelocityKind kind);
std::optional<VelocityKind> parse_velocity_kind(const std::string& name);

struct AssemblyOptions {
  /// Quadrature exactness is 2k + quad_margin.
  int quad_margin = 2;
};

struct AssembledSystem {
  int k = 0;
  VelocityKind velocity = VelocityKind::CR;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Mp;
  std::vector<DofKey> velocity_keys;
  std::vector<DofKey> pressure_keys;
  /// Coefficients of the constant pressure 1.
  Eigen::VectorXd constant_pressure;
  std::uint64_t velocity_digest = 0;
  std::uint64_t pressure_digest = 0;
  int quad_degree = 0;
};

AssembledSystem assemble(const Mesh& mesh, int k, VelocityKind velocity, const AssemblyOptions& options = {});

/// Scalar velocity space behind a velocity kind (CR_{k,0} or S_{k,0}).
SpaceKind velocity_space(VelocityKind velocity);

/// b_h(q, v) = q^T B v.
double pairing(const Eigen::VectorXd& q, const Eigen::VectorXd& v, const AssembledSystem& system);

/// int_K q div(f w) for a scalar function f, a constant direction w and a
/// per-tet pressure q, all on tet t.
double directional_pairing(const Mesh& mesh, int t, const BaryPoly& f, const Vec3& w, const BaryPoly& q);

/// Full matrix as CSV, one row per line, %.17g.
void write_csv(std::ostream& os, const Eigen::MatrixXd& m);

/// 16 lowercase hex digits.
std::string hex_digest(std::uint64_t h);

}  // namespace cr3d
