#include "cr3d/assembly.hpp"

#include "cr3d/quadrature.hpp"

#include <cstdio>
#include <ostream>

namespace cr3d {

const char* to_string(VelocityKind kind) { return kind == VelocityKind::CR ? "cr" : "conforming"; }

std::optional<VelocityKind> parse_velocity_kind(const std::string& name) {
  if (name == "cr")
    return VelocityKind::CR;
  if (name == "conforming")
    return VelocityKind::conforming;
  return std::nullopt;
}

SpaceKind velocity_space(VelocityKind velocity) {
  return velocity == VelocityKind::CR ? SpaceKind::CRk0 : SpaceKind::Sk0;
}

AssembledSystem assemble(const Mesh& mesh, int k, VelocityKind velocity, const AssemblyOptions& options) {
  const FESpace vspace(mesh, k, velocity_space(velocity));
  const FESpace pspace(mesh, k, SpaceKind::Pkm1);
  const int nv = vspace.dim();
  const int np = pspace.dim();

  AssembledSystem sys;
  sys.k = k;
  sys.velocity = velocity;
  sys.velocity_keys = vspace.vector_keys();
  sys.pressure_keys = pspace.keys();
  sys.velocity_digest = dof_digest(sys.velocity_keys);
  sys.pressure_digest = dof_digest(sys.pressure_keys);
  sys.quad_degree = 2 * k + options.quad_margin;

  Eigen::MatrixXd as = Eigen::MatrixXd::Zero(nv, nv);
  sys.B = Eigen::MatrixXd::Zero(np, 3 * nv);
  sys.Mp = Eigen::MatrixXd::Zero(np, np);

  const QuadRule& rule = simplex_rule(3, sys.quad_degree);
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& vloc = vspace.on_tet(t);
    const auto& ploc = pspace.on_tet(t);
    const auto grads = mesh.barycentric_gradients(t);
    const double scale = 6.0 * mesh.volume(t);
    std::vector<Vec3> g(vloc.size());
    std::vector<double> q(ploc.size());
    for (std::size_t p = 0; p < rule.size(); ++p) {
      const auto& x = rule.points[p];
      const std::array<double, 4> l{1.0 - x[0] - x[1] - x[2], x[0], x[1], x[2]};
      const double w = scale * rule.weights[p];
      for (std::size_t a = 0; a < vloc.size(); ++a)
        g[a] = vspace.function(vloc[a]).piece(t)->gradient(l, grads);
      for (std::size_t a = 0; a < ploc.size(); ++a)
        q[a] = (*pspace.function(ploc[a]).piece(t))(l);
      for (std::size_t a = 0; a < vloc.size(); ++a)
        for (std::size_t b = a; b < vloc.size(); ++b) {
          const double v = w * g[a].dot(g[b]);
          as(vloc[a], vloc[b]) += v;
          if (b != a)
            as(vloc[b], vloc[a]) += v;
        }
      for (std::size_t a = 0; a < ploc.size(); ++a) {
        for (std::size_t b = 0; b < vloc.size(); ++b)
          for (int c = 0; c < 3; ++c)
            sys.B(ploc[a], 3 * vloc[b] + c) += w * q[a] * g[b][c];
        for (std::size_t b = a; b < ploc.size(); ++b) {
          const double v = w * q[a] * q[b];
          sys.Mp(ploc[a], ploc[b]) += v;
          if (b != a)
            sys.Mp(ploc[b], ploc[a]) += v;
        }
      }
    }
  }
  sys.A = Eigen::MatrixXd::Zero(3 * nv, 3 * nv);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j)
      for (int c = 0; c < 3; ++c)
        sys.A(3 * i + c, 3 * j + c) = as(i, j);

  std::vector<int> all(static_cast<std::size_t>(mesh.num_tets()));
  std::vector<BaryPoly> ones(all.size(), BaryPoly::constant(1.0));
  for (int t = 0; t < mesh.num_tets(); ++t)
    all[static_cast<std::size_t>(t)] = t;
  const auto c = pressure_coefficients(mesh, k, all, ones);
  sys.constant_pressure = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  return sys;
}

double pairing(const Eigen::VectorXd& q, const Eigen::VectorXd& v, const AssembledSystem& system) {
  if (q.size() != system.B.rows() || v.size() != system.B.cols())
    throw DimensionMismatch("pairing: expected " + std::to_string(system.B.rows()) + " pressure and " +
                            std::to_string(system.B.cols()) + " velocity coefficients");
  return q.dot(system.B * v);
}

double directional_pairing(const Mesh& mesh, int t, const BaryPoly& f, const Vec3& w, const BaryPoly& q) {
  const auto grads = mesh.barycentric_gradients(t);
  return integrate_tet(
      mesh, t, [&](const QuadPoint& p) { return q(p.bary) * f.gradient(p.bary, grads).dot(w); },
      f.degree() + q.degree());
}

void write_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j)
        os << ',';
      os << buf;
    }
    os << '\n';
  }
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cr3d
