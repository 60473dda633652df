#include "cr3d/assembly.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <sstream>

using namespace cr3d;

namespace {

Mesh random_tet(std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::vector<Vec3> v;
    for (int i = 0; i < 4; ++i)
      v.emplace_back(u(gen), u(gen), u(gen));
    const double vol = std::abs((v[1] - v[0]).cross(v[2] - v[0]).dot(v[3] - v[0])) / 6.0;
    if (vol > 0.02)
      return Mesh::build(v, {{0, 1, 2, 3}});
  }
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("k = 2 cell function against the pressure basis gives 5|K| times the incidence pattern") {
  std::mt19937 gen(7);
  const auto basis = pressure_basis(2);
  REQUIRE(basis.size() == 4);
  for (int trial = 0; trial < 100; ++trial) {
    const Mesh m = random_tet(gen);
    const auto b2 = cr_cell_function(m, 2, 0);
    const auto& tv = m.tet(0);
    const double vol = m.volume(0);
    for (int v = 1; v < 4; ++v) {
      const Vec3 t = m.vertex(tv[v]) - m.vertex(tv[0]);
      for (int y = 0; y < 4; ++y) {
        const double expected = 5.0 * vol * ((y == 0 ? 1.0 : 0.0) - (y == v ? 1.0 : 0.0));
        CHECK(directional_pairing(m, 0, *b2.piece(0), t, basis[y]) == doctest::Approx(expected).epsilon(1e-12).scale(vol));
      }
    }
  }
}

TEST_CASE("pressure basis for k = 2 is 1 - 5 lambda") {
  const auto basis = pressure_basis(2);
  for (int y = 0; y < 4; ++y) {
    std::array<double, 4> l{0.1, 0.2, 0.3, 0.4};
    CHECK(basis[y](l) == doctest::Approx(1.0 - 5.0 * l[y]).epsilon(1e-14));
  }
}

TEST_CASE("k = 1 divergence matrix matches the divergence theorem") {
  const Mesh m = kuhn_cube(1);
  const auto sys = assemble(m, 1, VelocityKind::CR);
  REQUIRE(sys.B.rows() == m.num_tets());
  for (std::size_t j = 0; j < sys.velocity_keys.size(); ++j) {
    const auto& key = sys.velocity_keys[j];
    for (int t = 0; t < m.num_tets(); ++t) {
      double expected = 0.0;
      if (key.kind == DofKind::VertexNode) {
        const int loc = m.local_index(t, key.entity);
        if (loc >= 0)
          expected = m.volume(t) * m.barycentric_gradients(t)[static_cast<std::size_t>(loc)][key.component];
      } else if (key.kind == DofKind::CRFacet) {
        const auto& tf = m.tet_facets(t);
        for (int i = 0; i < 4; ++i)
          if (tf[static_cast<std::size_t>(i)] == key.entity) {
            // outward area vector of the facet opposite local vertex i
            const Vec3 g = m.barycentric_gradients(t)[static_cast<std::size_t>(i)];
            expected = -3.0 * m.volume(t) * g[key.component];
          }
      }
      CHECK(sys.B(t, static_cast<Eigen::Index>(j)) == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("constant pressure is orthogonal to every divergence") {
  for (const Mesh& m : {kuhn_cube(1), inner_critical_patch(), capped_inner_patch()})
    for (int k = 1; k <= 4; ++k)
      for (VelocityKind v : {VelocityKind::CR, VelocityKind::conforming}) {
        const auto sys = assemble(m, k, v);
        const double defect = (sys.constant_pressure.transpose() * sys.B).norm();
        CHECK(defect <= 1e-12 * std::max(1.0, sys.B.norm()));
        CHECK(sys.constant_pressure.dot(sys.Mp * sys.constant_pressure) ==
              doctest::Approx(m.patch_volume([&] {
                std::vector<int> all(static_cast<std::size_t>(m.num_tets()));
                for (int t = 0; t < m.num_tets(); ++t)
                  all[static_cast<std::size_t>(t)] = t;
                return all;
              }())).epsilon(1e-12));
      }
}

TEST_CASE("velocity Gram matrix is symmetric positive definite") {
  const Mesh m = kuhn_cube(1);
  for (int k = 1; k <= 4; ++k) {
    const auto sys = assemble(m, k, VelocityKind::CR);
    CHECK((sys.A - sys.A.transpose()).norm() <= 1e-14 * sys.A.norm());
    CHECK(Eigen::LLT<Eigen::MatrixXd>(sys.A).info() == Eigen::Success);
    CHECK(sys.A.rows() == static_cast<Eigen::Index>(sys.velocity_keys.size()));
    CHECK(sys.B.cols() == sys.A.rows());
    CHECK(sys.Mp.rows() == static_cast<Eigen::Index>(sys.pressure_keys.size()));
  }
}

TEST_CASE("pressure mass matrix is block diagonal per tet") {
  const Mesh m = kuhn_cube(1);
  const auto sys = assemble(m, 3, VelocityKind::CR);
  const int nloc = pressure_dim_per_tet(3);
  for (Eigen::Index i = 0; i < sys.Mp.rows(); ++i)
    for (Eigen::Index j = 0; j < sys.Mp.cols(); ++j)
      if (i / nloc != j / nloc)
        CHECK(sys.Mp(i, j) == 0.0);
}

TEST_CASE("extra quadrature points do not change the matrices") {
  const Mesh m = inner_critical_patch();
  for (int k = 1; k <= 4; ++k) {
    const auto a = assemble(m, k, VelocityKind::CR, {2});
    const auto b = assemble(m, k, VelocityKind::CR, {6});
    CHECK(rel(a.A, b.A) <= 1e-12);
    CHECK(rel(a.B, b.B) <= 1e-12);
    CHECK(rel(a.Mp, b.Mp) <= 1e-12);
    CHECK(a.quad_degree == 2 * k + 2);
  }
}

TEST_CASE("matrices scale with the mesh size") {
  const Mesh m = capped_inner_patch();
  const double h = 3.0;
  const Mesh big = transformed(m, Eigen::Matrix3d::Identity(), Vec3(1.0, -2.0, 0.5), h);
  const auto a = assemble(m, 2, VelocityKind::CR);
  const auto b = assemble(big, 2, VelocityKind::CR);
  CHECK(rel(b.A, h * a.A) <= 1e-12);
  CHECK(rel(b.B, h * h * a.B) <= 1e-12);
  CHECK(rel(b.Mp, h * h * h * a.Mp) <= 1e-12);
}

TEST_CASE("rotation leaves the divergence pairing of rotated fields unchanged") {
  const Mesh m = inner_critical_patch();
  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const Mesh rot = transformed(m, r, Vec3::Zero(), 1.0);
  const auto a = assemble(m, 2, VelocityKind::CR);
  const auto b = assemble(rot, 2, VelocityKind::CR);
  REQUIRE(a.velocity_keys.size() == b.velocity_keys.size());
  // velocity field v on m corresponds to R v on the rotated mesh
  const Eigen::Index nv = a.A.rows() / 3;
  Eigen::MatrixXd big_r = Eigen::MatrixXd::Zero(3 * nv, 3 * nv);
  for (Eigen::Index i = 0; i < nv; ++i)
    big_r.block(3 * i, 3 * i, 3, 3) = r;
  CHECK(rel(b.B * big_r, a.B) <= 1e-12);
  CHECK(rel(big_r.transpose() * b.A * big_r, a.A) <= 1e-12);
}

TEST_CASE("pairing checks dimensions") {
  const Mesh m = reference_tet();
  const auto sys = assemble(m, 2, VelocityKind::CR);
  const Eigen::VectorXd q = Eigen::VectorXd::Ones(sys.B.rows());
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(sys.B.cols());
  CHECK(pairing(q, v, sys) == doctest::Approx(q.dot(sys.B * v)));
  CHECK_THROWS_AS(pairing(Eigen::VectorXd::Ones(sys.B.rows() + 1), v, sys), DimensionMismatch);
  CHECK_THROWS_AS(pairing(q, Eigen::VectorXd::Ones(2), sys), DimensionMismatch);
}

TEST_CASE("digests are reproducible and distinguish spaces") {
  const Mesh m = kuhn_cube(1);
  const auto a = assemble(m, 2, VelocityKind::CR);
  const auto b = assemble(m, 2, VelocityKind::CR);
  const auto c = assemble(m, 2, VelocityKind::conforming);
  CHECK(a.velocity_digest == b.velocity_digest);
  CHECK(a.pressure_digest == b.pressure_digest);
  CHECK(a.velocity_digest != c.velocity_digest);
  CHECK(hex_digest(a.velocity_digest).size() == 16);
  CHECK(hex_digest(0xabcULL) == "0000000000000abc");
}

TEST_CASE("velocity kind names") {
  CHECK(std::string(to_string(VelocityKind::CR)) == "cr");
  CHECK(std::string(to_string(VelocityKind::conforming)) == "conforming");
  CHECK(parse_velocity_kind("cr") == VelocityKind::CR);
  CHECK(parse_velocity_kind("conforming") == VelocityKind::conforming);
  CHECK_FALSE(parse_velocity_kind("taylor-hood"));
}

TEST_CASE("csv output round trips") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0 / 3.0, -2.5, 1e-300, 7.0;
  std::ostringstream os;
  write_csv(os, m);
  std::istringstream is(os.str());
  for (int i = 0; i < 2; ++i) {
    std::string line;
    std::getline(is, line);
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(0, comma)) == m(i, 0));
    CHECK(std::stod(line.substr(comma + 1)) == m(i, 1));
  }
}
