#include "cr3d/mesh.hpp"
#include "cr3d/polylib.hpp"
#include "cr3d/quadrature.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numeric>
#include <random>

using namespace cr3d;

namespace {

double eval_monomial(const QuadRule& r, std::initializer_list<int> e) {
  double s = 0.0;
  for (std::size_t p = 0; p < r.size(); ++p) {
    double v = r.weights[p];
    int j = 0;
    for (int a : e)
      v *= std::pow(r.points[p][static_cast<std::size_t>(j++)], a);
    s += v;
  }
  return s;
}

Mesh random_tet(std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    std::vector<Vec3> v;
    for (int i = 0; i < 4; ++i)
      v.emplace_back(u(gen), u(gen), u(gen));
    const double vol = (v[1] - v[0]).dot((v[2] - v[0]).cross(v[3] - v[0])) / 6.0;
    if (std::abs(vol) > 1e-2)
      return Mesh::build(v, {{0, 1, 2, 3}});
  }
}

}  // namespace

TEST_CASE("gauss_1d") {
  const auto r = gauss_1d(5);
  CHECK(r.exact_degree == 9);
  for (int a = 0; a <= 9; ++a)
    CHECK(eval_monomial(r, {a}) == doctest::Approx(1.0 / (a + 1)).epsilon(1e-14));
}

TEST_CASE("simplex rules: closed forms and audit") {
  CHECK(eval_monomial(simplex_rule(3, 0), {0, 0, 0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(eval_monomial(simplex_rule(3, 1), {1, 0, 0}) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
  CHECK(eval_monomial(simplex_rule(2, 3), {2, 1}) == doctest::Approx(1.0 / 60.0).epsilon(1e-14));
  const double vol[] = {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0};
  for (int dim = 1; dim <= 4; ++dim)
    for (int deg : {0, 1, 4, 9, 14}) {
      const auto& r = simplex_rule(dim, deg);
      CHECK(r.exact_degree >= deg);
      CHECK(std::accumulate(r.weights.begin(), r.weights.end(), 0.0) ==
            doctest::Approx(vol[dim]).epsilon(1e-13));
      CHECK(monomial_audit(r, r.exact_degree) <= 1e-12);
      for (const auto& w : r.weights)
        CHECK(w > 0.0);
    }
  CHECK(&simplex_rule(3, 6) == &simplex_rule(3, 6));
  CHECK_THROWS(simplex_rule(5, 2));
}

TEST_CASE("integrate_tet: affine invariance and P1^(0,3) moments") {
  std::mt19937 gen(7);
  const auto p1 = jacobi(0.0, 3.0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Mesh m = random_tet(gen);
    const double vol = m.volume(0);
    CHECK(integrate_tet(m, 0, [](const QuadPoint&) { return 1.0; }, 0) == doctest::Approx(vol).epsilon(1e-13));
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z) {
        const double v = integrate_tet(
            m, 0, [&](const QuadPoint& q) { return p1(1.0 - 2.0 * q.bary[y]) * q.bary[z]; }, 2);
        if (y == z)
          CHECK(v == doctest::Approx(-vol / 4.0).epsilon(1e-12));
        else
          CHECK(std::abs(v) <= 1e-12 * vol);
      }
    // pulled-back x^2 y z equals the reference integral of the pullback
    const auto ref = reference_tet();
    const double phys = integrate_tet(
        m, 0, [](const QuadPoint& q) { return q.x[0] * q.x[0] * q.x[1] * q.x[2]; }, 4);
    const double pulled = integrate_tet(
        ref, 0,
        [&](const QuadPoint& q) {
          const Vec3 x = m.to_physical(0, q.bary);
          return x.x() * x.x() * x.y() * x.z();
        },
        4);
    CHECK(phys == doctest::Approx(6.0 * vol * pulled).epsilon(1e-12));
  }
}

TEST_CASE("integrate_facet") {
  const Mesh m = reference_tet();
  const int f = *m.find_facet({1, 2, 3});
  CHECK(integrate_facet(m, f, [](const QuadPoint&) { return 1.0; }, 0) ==
        doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  // mean of a barycentric coordinate over a triangle is 1/3
  CHECK(integrate_facet(m, f, [](const QuadPoint& q) { return q.bary[0]; }, 1) ==
        doctest::Approx(std::sqrt(3.0) / 6.0).epsilon(1e-14));
  CHECK(integrate_facet(m, f, [](const QuadPoint& q) { return q.x[0]; }, 1) ==
        doctest::Approx(std::sqrt(3.0) / 6.0).epsilon(1e-14));
}

TEST_CASE("iy_integrals") {
  for (int k = 2; k <= 8; ++k) {
    const auto iy = iy_integrals(k);
    CHECK(std::abs(iy.i_p - (k + 1) / 4.0) <= 1e-11);
    CHECK(std::abs(iy.i_y - 0.5 * (k % 2 ? 1.0 : -1.0)) <= 1e-11);
  }
  const auto k4 = iy_integrals(4);
  CHECK(k4.i_p == doctest::Approx(1.25));
  CHECK(k4.i_y == doctest::Approx(-0.5));
}
