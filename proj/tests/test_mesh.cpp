#include "cr3d/mesh.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace cr3d;

namespace {

Eigen::Matrix3d random_rotation(std::mt19937& gen) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(gen), n(gen), n(gen), n(gen));
  return q.normalized().toRotationMatrix();
}

// Brute-force oracle: an edge is critical iff the facets containing it span
// at most two distinct planes, decided by exact rational-free integer tests
// on meshes with small integer-scaled coordinates.
std::set<std::array<int, 2>> critical_oracle(const Mesh& m, double scale) {
  std::set<std::array<int, 2>> out;
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ev = m.edge(e).vertices;
    std::vector<Eigen::Vector3d> normals;
    for (int f = 0; f < m.num_facets(); ++f) {
      const auto& fv = m.facet(f).vertices;
      if (std::count(fv.begin(), fv.end(), ev[0]) == 0 || std::count(fv.begin(), fv.end(), ev[1]) == 0)
        continue;
      const Eigen::Vector3d a = (m.vertex(fv[1]) - m.vertex(fv[0])) * scale;
      const Eigen::Vector3d b = (m.vertex(fv[2]) - m.vertex(fv[0])) * scale;
      Eigen::Vector3d n = a.cross(b);
      n = n.array().round();
      bool dup = false;
      for (const auto& o : normals)
        if (o.cross(n).squaredNorm() == 0.0)
          dup = true;
      if (!dup)
        normals.push_back(n);
    }
    if (normals.size() <= 2)
      out.insert(ev);
  }
  return out;
}

std::set<std::array<int, 2>> detected(const Mesh& m) {
  std::set<std::array<int, 2>> out;
  for (const auto& r : detect_critical_edges(m))
    out.insert(m.edge(r.edge).vertices);
  return out;
}

}  // namespace

TEST_CASE("reference tet") {
  const Mesh m = reference_tet();
  CHECK(m.num_tets() == 1);
  CHECK(m.num_facets() == 4);
  CHECK(m.num_edges() == 6);
  CHECK(m.volume(0) == doctest::Approx(1.0 / 6.0));
  for (int f = 0; f < 4; ++f)
    CHECK(m.facet(f).boundary);
  for (int e = 0; e < 6; ++e)
    CHECK(m.edge(e).boundary);
  const auto l = m.barycentric(0, Vec3(1, 0, 0));
  CHECK(l[0] == doctest::Approx(0.0));
  CHECK(l[1] == doctest::Approx(1.0));
  const auto crit = detect_critical_edges(m);
  CHECK(crit.size() == 6);
  for (const auto& r : crit) {
    CHECK_FALSE(r.inner);
    CHECK(r.iota() == 1);
  }
}

TEST_CASE("build errors") {
  std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 1, 1)};
  CHECK_THROWS_AS(Mesh::build(v, {{0, 1, 2, 7}}), MeshError);
  try {
    Mesh::build(v, {{0, 1, 2, 9}});
  } catch (const MeshError& e) {
    CHECK(e.kind() == MeshErrorKind::IndexOutOfRange);
  }
  try {
    Mesh::build({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2, 3}});
  } catch (const MeshError& e) {
    CHECK(e.kind() == MeshErrorKind::Degenerate);
  }
  // three tets on one facet
  std::vector<Vec3> w{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(0.2, 0.2, 2)};
  try {
    Mesh::build(w, {{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 2, 5}});
    FAIL("expected NonConforming");
  } catch (const MeshError& e) {
    CHECK(e.kind() == MeshErrorKind::NonConforming);
  }
  // negative orientation is fixed
  const Mesh flipped = Mesh::build(v, {{0, 2, 1, 3}});
  CHECK(flipped.volume(0) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("inner critical patch") {
  const Mesh m = inner_critical_patch();
  CHECK(m.num_tets() == 4);
  int inner = 0, boundary = 0, incidences = 0;
  for (int f = 0; f < m.num_facets(); ++f) {
    (m.facet(f).boundary ? boundary : inner)++;
    incidences += static_cast<int>(m.facet(f).tets.size());
    if (!m.facet(f).boundary) {
      const auto& v = m.facet(f).vertices;
      CHECK(v[0] == 0);
      CHECK(v[1] == 1);
    }
  }
  CHECK(inner == 4);
  CHECK(boundary == 8);
  CHECK(incidences == 4 * m.num_tets());
  for (int t = 0; t < 4; ++t)
    CHECK(m.volume(t) == doctest::Approx(1.0 / 6.0));

  const int pq = *m.find_edge({0, 1});
  CHECK(m.patch(EntityType::edge, pq).size() == 4);
  CHECK(m.patch(EntityType::vertex, 2).size() == 2);
  CHECK(m.patch(EntityType::facet, *m.find_facet({0, 1, 3})).size() == 2);
  CHECK_THROWS_AS(m.patch(EntityType::edge, 999), MeshError);
  CHECK(m.patch_volume(m.patch(EntityType::edge, pq)) == doctest::Approx(4.0 / 6.0).epsilon(1e-12));

  const auto rec = describe_edge(m, pq);
  CHECK(rec.critical);
  CHECK(rec.inner);
  CHECK(rec.planes.size() == 2);
  CHECK(rec.patch == std::vector<int>{0, 1, 2, 3});
  for (const auto& n : rec.planes)
    CHECK((std::abs(n.x()) == doctest::Approx(1.0) || std::abs(n.y()) == doctest::Approx(1.0)));
  // consecutive patch tets share a facet
  for (std::size_t i = 0; i < 4; ++i) {
    const auto a = m.tet_facets(rec.patch[i]);
    const auto b = m.tet_facets(rec.patch[(i + 1) % 4]);
    int shared = 0;
    for (int x : a)
      shared += static_cast<int>(std::count(b.begin(), b.end(), x));
    CHECK(shared == 1);
  }
}

TEST_CASE("outer critical patches") {
  for (int iota = 1; iota <= 3; ++iota) {
    const Mesh m = outer_critical_patch(iota);
    CHECK(m.num_tets() == iota);
    const auto rec = describe_edge(m, *m.find_edge({0, 1}));
    CHECK(rec.critical);
    CHECK_FALSE(rec.inner);
    CHECK(rec.iota() == iota);
    CHECK(rec.planes.size() == (iota == 1 ? 2u : 2u));
  }
  CHECK_THROWS_AS(outer_critical_patch(4), MeshError);
}

TEST_CASE("perturbed and capped patches") {
  const Mesh p = perturbed_inner_patch(0.1);
  CHECK(p.num_tets() == 8);
  CHECK_FALSE(describe_edge(p, *p.find_edge({0, 1})).critical);
  const Mesh c = capped_inner_patch();
  CHECK(c.num_tets() == 8);
  CHECK_FALSE(c.vertex_on_boundary(1));
  const auto rec = describe_edge(c, *c.find_edge({0, 1}));
  CHECK(rec.critical);
  CHECK(rec.inner);
}

TEST_CASE("kuhn cube") {
  const Mesh k1 = kuhn_cube(1);
  CHECK(k1.num_tets() == 6);
  CHECK(k1.num_vertices() == 8);
  const Mesh k2 = kuhn_cube(2);
  CHECK(k2.num_tets() == 48);
  double vol = 0.0;
  for (int t = 0; t < k2.num_tets(); ++t)
    vol += k2.volume(t);
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-13));

  // Oracle on integer-scaled normals. On kuhn_cube(1) the 6 cube edges that
  // avoid the diagonal corners and 6 face diagonals have facets in two planes.
  const auto o1 = critical_oracle(k1, 1.0);
  CHECK(detected(k1) == o1);
  CHECK(o1.size() == 12);
  int cube_edges = 0;
  for (const auto& e : o1) {
    const Vec3 d = k1.vertex(e[1]) - k1.vertex(e[0]);
    if ((d.array().abs() > 0.5).count() == 1)
      ++cube_edges;
  }
  CHECK(cube_edges == 6);
  CHECK(detected(k2) == critical_oracle(k2, 2.0));
}

TEST_CASE("critical edges are invariant under similarity transforms") {
  std::mt19937 gen(3);
  for (const Mesh& m : {kuhn_cube(2), inner_critical_patch(), capped_inner_patch(), outer_critical_patch(3)}) {
    const auto before = detected(m);
    for (int trial = 0; trial < 3; ++trial) {
      const Mesh t = transformed(m, random_rotation(gen), Vec3(0.3, -2.0, 5.0), 7.5);
      CHECK(detected(t) == before);
    }
  }
}

TEST_CASE("barycentric geometry on random tets") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec3> v;
    for (int i = 0; i < 4; ++i)
      v.emplace_back(u(gen), u(gen), u(gen));
    const double vol = (v[1] - v[0]).dot((v[2] - v[0]).cross(v[3] - v[0]));
    if (std::abs(vol) < 1e-3)
      continue;
    const Mesh m = Mesh::build(v, {{0, 1, 2, 3}});
    const auto g = m.barycentric_gradients(0);
    CHECK((g[0] + g[1] + g[2] + g[3]).norm() <= 1e-12 * g[0].norm());
    const auto& tv = m.tet(0);
    for (int a = 0; a < 4; ++a) {
      const auto l = m.barycentric(0, m.vertex(tv[a]));
      for (int b = 0; b < 4; ++b)
        CHECK(std::abs(l[b] - (a == b ? 1.0 : 0.0)) <= 1e-12);
      // d/d(v - p) lambda_z: -1 at z = p, delta_{v,z} otherwise
      for (int w = 0; w < 4; ++w) {
        if (w == a)
          continue;
        const Vec3 t = m.vertex(tv[w]) - m.vertex(tv[a]);
        for (int z = 0; z < 4; ++z) {
          const double expect = z == a ? -1.0 : (z == w ? 1.0 : 0.0);
          CHECK(std::abs(g[z].dot(t) - expect) <= 1e-11);
        }
      }
    }
  }
}

TEST_CASE("submesh and generator names") {
  const Mesh m = inner_critical_patch();
  const Mesh s = submesh(m, {1, 2});
  CHECK(s.num_tets() == 2);
  CHECK(s.num_vertices() == 5);
  for (const auto& name : {"reference", "inner-critical-patch", "outer-critical-patch", "kuhn",
                           "capped-inner-patch", "perturbed-inner-patch"})
    CHECK(to_string(*parse_mesh_kind(name)) == name);
  CHECK_FALSE(parse_mesh_kind("nope"));
  CHECK(generate({MeshKind::kuhn_cube, 2}).num_tets() == 48);
}
