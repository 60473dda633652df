#include "cr3d/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace cr3d {

const char* to_string(MeshErrorKind kind) {
  switch (kind) {
  case MeshErrorKind::NonConforming:
    return "NonConforming";
  case MeshErrorKind::Degenerate:
    return "Degenerate";
  case MeshErrorKind::IndexOutOfRange:
    return "IndexOutOfRange";
  case MeshErrorKind::UnknownEntity:
    return "UnknownEntity";
  case MeshErrorKind::InvalidParameter:
    return "InvalidParameter";
  }
  return "MeshError";
}

namespace {

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

template <std::size_t N>
std::array<int, N> sorted(std::array<int, N> a) {
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

Mesh Mesh::build(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets) {
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.tets_ = std::move(tets);
  const int nv = m.num_vertices();
  if (m.tets_.empty())
    throw MeshError(MeshErrorKind::InvalidParameter, "mesh has no tetrahedra");

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& v : m.vertices_) {
    if (!v.allFinite())
      throw MeshError(MeshErrorKind::InvalidParameter, "non-finite vertex coordinate");
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double bbox = (hi - lo).maxCoeff();
  const double min_volume = 1e-14 * bbox * bbox * bbox;

  m.volumes_.resize(m.tets_.size());
  for (std::size_t t = 0; t < m.tets_.size(); ++t) {
    auto& tet = m.tets_[t];
    for (int v : tet)
      if (v < 0 || v >= nv)
        throw MeshError(MeshErrorKind::IndexOutOfRange,
                        "tet " + std::to_string(t) + " references vertex " + std::to_string(v));
    if (sorted(tet)[0] == sorted(tet)[1] || sorted(tet)[1] == sorted(tet)[2] || sorted(tet)[2] == sorted(tet)[3])
      throw MeshError(MeshErrorKind::Degenerate, "tet " + std::to_string(t) + " repeats a vertex");
    double vol = signed_volume(m.vertex(tet[0]), m.vertex(tet[1]), m.vertex(tet[2]), m.vertex(tet[3]));
    if (std::abs(vol) <= min_volume)
      throw MeshError(MeshErrorKind::Degenerate, "tet " + std::to_string(t) + " has zero volume");
    if (vol < 0) {
      std::swap(tet[2], tet[3]);
      vol = -vol;
    }
    m.volumes_[t] = vol;
  }

  std::map<std::array<int, 3>, std::vector<int>> facet_map;
  std::map<std::array<int, 2>, std::vector<int>> edge_map;
  for (int t = 0; t < m.num_tets(); ++t) {
    const auto& tet = m.tets_[static_cast<std::size_t>(t)];
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> f{};
      int c = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i)
          f[static_cast<std::size_t>(c++)] = tet[static_cast<std::size_t>(j)];
      facet_map[sorted(f)].push_back(t);
    }
    for (const auto& le : kTetEdges)
      edge_map[sorted(std::array<int, 2>{tet[static_cast<std::size_t>(le[0])], tet[static_cast<std::size_t>(le[1])]})]
          .push_back(t);
  }

  std::map<std::array<int, 3>, int> facet_id;
  for (auto& [key, adj] : facet_map) {
    if (adj.size() > 2)
      throw MeshError(MeshErrorKind::NonConforming, "facet shared by " + std::to_string(adj.size()) + " tets");
    facet_id[key] = m.num_facets();
    m.facets_.push_back(Facet{key, adj, adj.size() == 1});
  }
  std::map<std::array<int, 2>, int> edge_id;
  for (auto& [key, adj] : edge_map) {
    edge_id[key] = m.num_edges();
    m.edges_.push_back(Edge{key, adj, {}, false});
  }
  for (int f = 0; f < m.num_facets(); ++f) {
    const auto& fv = m.facets_[static_cast<std::size_t>(f)].vertices;
    for (const auto& pr : {std::array<int, 2>{fv[0], fv[1]}, std::array<int, 2>{fv[0], fv[2]},
                           std::array<int, 2>{fv[1], fv[2]}}) {
      auto& e = m.edges_[static_cast<std::size_t>(edge_id.at(pr))];
      e.facets.push_back(f);
      if (m.facets_[static_cast<std::size_t>(f)].boundary)
        e.boundary = true;
    }
  }

  m.vertex_boundary_.assign(static_cast<std::size_t>(nv), false);
  for (const auto& f : m.facets_)
    if (f.boundary)
      for (int v : f.vertices)
        m.vertex_boundary_[static_cast<std::size_t>(v)] = true;

  m.vertex_tets_.assign(static_cast<std::size_t>(nv), {});
  m.tet_facets_.resize(m.tets_.size());
  m.tet_edges_.resize(m.tets_.size());
  m.grads_.resize(m.tets_.size());
  for (int t = 0; t < m.num_tets(); ++t) {
    const auto& tet = m.tets_[static_cast<std::size_t>(t)];
    for (int v : tet)
      m.vertex_tets_[static_cast<std::size_t>(v)].push_back(t);
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> f{};
      int c = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i)
          f[static_cast<std::size_t>(c++)] = tet[static_cast<std::size_t>(j)];
      m.tet_facets_[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = facet_id.at(sorted(f));
    }
    for (std::size_t e = 0; e < kTetEdges.size(); ++e)
      m.tet_edges_[static_cast<std::size_t>(t)][e] = edge_id.at(
          sorted(std::array<int, 2>{tet[static_cast<std::size_t>(kTetEdges[e][0])],
                                    tet[static_cast<std::size_t>(kTetEdges[e][1])]}));

    // Rows of the inverse Jacobian are the gradients of lambda_1..lambda_3.
    Eigen::Matrix3d jac;
    for (int j = 0; j < 3; ++j)
      jac.col(j) = m.vertex(tet[static_cast<std::size_t>(j + 1)]) - m.vertex(tet[0]);
    const Eigen::Matrix3d inv = jac.inverse();
    auto& g = m.grads_[static_cast<std::size_t>(t)];
    for (int j = 0; j < 3; ++j)
      g[static_cast<std::size_t>(j + 1)] = inv.row(j).transpose();
    g[0] = -(g[1] + g[2] + g[3]);
  }
  return m;
}

double Mesh::facet_area(int f) const {
  const auto& v = facet(f).vertices;
  return 0.5 * (vertex(v[1]) - vertex(v[0])).cross(vertex(v[2]) - vertex(v[0])).norm();
}

Vec3 Mesh::facet_normal(int f) const {
  const auto& v = facet(f).vertices;
  return (vertex(v[1]) - vertex(v[0])).cross(vertex(v[2]) - vertex(v[0])).normalized();
}

double Mesh::diameter() const {
  Vec3 lo = vertices_.front(), hi = vertices_.front();
  for (const auto& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

std::optional<int> Mesh::find_facet(std::array<int, 3> vertices) const {
  vertices = sorted(vertices);
  auto it = std::lower_bound(facets_.begin(), facets_.end(), vertices,
                             [](const Facet& f, const std::array<int, 3>& key) { return f.vertices < key; });
  if (it == facets_.end() || it->vertices != vertices)
    return std::nullopt;
  return static_cast<int>(it - facets_.begin());
}

std::optional<int> Mesh::find_edge(std::array<int, 2> vertices) const {
  vertices = sorted(vertices);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), vertices,
                             [](const Edge& e, const std::array<int, 2>& key) { return e.vertices < key; });
  if (it == edges_.end() || it->vertices != vertices)
    return std::nullopt;
  return static_cast<int>(it - edges_.begin());
}

int Mesh::local_index(int t, int v) const {
  const auto& tv = tet(t);
  for (int i = 0; i < 4; ++i)
    if (tv[static_cast<std::size_t>(i)] == v)
      return i;
  return -1;
}

int Mesh::opposite_local_vertex(int t, int f) const {
  const auto& tf = tet_facets(t);
  for (int i = 0; i < 4; ++i)
    if (tf[static_cast<std::size_t>(i)] == f)
      return i;
  throw MeshError(MeshErrorKind::UnknownEntity, "facet " + std::to_string(f) + " is not a facet of tet " +
                                                    std::to_string(t));
}

std::vector<int> Mesh::patch(EntityType type, int id) const {
  std::vector<int> out;
  switch (type) {
  case EntityType::facet:
    if (id < 0 || id >= num_facets())
      throw MeshError(MeshErrorKind::UnknownEntity, "unknown facet " + std::to_string(id));
    out = facet(id).tets;
    break;
  case EntityType::edge:
    if (id < 0 || id >= num_edges())
      throw MeshError(MeshErrorKind::UnknownEntity, "unknown edge " + std::to_string(id));
    out = edge(id).tets;
    break;
  case EntityType::vertex:
    if (id < 0 || id >= num_vertices())
      throw MeshError(MeshErrorKind::UnknownEntity, "unknown vertex " + std::to_string(id));
    out = vertex_tets(id);
    break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double Mesh::patch_volume(const std::vector<int>& tets) const {
  double v = 0.0;
  for (int t : tets)
    v += volume(t);
  return v;
}

std::array<double, 4> Mesh::barycentric(int t, const Vec3& x) const {
  const auto& g = grads_.at(static_cast<std::size_t>(t));
  const Vec3 d = x - vertex(tet(t)[0]);
  std::array<double, 4> l{};
  l[1] = g[1].dot(d);
  l[2] = g[2].dot(d);
  l[3] = g[3].dot(d);
  l[0] = 1.0 - l[1] - l[2] - l[3];
  return l;
}

std::array<Vec3, 4> Mesh::barycentric_gradients(int t) const { return grads_.at(static_cast<std::size_t>(t)); }

Vec3 Mesh::to_physical(int t, const std::array<double, 4>& bary) const {
  Vec3 x = Vec3::Zero();
  for (int i = 0; i < 4; ++i)
    x += bary[static_cast<std::size_t>(i)] * vertex(tet(t)[static_cast<std::size_t>(i)]);
  return x;
}

Mesh transformed(const Mesh& mesh, const Eigen::Matrix3d& rotation, const Vec3& shift, double scale) {
  std::vector<Vec3> v;
  v.reserve(mesh.vertices().size());
  for (const auto& x : mesh.vertices())
    v.emplace_back(scale * (rotation * x) + shift);
  return Mesh::build(std::move(v), mesh.tets());
}

Mesh submesh(const Mesh& mesh, const std::vector<int>& tets) {
  std::vector<int> used;
  for (int t : tets)
    for (int v : mesh.tet(t))
      used.push_back(v);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::map<int, int> renumber;
  std::vector<Vec3> verts;
  for (int v : used) {
    renumber[v] = static_cast<int>(verts.size());
    verts.push_back(mesh.vertex(v));
  }
  std::vector<std::array<int, 4>> cells;
  for (int t : tets) {
    std::array<int, 4> c{};
    for (int i = 0; i < 4; ++i)
      c[static_cast<std::size_t>(i)] = renumber.at(mesh.tet(t)[static_cast<std::size_t>(i)]);
    cells.push_back(c);
  }
  return Mesh::build(std::move(verts), std::move(cells));
}

// ---------------------------------------------------------------------------

namespace {

// The tet other than `from` adjacent through a facet containing the edge.
std::vector<int> edge_neighbours(const Mesh& mesh, const Edge& e, int t) {
  std::vector<int> out;
  for (int f : e.facets) {
    const auto& ft = mesh.facet(f).tets;
    if (ft.size() == 2 && (ft[0] == t || ft[1] == t))
      out.push_back(ft[0] == t ? ft[1] : ft[0]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> order_patch(const Mesh& mesh, const Edge& e) {
  std::vector<int> tets = e.tets;
  std::sort(tets.begin(), tets.end());
  if (tets.size() <= 1)
    return tets;
  int start = tets.front();
  if (e.boundary) {
    // chain: start at the lowest-id tet with fewer than two neighbours
    for (int t : tets)
      if (edge_neighbours(mesh, e, t).size() < 2) {
        start = t;
        break;
      }
  }
  std::vector<int> order{start};
  std::vector<bool> seen(static_cast<std::size_t>(mesh.num_tets()), false);
  seen[static_cast<std::size_t>(start)] = true;
  while (order.size() < tets.size()) {
    int next = -1;
    for (int n : edge_neighbours(mesh, e, order.back()))
      if (!seen[static_cast<std::size_t>(n)]) {
        next = n;
        break;
      }
    if (next < 0)
      break;
    seen[static_cast<std::size_t>(next)] = true;
    order.push_back(next);
  }
  return order;
}

}  // namespace

CriticalEdgeRecord describe_edge(const Mesh& mesh, int edge, double tol) {
  if (edge < 0 || edge >= mesh.num_edges())
    throw MeshError(MeshErrorKind::UnknownEntity, "unknown edge " + std::to_string(edge));
  const Edge& e = mesh.edge(edge);
  CriticalEdgeRecord rec;
  rec.edge = edge;
  rec.inner = !e.boundary;
  rec.patch = order_patch(mesh, e);

  // All facets contain the edge, so parallel normals already mean the same
  // plane; clustering only needs the normal directions.
  for (int f : e.facets) {
    const Vec3 n = mesh.facet_normal(f);
    bool placed = false;
    for (const auto& c : rec.planes)
      if (c.cross(n).norm() <= tol) {
        placed = true;
        break;
      }
    if (!placed)
      rec.planes.push_back(n);
  }
  rec.critical = rec.planes.size() <= 2;
  return rec;
}

std::vector<CriticalEdgeRecord> detect_critical_edges(const Mesh& mesh, double tol) {
  std::vector<CriticalEdgeRecord> out;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    auto rec = describe_edge(mesh, e, tol);
    if (rec.critical)
      out.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------

Mesh reference_tet() {
  return Mesh::build({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {{0, 1, 2, 3}});
}

namespace {

std::vector<Vec3> patch_vertices() {
  return {Vec3(0, 0, 0), Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0)};
}

std::vector<std::array<int, 4>> patch_tets(int count) {
  std::vector<std::array<int, 4>> t;
  for (int i = 0; i < count; ++i)
    t.push_back({0, 1, 2 + i, 2 + (i + 1) % 4});
  return t;
}

}  // namespace

Mesh inner_critical_patch() { return Mesh::build(patch_vertices(), patch_tets(4)); }

Mesh outer_critical_patch(int iota) {
  if (iota < 1 || iota > 3)
    throw MeshError(MeshErrorKind::InvalidParameter, "outer critical patch needs iota in {1,2,3}");
  if (iota == 1)
    return reference_tet();
  auto v = patch_vertices();
  v.resize(static_cast<std::size_t>(iota + 3));
  return Mesh::build(std::move(v), patch_tets(iota));
}

Mesh capped_inner_patch() {
  auto v = patch_vertices();
  v.emplace_back(0, 0, 2);
  auto t = patch_tets(4);
  for (int i = 0; i < 4; ++i)
    t.push_back({1, 2 + i, 2 + (i + 1) % 4, 6});
  return Mesh::build(std::move(v), std::move(t));
}

Mesh perturbed_inner_patch(double offset) {
  const Mesh capped = capped_inner_patch();
  auto v = capped.vertices();
  v[2] += Vec3(0.0, offset, offset);
  v[3].z() += offset;
  return Mesh::build(std::move(v), capped.tets());
}

Mesh kuhn_cube(int n) {
  if (n < 1)
    throw MeshError(MeshErrorKind::InvalidParameter, "kuhn cube needs n >= 1");
  const int np = n + 1;
  auto id = [np](int i, int j, int k) { return i + np * (j + np * k); };
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(np * np * np));
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        v.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n, static_cast<double>(k) / n);
  std::array<int, 3> perm{0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<std::array<int, 4>> tets;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> tet{};
          tet[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[static_cast<std::size_t>(p[static_cast<std::size_t>(s)])];
            tet[static_cast<std::size_t>(s + 1)] = id(c[0], c[1], c[2]);
          }
          tets.push_back(tet);
        }
  return Mesh::build(std::move(v), std::move(tets));
}

Mesh generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
  case MeshKind::reference:
    return reference_tet();
  case MeshKind::inner_critical_patch:
    return inner_critical_patch();
  case MeshKind::outer_critical_patch:
    return outer_critical_patch(spec.iota);
  case MeshKind::kuhn_cube:
    return kuhn_cube(spec.n);
  case MeshKind::capped_inner_patch:
    return capped_inner_patch();
  case MeshKind::perturbed_inner_patch:
    return perturbed_inner_patch(spec.offset);
  }
  throw MeshError(MeshErrorKind::InvalidParameter, "unknown mesh kind");
}

std::optional<MeshKind> parse_mesh_kind(const std::string& name) {
  if (name == "reference")
    return MeshKind::reference;
  if (name == "inner-critical-patch")
    return MeshKind::inner_critical_patch;
  if (name == "outer-critical-patch")
    return MeshKind::outer_critical_patch;
  if (name == "kuhn" || name == "kuhn-cube")
    return MeshKind::kuhn_cube;
  if (name == "capped-inner-patch")
    return MeshKind::capped_inner_patch;
  if (name == "perturbed-inner-patch")
    return MeshKind::perturbed_inner_patch;
  return std::nullopt;
}

std::string to_string(MeshKind kind) {
  switch (kind) {
  case MeshKind::reference:
    return "reference";
  case MeshKind::inner_critical_patch:
    return "inner-critical-patch";
  case MeshKind::outer_critical_patch:
    return "outer-critical-patch";
  case MeshKind::kuhn_cube:
    return "kuhn";
  case MeshKind::capped_inner_patch:
    return "capped-inner-patch";
  case MeshKind::perturbed_inner_patch:
    return "perturbed-inner-patch";
  }
  return "unknown";
}

}  // namespace cr3d
