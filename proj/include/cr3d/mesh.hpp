#pragma once

// Conforming tetrahedral meshes with derived facet/edge topology, boundary
// classification, patches, barycentric geometry and critical-edge detection.

#include <Eigen/Core>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cr3d {

using Vec3 = Eigen::Vector3d;

enum class MeshErrorKind { NonConforming, Degenerate, IndexOutOfRange, UnknownEntity, InvalidParameter };

class MeshError : public std::runtime_error {
public:
  MeshError(MeshErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  MeshErrorKind kind() const { return kind_; }

private:
  MeshErrorKind kind_;
};

const char* to_string(MeshErrorKind kind);

struct Facet {
  std::array<int, 3> vertices{};  // sorted
  std::vector<int> tets;          // 1 (boundary) or 2 (inner)
  bool boundary = false;
};

struct Edge {
  std::array<int, 2> vertices{};  // sorted
  std::vector<int> tets;
  std::vector<int> facets;
  bool boundary = false;
};

enum class EntityType { facet, edge, vertex };

/// Local edges of a tet as pairs of local vertex indices.
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

class Mesh {
public:
  /// Builds topology and checks conformity. Tets with negative orientation
  /// are flipped by swapping their last two vertices.
  static Mesh build(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_tets() const { return static_cast<int>(tets_.size()); }
  int num_facets() const { return static_cast<int>(facets_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Vec3& vertex(int v) const { return vertices_.at(static_cast<std::size_t>(v)); }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::array<int, 4>& tet(int t) const { return tets_.at(static_cast<std::size_t>(t)); }
  const std::vector<std::array<int, 4>>& tets() const { return tets_; }
  const Facet& facet(int f) const { return facets_.at(static_cast<std::size_t>(f)); }
  const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }

  double volume(int t) const { return volumes_.at(static_cast<std::size_t>(t)); }
  double facet_area(int f) const;
  /// Unit normal of a facet (orientation follows the sorted vertex triple).
  Vec3 facet_normal(int f) const;
  double diameter() const;

  bool vertex_on_boundary(int v) const { return vertex_boundary_.at(static_cast<std::size_t>(v)); }

  std::optional<int> find_facet(std::array<int, 3> vertices) const;
  std::optional<int> find_edge(std::array<int, 2> vertices) const;

  /// Facet ids of a tet; entry i is the facet opposite local vertex i.
  const std::array<int, 4>& tet_facets(int t) const { return tet_facets_.at(static_cast<std::size_t>(t)); }
  /// Edge ids of a tet in kTetEdges order.
  const std::array<int, 6>& tet_edges(int t) const { return tet_edges_.at(static_cast<std::size_t>(t)); }
  const std::vector<int>& vertex_tets(int v) const { return vertex_tets_.at(static_cast<std::size_t>(v)); }

  /// Local index of a global vertex in a tet, or -1.
  int local_index(int t, int v) const;
  /// The local vertex of `t` not on facet `f`.
  int opposite_local_vertex(int t, int f) const;

  /// T_F, T_E or T_z as sorted tet ids. Throws UnknownEntity.
  std::vector<int> patch(EntityType type, int id) const;
  /// Sum of tet volumes of a patch.
  double patch_volume(const std::vector<int>& tets) const;

  std::array<double, 4> barycentric(int t, const Vec3& x) const;
  std::array<Vec3, 4> barycentric_gradients(int t) const;
  Vec3 to_physical(int t, const std::array<double, 4>& bary) const;

private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<double> volumes_;
  std::vector<Facet> facets_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 4>> tet_facets_;
  std::vector<std::array<int, 6>> tet_edges_;
  std::vector<std::vector<int>> vertex_tets_;
  std::vector<bool> vertex_boundary_;
  std::vector<std::array<Vec3, 4>> grads_;
};

/// Mesh with vertex coordinates mapped by x -> scale * R x + shift.
Mesh transformed(const Mesh& mesh, const Eigen::Matrix3d& rotation, const Vec3& shift, double scale);

/// Sub-mesh made of the given tets; vertices are renumbered in increasing
/// original order.
Mesh submesh(const Mesh& mesh, const std::vector<int>& tets);

// ---------------------------------------------------------------------------
// Critical edges

struct CriticalEdgeRecord {
  int edge = -1;
  bool inner = false;
  bool critical = false;
  /// T_E in patch order: cyclic for inner edges, a chain starting at the
  /// lowest-id end tet for outer edges. Consecutive tets share a facet.
  std::vector<int> patch;
  /// Unit normals of the (at most two, when critical) planes holding the
  /// facets that contain the edge.
  std::vector<Vec3> planes;
  int iota() const { return static_cast<int>(patch.size()); }
};

inline constexpr double kDefaultCoplanarTol = 1e-9;

/// Patch ordering and plane clustering for one edge, whether critical or not.
CriticalEdgeRecord describe_edge(const Mesh& mesh, int edge, double tol = kDefaultCoplanarTol);

/// All critical edges, in edge-id order.
std::vector<CriticalEdgeRecord> detect_critical_edges(const Mesh& mesh, double tol = kDefaultCoplanarTol);

// ---------------------------------------------------------------------------
// Generators

enum class MeshKind {
  reference,
  inner_critical_patch,
  outer_critical_patch,
  kuhn_cube,
  capped_inner_patch,
  perturbed_inner_patch,
};

struct GeneratorSpec {
  MeshKind kind = MeshKind::reference;
  int n = 1;            // kuhn_cube subdivisions
  int iota = 1;         // outer_critical_patch size
  double offset = 0.1;  // perturbed_inner_patch displacement
};

Mesh generate(const GeneratorSpec& spec);

/// Parses the generator names used on the command line
/// (reference, inner-critical-patch, outer-critical-patch, kuhn, ...).
std::optional<MeshKind> parse_mesh_kind(const std::string& name);
std::string to_string(MeshKind kind);

Mesh reference_tet();
/// Four tets [p, q, a_i, a_{i+1}] around the inner edge p = 0, q = e_z with
/// a_i the unit vectors +x, +y, -x, -y. Vertices: p, q, a_1..a_4.
Mesh inner_critical_patch();
/// The first iota tets of the inner patch; edge [p, q] becomes an outer
/// critical edge. iota = 1 returns the reference tetrahedron.
Mesh outer_critical_patch(int iota);
/// n^3 subcubes of the unit cube, each split into 6 tets along its main
/// diagonal.
Mesh kuhn_cube(int n);
/// Inner patch with four more tets [q, a_i, a_{i+1}, r], r = 2 e_z, glued on
/// top. q becomes an interior vertex and every patch tet gets a second inner
/// facet that does not contain [p, q].
Mesh capped_inner_patch();
/// Capped inner patch with a_1 moved by offset (e_y + e_z) and a_2 by
/// offset e_z, which breaks the coplanarity of the facets around [p, q].
Mesh perturbed_inner_patch(double offset);

}  // namespace cr3d
