#include "cr3d/fespace.hpp"

#include "cr3d/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace cr3d {

// ---------------------------------------------------------------------------
// BaryPoly

BaryPoly::BaryPoly(std::vector<BaryTerm> terms) : terms_(std::move(terms)) { compress(); }

BaryPoly BaryPoly::univariate(const UnivariatePoly& q, int local) {
  const UnivariatePoly r = q.compose_affine(1.0, -2.0);
  std::vector<BaryTerm> terms;
  for (int j = 0; j <= r.degree(); ++j) {
    BaryTerm t;
    t.exp[static_cast<std::size_t>(local)] = j;
    t.coeff = r.coeff(j);
    terms.push_back(t);
  }
  return BaryPoly(std::move(terms));
}

BaryPoly BaryPoly::monomial(const std::array<int, 4>& exp, double coeff) {
  return BaryPoly({BaryTerm{exp, coeff}});
}

BaryPoly BaryPoly::constant(double c) { return BaryPoly({BaryTerm{{0, 0, 0, 0}, c}}); }

void BaryPoly::compress() {
  std::map<std::array<int, 4>, double> acc;
  for (const auto& t : terms_)
    acc[t.exp] += t.coeff;
  terms_.clear();
  for (const auto& [e, c] : acc)
    if (c != 0.0)
      terms_.push_back(BaryTerm{e, c});
}

int BaryPoly::degree() const {
  int d = 0;
  for (const auto& t : terms_)
    d = std::max(d, t.exp[0] + t.exp[1] + t.exp[2] + t.exp[3]);
  return d;
}

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i)
    r *= x;
  return r;
}

}  // namespace

double BaryPoly::operator()(const std::array<double, 4>& l) const {
  double s = 0.0;
  for (const auto& t : terms_)
    s += t.coeff * ipow(l[0], t.exp[0]) * ipow(l[1], t.exp[1]) * ipow(l[2], t.exp[2]) * ipow(l[3], t.exp[3]);
  return s;
}

std::array<double, 4> BaryPoly::bary_derivatives(const std::array<double, 4>& l) const {
  std::array<double, 4> d{};
  for (const auto& t : terms_)
    for (std::size_t i = 0; i < 4; ++i) {
      if (t.exp[i] == 0)
        continue;
      double v = t.coeff * t.exp[i];
      for (std::size_t j = 0; j < 4; ++j)
        v *= ipow(l[j], j == i ? t.exp[j] - 1 : t.exp[j]);
      d[i] += v;
    }
  return d;
}

Vec3 BaryPoly::gradient(const std::array<double, 4>& l, const std::array<Vec3, 4>& g) const {
  const auto d = bary_derivatives(l);
  return d[0] * g[0] + d[1] * g[1] + d[2] * g[2] + d[3] * g[3];
}

BaryPoly BaryPoly::operator+(const BaryPoly& o) const {
  std::vector<BaryTerm> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return BaryPoly(std::move(t));
}

BaryPoly BaryPoly::operator*(double s) const {
  std::vector<BaryTerm> t = terms_;
  for (auto& x : t)
    x.coeff *= s;
  return BaryPoly(std::move(t));
}

// ---------------------------------------------------------------------------
// Keys

const char* to_string(DofKind kind) {
  switch (kind) {
  case DofKind::VertexNode:
    return "VertexNode";
  case DofKind::EdgeNode:
    return "EdgeNode";
  case DofKind::FacetNode:
    return "FacetNode";
  case DofKind::CellNode:
    return "CellNode";
  case DofKind::CRCell:
    return "CRCell";
  case DofKind::CRFacet:
    return "CRFacet";
  case DofKind::PressureNode:
    return "PressureNode";
  }
  return "?";
}

const char* to_string(SpaceKind kind) {
  switch (kind) {
  case SpaceKind::Sk0:
    return "Sk0";
  case SpaceKind::Sk0prime:
    return "Sk0prime";
  case SpaceKind::Bnc:
    return "Bnc";
  case SpaceKind::CRk0:
    return "CRk0";
  case SpaceKind::Pkm1:
    return "Pk-1";
  case SpaceKind::Pkm1_0:
    return "Pk-1,0";
  }
  return "?";
}

std::string DofKey::to_string() const {
  std::ostringstream os;
  os << cr3d::to_string(kind) << ':' << entity << ":[" << mu[0] << ',' << mu[1] << ',' << mu[2] << ',' << mu[3]
     << "]:" << component;
  return os.str();
}

const BaryPoly* ShapeFunction::piece(int t) const {
  auto it = std::lower_bound(support.begin(), support.end(), t);
  if (it == support.end() || *it != t)
    return nullptr;
  return &pieces[static_cast<std::size_t>(it - support.begin())];
}

double ShapeFunction::evaluate(const Mesh&, int t, const std::array<double, 4>& l, bool* inside) const {
  const BaryPoly* p = piece(t);
  if (inside)
    *inside = p != nullptr;
  return p ? (*p)(l) : 0.0;
}

Vec3 ShapeFunction::gradient(const Mesh& mesh, int t, const std::array<double, 4>& l, bool* inside) const {
  const BaryPoly* p = piece(t);
  if (inside)
    *inside = p != nullptr;
  return p ? p->gradient(l, mesh.barycentric_gradients(t)) : Vec3::Zero();
}

// ---------------------------------------------------------------------------
// Construction

namespace {

void check_degree(int k) {
  if (k < 1 || k > 6)
    throw UnsupportedDegree("polynomial degree " + std::to_string(k) + " outside 1..6");
}

// All mu in N_0^n with |mu| = total, lexicographically ascending.
std::vector<std::array<int, 4>> multi_indices(int n, int total) {
  std::vector<std::array<int, 4>> out;
  if (total < 0)
    return out;
  std::array<int, 4> mu{};
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      mu[static_cast<std::size_t>(pos)] = left;
      out.push_back(mu);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      mu[static_cast<std::size_t>(pos)] = e;
      self(self, pos + 1, left - e);
    }
  };
  rec(rec, 0, total);
  return out;
}

// prod_i lambda_{v_i}^{pow_i} on each tet of the patch.
ShapeFunction bernstein(const Mesh& mesh, DofKey key, const std::vector<int>& verts, const std::vector<int>& pows,
                        std::vector<int> patch) {
  ShapeFunction f;
  f.key = key;
  f.support = std::move(patch);
  for (int t : f.support) {
    std::array<int, 4> e{};
    for (std::size_t i = 0; i < verts.size(); ++i)
      e[static_cast<std::size_t>(mesh.local_index(t, verts[i]))] = pows[i];
    f.pieces.push_back(BaryPoly::monomial(e));
  }
  return f;
}

void add_conforming(const Mesh& mesh, int k, bool vertices, std::vector<ShapeFunction>& out) {
  if (vertices)
    for (int v = 0; v < mesh.num_vertices(); ++v)
      if (!mesh.vertex_on_boundary(v))
        out.push_back(bernstein(mesh, DofKey{DofKind::VertexNode, v, {}, -1}, {v}, {k},
                                mesh.patch(EntityType::vertex, v)));
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge(e).boundary)
      continue;
    const auto& ev = mesh.edge(e).vertices;
    for (const auto& mu : multi_indices(2, k - 2))
      out.push_back(bernstein(mesh, DofKey{DofKind::EdgeNode, e, mu, -1}, {ev[0], ev[1]}, {mu[0] + 1, mu[1] + 1},
                              mesh.patch(EntityType::edge, e)));
  }
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (mesh.facet(f).boundary)
      continue;
    const auto& fv = mesh.facet(f).vertices;
    for (const auto& mu : multi_indices(3, k - 3))
      out.push_back(bernstein(mesh, DofKey{DofKind::FacetNode, f, mu, -1}, {fv[0], fv[1], fv[2]},
                              {mu[0] + 1, mu[1] + 1, mu[2] + 1}, mesh.patch(EntityType::facet, f)));
  }
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tv = mesh.tet(t);
    for (const auto& mu : multi_indices(4, k - 4))
      out.push_back(bernstein(mesh, DofKey{DofKind::CellNode, t, mu, -1}, {tv[0], tv[1], tv[2], tv[3]},
                              {mu[0] + 1, mu[1] + 1, mu[2] + 1, mu[3] + 1}, {t}));
  }
}

void add_nonconforming(const Mesh& mesh, int k, std::vector<ShapeFunction>& out) {
  if (k % 2 == 0) {
    for (int t = 0; t < mesh.num_tets(); ++t)
      out.push_back(cr_cell_function(mesh, k, t));
  } else {
    for (int f = 0; f < mesh.num_facets(); ++f)
      if (!mesh.facet(f).boundary)
        out.push_back(cr_facet_function(mesh, k, f));
  }
}

}  // namespace

ShapeFunction cr_cell_function(const Mesh& mesh, int k, int tet) {
  if (k < 2 || k % 2 != 0)
    throw UnsupportedDegree("tet-oriented CR functions need even k >= 2");
  const UnivariatePoly q = q_k(k);
  BaryPoly p = BaryPoly::constant(-1.0);
  for (int z = 0; z < 4; ++z)
    p = p + BaryPoly::univariate(q, z);
  ShapeFunction f;
  f.key = DofKey{DofKind::CRCell, tet, {}, -1};
  f.support = {tet};
  f.pieces = {p};
  (void)mesh;
  return f;
}

ShapeFunction cr_facet_function(const Mesh& mesh, int k, int facet) {
  if (k < 1 || k % 2 != 1)
    throw UnsupportedDegree("facet-oriented CR functions need odd k >= 1");
  if (mesh.facet(facet).boundary)
    throw MeshError(MeshErrorKind::UnknownEntity, "facet-oriented CR functions live on inner facets");
  const UnivariatePoly q = q_k(k);
  ShapeFunction f;
  f.key = DofKey{DofKind::CRFacet, facet, {}, -1};
  f.support = mesh.patch(EntityType::facet, facet);
  for (int t : f.support)
    f.pieces.push_back(BaryPoly::univariate(q, mesh.opposite_local_vertex(t, facet)));
  return f;
}

int pressure_dim_per_tet(int k) { return k * (k + 1) * (k + 2) / 6; }

std::vector<BaryPoly> pressure_basis(int k) {
  check_degree(k);
  std::vector<BaryPoly> out;
  if (k == 1) {
    out.push_back(BaryPoly::constant(1.0));
  } else if (k == 2) {
    const UnivariatePoly p1 = jacobi(0.0, 3.0, 1);
    for (int z = 0; z < 4; ++z)
      out.push_back(BaryPoly::univariate(p1, z));
  } else {
    for (const auto& mu : multi_indices(4, k - 1))
      out.push_back(BaryPoly::monomial(mu));
  }
  return out;
}

FESpace::FESpace(const Mesh& mesh, int k, SpaceKind kind) : k_(k), kind_(kind) {
  check_degree(k);
  switch (kind) {
  case SpaceKind::Sk0:
    add_conforming(mesh, k, true, functions_);
    break;
  case SpaceKind::Sk0prime:
    add_conforming(mesh, k, false, functions_);
    break;
  case SpaceKind::Bnc:
    add_nonconforming(mesh, k, functions_);
    break;
  case SpaceKind::CRk0:
    add_conforming(mesh, k, k % 2 == 0, functions_);
    add_nonconforming(mesh, k, functions_);
    break;
  case SpaceKind::Pkm1:
  case SpaceKind::Pkm1_0: {
    const auto basis = pressure_basis(k);
    for (int t = 0; t < mesh.num_tets(); ++t)
      for (std::size_t j = 0; j < basis.size(); ++j) {
        ShapeFunction f;
        f.key = DofKey{DofKind::PressureNode, t, {static_cast<int>(j), 0, 0, 0}, -1};
        f.support = {t};
        f.pieces = {basis[j]};
        functions_.push_back(std::move(f));
      }
    break;
  }
  }
  on_tet_.assign(static_cast<std::size_t>(mesh.num_tets()), {});
  for (int i = 0; i < dim(); ++i)
    for (int t : functions_[static_cast<std::size_t>(i)].support)
      on_tet_[static_cast<std::size_t>(t)].push_back(i);
}

int FESpace::degree() const { return (kind_ == SpaceKind::Pkm1 || kind_ == SpaceKind::Pkm1_0) ? k_ - 1 : k_; }

std::vector<DofKey> FESpace::keys() const {
  std::vector<DofKey> out;
  for (const auto& f : functions_)
    out.push_back(f.key);
  return out;
}

std::vector<DofKey> FESpace::vector_keys() const {
  std::vector<DofKey> out;
  for (const auto& f : functions_)
    for (int c = 0; c < 3; ++c) {
      DofKey key = f.key;
      key.component = c;
      out.push_back(key);
    }
  return out;
}

std::vector<DofKey> enumerate(SpaceKind space, const Mesh& mesh, int k, bool vector) {
  const FESpace s(mesh, k, space);
  return vector ? s.vector_keys() : s.keys();
}

std::vector<double> pressure_coefficients(const Mesh& mesh, int k, const std::vector<int>& tets,
                                          const std::vector<BaryPoly>& pieces) {
  const auto basis = pressure_basis(k);
  const int n = static_cast<int>(basis.size());
  std::vector<double> out(static_cast<std::size_t>(mesh.num_tets() * n), 0.0);
  for (std::size_t i = 0; i < tets.size(); ++i) {
    const int t = tets[i];
    const int deg = std::max(pieces[i].degree(), k - 1) + k - 1;
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd rhs(n);
    for (int a = 0; a < n; ++a) {
      rhs(a) = integrate_tet(
          mesh, t, [&](const QuadPoint& q) { return pieces[i](q.bary) * basis[static_cast<std::size_t>(a)](q.bary); },
          deg);
      for (int b = 0; b < n; ++b)
        m(a, b) = integrate_tet(
            mesh, t,
            [&](const QuadPoint& q) {
              return basis[static_cast<std::size_t>(a)](q.bary) * basis[static_cast<std::size_t>(b)](q.bary);
            },
            2 * (k - 1));
    }
    const Eigen::VectorXd c = m.llt().solve(rhs);
    for (int a = 0; a < n; ++a)
      out[static_cast<std::size_t>(t * n + a)] = c(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audits

namespace {

// Local barycentric point of tet t for a point given in facet coordinates.
std::array<double, 4> lift(const Mesh& mesh, int t, const std::array<int, 3>& fv, const std::array<double, 4>& b) {
  std::array<double, 4> l{};
  for (std::size_t i = 0; i < 3; ++i)
    l[static_cast<std::size_t>(mesh.local_index(t, fv[i]))] = b[i];
  return l;
}

// Largest moment of `side_value` (jump or trace) against the monomials
// b1^a b2^c, a + c <= k - 1, on facet f.
double facet_moments(const Mesh& mesh, int f, int k, const std::function<double(const QuadPoint&)>& side_value) {
  double worst = 0.0;
  for (int a = 0; a <= k - 1; ++a)
    for (int c = 0; a + c <= k - 1; ++c) {
      const double m = integrate_facet(
          mesh, f, [&](const QuadPoint& q) { return side_value(q) * ipow(q.bary[1], a) * ipow(q.bary[2], c); },
          2 * k);
      worst = std::max(worst, std::abs(m));
    }
  return worst;
}

template <class ValueOnTet>
double facet_audit(const Mesh& mesh, int k, const std::vector<int>& facets, ValueOnTet value) {
  double worst = 0.0;
  for (int f : facets) {
    const auto& fac = mesh.facet(f);
    const auto& fv = fac.vertices;
    auto side = [&](const QuadPoint& q) {
      const int t0 = fac.tets[0];
      double v = value(t0, lift(mesh, t0, fv, q.bary));
      if (!fac.boundary) {
        const int t1 = fac.tets[1];
        v -= value(t1, lift(mesh, t1, fv, q.bary));
      }
      return v;
    };
    worst = std::max(worst, facet_moments(mesh, f, k, side));
  }
  return worst;
}

}  // namespace

double jump_moment_audit(const ShapeFunction& f, const Mesh& mesh, int k) {
  std::vector<int> facets;
  for (int t : f.support)
    for (int x : mesh.tet_facets(t))
      facets.push_back(x);
  std::sort(facets.begin(), facets.end());
  facets.erase(std::unique(facets.begin(), facets.end()), facets.end());
  return facet_audit(mesh, k, facets, [&](int t, const std::array<double, 4>& l) {
    const BaryPoly* p = f.piece(t);
    return p ? (*p)(l) : 0.0;
  });
}

double jump_moment_audit(const FESpace& space, const std::vector<double>& v, const Mesh& mesh) {
  if (static_cast<int>(v.size()) != space.dim())
    throw std::invalid_argument("coefficient vector does not match the space dimension");
  std::vector<int> facets(static_cast<std::size_t>(mesh.num_facets()));
  std::iota(facets.begin(), facets.end(), 0);
  return facet_audit(mesh, space.k(), facets, [&](int t, const std::array<double, 4>& l) {
    double s = 0.0;
    for (int i : space.on_tet(t))
      s += v[static_cast<std::size_t>(i)] * (*space.function(i).piece(t))(l);
    return s;
  });
}

double l2_norm(const ShapeFunction& f, const Mesh& mesh) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.support.size(); ++i) {
    const BaryPoly& p = f.pieces[i];
    s += integrate_tet(
        mesh, f.support[i], [&](const QuadPoint& q) { return p(q.bary) * p(q.bary); }, 2 * p.degree());
  }
  return std::sqrt(s);
}

double direct_sum_audit(const Mesh& mesh, int k) {
  const FESpace space(mesh, k, SpaceKind::CRk0);
  const int n = space.dim();
  if (n == 0)
    return 0.0;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  const QuadRule& rule = simplex_rule(3, 2 * k);
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& loc = space.on_tet(t);
    const auto grads = mesh.barycentric_gradients(t);
    const double scale = 6.0 * mesh.volume(t);
    for (std::size_t p = 0; p < rule.size(); ++p) {
      const auto& x = rule.points[p];
      const std::array<double, 4> l{1.0 - x[0] - x[1] - x[2], x[0], x[1], x[2]};
      std::vector<double> val(loc.size());
      std::vector<Vec3> grad(loc.size());
      for (std::size_t a = 0; a < loc.size(); ++a) {
        const BaryPoly& piece = *space.function(loc[a]).piece(t);
        val[a] = piece(l);
        grad[a] = piece.gradient(l, grads);
      }
      const double w = scale * rule.weights[p];
      for (std::size_t a = 0; a < loc.size(); ++a)
        for (std::size_t b = 0; b < loc.size(); ++b)
          g(loc[a], loc[b]) += w * (val[a] * val[b] + grad[a].dot(grad[b]));
    }
  }
  const Eigen::VectorXd d = g.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd e = d.asDiagonal() * g * d.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  return svd.singularValues().minCoeff();
}

std::array<std::array<std::int64_t, 3>, 3> endpoint_matrix(int k) {
  const UnivariatePoly q = q_k(k);
  const auto plus = static_cast<std::int64_t>(std::llround(q(1.0)));
  const auto minus = static_cast<std::int64_t>(std::llround(q(-1.0)));
  std::array<std::array<std::int64_t, 3>, 3> m{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      m[i][j] = i == j ? minus : plus;
  return m;
}

std::int64_t determinant(const std::array<std::array<std::int64_t, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

QdkAudit qdk_audit(int d, int k) {
  if (d < 2 || d > 4)
    throw UnsupportedDegree("qdk_audit supports d = 2..4");
  const UnivariatePoly q = q_dk(d, k);
  const QuadRule& rule = simplex_rule(d - 1, 2 * k);
  // reference d-simplex: vertex 0 at the origin (this is z), vertex i at e_i
  auto lambda_z = [](const std::vector<double>& x) {
    double s = 1.0;
    for (double xi : x)
      s -= xi;
    return s;
  };
  QdkAudit out;
  for (int opposite = 0; opposite <= d; ++opposite) {
    std::vector<int> fv;
    for (int v = 0; v <= d; ++v)
      if (v != opposite)
        fv.push_back(v);
    // facet point: sum_i mu_i vertex(fv[i]) with mu_0 = 1 - sum of rule coords
    auto physical = [&](const std::array<double, 4>& y) {
      std::vector<double> x(static_cast<std::size_t>(d), 0.0);
      double mu0 = 1.0;
      for (int j = 0; j < d - 1; ++j)
        mu0 -= y[static_cast<std::size_t>(j)];
      for (int i = 0; i < d; ++i) {
        const double mu = i == 0 ? mu0 : y[static_cast<std::size_t>(i - 1)];
        if (fv[static_cast<std::size_t>(i)] > 0)
          x[static_cast<std::size_t>(fv[static_cast<std::size_t>(i)] - 1)] += mu;
      }
      return x;
    };
    if (opposite == 0) {
      for (const auto& y : rule.points)
        out.facet_value_error = std::max(out.facet_value_error, std::abs(q(1.0 - 2.0 * lambda_z(physical(y))) - 1.0));
      continue;
    }
    std::vector<int> e(static_cast<std::size_t>(d - 1), 0);
    auto visit = [&](auto&& self, int pos, int left) -> void {
      if (pos == d - 1) {
        double s = 0.0;
        for (std::size_t p = 0; p < rule.size(); ++p) {
          double v = rule.weights[p] * q(1.0 - 2.0 * lambda_z(physical(rule.points[p])));
          for (int j = 0; j < d - 1; ++j)
            v *= ipow(rule.points[p][static_cast<std::size_t>(j)], e[static_cast<std::size_t>(j)]);
          s += v;
        }
        out.moment_residual = std::max(out.moment_residual, std::abs(s));
        return;
      }
      for (int a = 0; a <= left; ++a) {
        e[static_cast<std::size_t>(pos)] = a;
        self(self, pos + 1, left - a);
      }
    };
    visit(visit, 0, k - 1);
  }
  return out;
}

std::uint64_t dof_digest(const std::vector<DofKey>& keys) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& key : keys) {
    for (char c : key.to_string() + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace cr3d
