#include "cr3d/stability.hpp"

#include "cr3d/fespace.hpp"
#include "cr3d/polylib.hpp"
#include "cr3d/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace cr3d {

const char* to_string(StabilityError::Kind kind) {
  switch (kind) {
  case StabilityError::Kind::DisconnectedMacro:
    return "DisconnectedMacro";
  case StabilityError::Kind::NotCritical:
    return "NotCritical";
  case StabilityError::Kind::ApexNotOnEdge:
    return "ApexNotOnEdge";
  }
  return "StabilityError";
}

const char* to_string(EliminationStatus s) {
  switch (s) {
  case EliminationStatus::certified:
    return "certified";
  case EliminationStatus::singular:
    return "singular";
  case EliminationStatus::precondition_unmet:
    return "precondition_unmet";
  case EliminationStatus::not_applicable:
    return "not_applicable";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// sym_eig

namespace {

void jacobi_rotate(Eigen::MatrixXd& c, Eigen::MatrixXd& v, Eigen::Index p, Eigen::Index q) {
  const double apq = c(p, q);
  const double theta = (c(q, q) - c(p, p)) / (2.0 * apq);
  const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double cs = 1.0 / std::sqrt(t * t + 1.0);
  const double sn = t * cs;
  const double app = c(p, p) - t * apq;
  const double aqq = c(q, q) + t * apq;
  const Eigen::Index n = c.rows();
  double* cp = c.col(p).data();
  double* cq = c.col(q).data();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = cp[k], y = cq[k];
    cp[k] = cs * x - sn * y;
    cq[k] = sn * x + cs * y;
  }
  c.row(p) = c.col(p).transpose();
  c.row(q) = c.col(q).transpose();
  c(p, p) = app;
  c(q, q) = aqq;
  c(p, q) = c(q, p) = 0.0;
  double* vp = v.col(p).data();
  double* vq = v.col(q).data();
  for (Eigen::Index k = 0; k < v.rows(); ++k) {
    const double x = vp[k], y = vq[k];
    vp[k] = cs * x - sn * y;
    vq[k] = sn * x + cs * y;
  }
}

}  // namespace

EigenResult sym_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, int max_sweeps) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || M.rows() != n || M.cols() != n)
    throw DimensionMismatch("sym_eig: A and M must be square of equal size");
  EigenResult r;
  if (n == 0)
    return r;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw NotSPD("sym_eig: M is not symmetric positive definite");
  const auto L = llt.matrixL();
  Eigen::MatrixXd c = L.solve(A);
  c = L.solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose()).eval();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  const double scale = c.norm();
  const double eps = std::numeric_limits<double>::epsilon();
  bool converged = scale == 0.0;
  while (!converged && r.sweeps < max_sweeps) {
    ++r.sweeps;
    double off = 0.0;
    for (Eigen::Index q = 1; q < n; ++q)
      for (Eigen::Index p = 0; p < q; ++p)
        off += c(p, q) * c(p, q);
    if (std::sqrt(2.0 * off) <= eps * scale) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = c(p, q);
        if (apq == 0.0)
          continue;
        // entries that no longer affect the diagonal are dropped
        if (std::abs(apq) <= 0.1 * eps * std::min(std::abs(c(p, p)), std::abs(c(q, q)))) {
          c(p, q) = c(q, p) = 0.0;
          continue;
        }
        jacobi_rotate(c, v, p, q);
      }
  }
  if (!converged)
    throw NoConvergence("sym_eig: Jacobi sweeps did not converge in " + std::to_string(max_sweeps) + " sweeps");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return c(a, a) < c(b, b); });
  const Eigen::MatrixXd x = L.transpose().solve(v);
  r.values.resize(n);
  r.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = order[static_cast<std::size_t>(i)];
    r.values(i) = c(j, j);
    Eigen::VectorXd col = x.col(j);
    Eigen::Index imax = 0;
    col.cwiseAbs().maxCoeff(&imax);
    if (col(imax) < 0)
      col = -col;
    r.vectors.col(i) = col;
  }
  return r;
}

double eig_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, const EigenResult& r) {
  const double na = A.norm(), nm = M.norm();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < r.values.size(); ++i) {
    const Eigen::VectorXd x = r.vectors.col(i);
    const double lam = r.values(i);
    const double res = (A * x - lam * (M * x)).norm() / ((na + std::abs(lam) * nm) * x.norm());
    worst = std::max(worst, res);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Inf-sup

InfSupReport infsup_constant(const AssembledSystem& system, const Mesh& mesh, const Tolerances& tol) {
  InfSupReport rep;
  rep.k = system.k;
  rep.pair = to_string(system.velocity);
  rep.velocity_dofs = static_cast<int>(system.A.rows());
  rep.pressure_dofs = static_cast<int>(system.Mp.rows());
  rep.num_tets = mesh.num_tets();
  rep.num_vertices = mesh.num_vertices();
  rep.validated_range = in_validated_range(system.k);
  rep.tolerances = tol;

  const Eigen::Index np = system.Mp.rows();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(np, np);
  if (system.A.rows() > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(system.A);
    if (llt.info() != Eigen::Success)
      throw NotSPD("infsup: velocity Gram matrix is not positive definite");
    const Eigen::MatrixXd x = llt.solve(system.B.transpose());
    s = system.B * x;
    s = 0.5 * (s + s.transpose()).eval();
  }
  if (np < 2)
    return rep;

  // orthonormal basis Z of (Mp c)^perp: the Mp-orthogonal complement of c
  const Eigen::VectorXd u = (system.Mp * system.constant_pressure).normalized();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd z = q.rightCols(np - 1);
  const Eigen::MatrixXd sd = z.transpose() * s * z;
  const Eigen::MatrixXd md = z.transpose() * system.Mp * z;
  const EigenResult eig = sym_eig(0.5 * (sd + sd.transpose()), 0.5 * (md + md.transpose()));

  rep.lambda_max = eig.values.maxCoeff();
  rep.gamma_h = std::sqrt(std::max(0.0, eig.values(0)));
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) <= tol.rank * rep.lambda_max)
      ++rep.spurious_modes;
  const double ns = s.norm(), nm = system.Mp.norm();
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(5, eig.values.size()); ++i) {
    const Eigen::VectorXd qv = z * eig.vectors.col(i);
    const double lam = eig.values(i);
    rep.smallest_eigenvalues.push_back(lam);
    rep.eigen_residuals.push_back((s * qv - lam * (system.Mp * qv)).norm() /
                                  ((ns + std::abs(lam) * nm) * qv.norm()));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// N-space

NspaceReport nspace_dim(const Mesh& mesh, const std::vector<int>& macro, int k, VelocityKind space, double tol_rank) {
  std::vector<int> tets = macro;
  std::sort(tets.begin(), tets.end());
  tets.erase(std::unique(tets.begin(), tets.end()), tets.end());
  if (tets.empty())
    throw StabilityError(StabilityError::Kind::DisconnectedMacro, "macroelement is empty");
  for (int t : tets)
    if (t < 0 || t >= mesh.num_tets())
      throw MeshError(MeshErrorKind::UnknownEntity, "unknown tet " + std::to_string(t));

  // connectivity through shared facets
  std::vector<bool> seen(tets.size(), false);
  std::queue<std::size_t> todo;
  todo.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const int t = tets[todo.front()];
    todo.pop();
    for (int f : mesh.tet_facets(t))
      for (int n : mesh.facet(f).tets) {
        auto it = std::lower_bound(tets.begin(), tets.end(), n);
        if (it != tets.end() && *it == n) {
          const auto idx = static_cast<std::size_t>(it - tets.begin());
          if (!seen[idx]) {
            seen[idx] = true;
            ++reached;
            todo.push(idx);
          }
        }
      }
  }
  if (reached != tets.size())
    throw StabilityError(StabilityError::Kind::DisconnectedMacro, "macroelement is not facet-connected");

  const Mesh sub = submesh(mesh, tets);
  const AssembledSystem sys = assemble(sub, k, space);
  NspaceReport rep;
  rep.macro = tets;
  rep.k = k;
  rep.space = space;
  rep.pressure_dofs = static_cast<int>(sys.B.rows());
  rep.velocity_dofs = static_cast<int>(sys.B.cols());
  rep.pairing = sys.B;
  if (sys.B.cols() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.B);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv.maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      rep.singular_values.push_back(sv(i));
      if (sv(i) > tol_rank * smax)
        ++rep.rank;
    }
  }
  rep.dim = rep.pressure_dofs - rep.rank;
  return rep;
}

// ---------------------------------------------------------------------------
// Critical pressures

CriticalPressure build_critical_pressure(const Mesh& mesh, int edge, int apex, int k, double tol_coplanar,
                                         bool force) {
  const CriticalEdgeRecord rec = describe_edge(mesh, edge, tol_coplanar);
  if (!rec.critical && !force)
    throw StabilityError(StabilityError::Kind::NotCritical, "edge " + std::to_string(edge) + " is not critical");
  const auto& ev = mesh.edge(edge).vertices;
  if (apex != ev[0] && apex != ev[1])
    throw StabilityError(StabilityError::Kind::ApexNotOnEdge,
                         "vertex " + std::to_string(apex) + " is not an endpoint of edge " + std::to_string(edge));
  CriticalPressure cp;
  cp.edge = edge;
  cp.apex = apex;
  cp.inner = rec.inner;
  cp.k = k;
  cp.tets = rec.patch;
  const UnivariatePoly p = jacobi(0.0, 3.0, k - 1);
  for (std::size_t i = 0; i < cp.tets.size(); ++i) {
    const int t = cp.tets[i];
    const double sign = (i % 2 == 0) ? -1.0 : 1.0;  // (-1)^(i+1)
    cp.signs.push_back(sign);
    cp.pieces.push_back(BaryPoly::univariate(p, mesh.local_index(t, apex)) * (sign / mesh.volume(t)));
    cp.mean += integrate_tet(
        mesh, t, [&](const QuadPoint& q) { return cp.pieces.back()(q.bary); }, k - 1);
  }
  const auto c = pressure_coefficients(mesh, k, cp.tets, cp.pieces);
  cp.coefficients = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  return cp;
}

SpuriousCertificate certify_spurious(const CriticalPressure& pressure, const Mesh& mesh, int k, double threshold) {
  const FESpace space(mesh, k, SpaceKind::Sk0);
  double pnorm2 = 0.0;
  for (std::size_t i = 0; i < pressure.tets.size(); ++i) {
    const BaryPoly& pc = pressure.pieces[i];
    pnorm2 += integrate_tet(
        mesh, pressure.tets[i], [&](const QuadPoint& q) { return pc(q.bary) * pc(q.bary); }, 2 * (k - 1));
  }
  const double pnorm = std::sqrt(pnorm2);

  std::vector<int> candidates;
  for (int t : pressure.tets)
    candidates.insert(candidates.end(), space.on_tet(t).begin(), space.on_tet(t).end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  SpuriousCertificate cert;
  for (int i : candidates) {
    const ShapeFunction& f = space.function(i);
    double gnorm2 = 0.0;
    for (std::size_t j = 0; j < f.support.size(); ++j) {
      const auto grads = mesh.barycentric_gradients(f.support[j]);
      const BaryPoly& piece = f.pieces[j];
      gnorm2 += integrate_tet(
          mesh, f.support[j],
          [&](const QuadPoint& q) { return piece.gradient(q.bary, grads).squaredNorm(); }, 2 * (k - 1));
    }
    Vec3 b = Vec3::Zero();
    for (std::size_t j = 0; j < pressure.tets.size(); ++j) {
      const int t = pressure.tets[j];
      const BaryPoly* piece = f.piece(t);
      if (!piece)
        continue;
      for (int c = 0; c < 3; ++c)
        b[c] += directional_pairing(mesh, t, *piece, Vec3::Unit(c), pressure.pieces[j]);
    }
    const double denom = pnorm * std::sqrt(gnorm2);
    for (int c = 0; c < 3; ++c)
      cert.residual = std::max(cert.residual, std::abs(b[c]) / denom);
    cert.checked_functions += 3;
  }
  cert.pass = cert.residual <= threshold;
  return cert;
}

// ---------------------------------------------------------------------------
// Elimination

namespace {

constexpr double kRefVolume = 1.0 / 6.0;
constexpr double kMinSigma = 1e-8;

double sign_of(const CriticalPressure& cp, int t) {
  for (std::size_t i = 0; i < cp.tets.size(); ++i)
    if (cp.tets[i] == t)
      return cp.signs[i];
  return 0.0;
}

// (p, div(f w)) for a function f given per tet.
double pressure_pairing(const Mesh& mesh, const CriticalPressure& cp, const ShapeFunction& f, const Vec3& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < cp.tets.size(); ++i)
    if (const BaryPoly* piece = f.piece(cp.tets[i]))
      s += directional_pairing(mesh, cp.tets[i], *piece, w, cp.pieces[i]);
  return s;
}

double min_singular(const Eigen::Matrix2d& m) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
  return svd.singularValues().minCoeff();
}

Vec3 centroid(const Mesh& mesh, int t) {
  Vec3 c = Vec3::Zero();
  for (int v : mesh.tet(t))
    c += mesh.vertex(v);
  return c / 4.0;
}

bool facet_has(const Mesh& mesh, int f, int v) {
  const auto& fv = mesh.facet(f).vertices;
  return std::find(fv.begin(), fv.end(), v) != fv.end();
}

EliminationCertificate even_elimination(const Mesh& mesh, const CriticalEdgeRecord& rec, int k, double tol) {
  EliminationCertificate cert;
  cert.edge = rec.edge;
  cert.k = k;
  const auto& ev = mesh.edge(rec.edge).vertices;
  const int p = ev[0], q = ev[1];
  const int t = rec.patch.front();
  cert.tet = t;
  int v = -1;
  for (int x : mesh.tet(t))
    if (x != p && x != q && (v < 0 || x < v))
      v = x;
  const Vec3 s = mesh.vertex(q) - mesh.vertex(p);
  const Vec3 tv = mesh.vertex(q) - mesh.vertex(v);
  const ShapeFunction b = cr_cell_function(mesh, k, t);
  const auto g = mesh.barycentric_gradients(t);
  const double unit = (k + 3.0) / (2.0 * (k + 1.0) * kRefVolume);
  cert.rows = {p, q};
  for (int row = 0; row < 2; ++row) {
    const int apex = cert.rows[static_cast<std::size_t>(row)];
    const CriticalPressure cp = build_critical_pressure(mesh, rec.edge, apex, k, tol);
    const double sigma = sign_of(cp, t);
    const Vec3 dirs[2] = {s, tv};
    for (int col = 0; col < 2; ++col) {
      const double quad = pressure_pairing(mesh, cp, b, dirs[col]);
      const double closed = -sigma * unit * g[static_cast<std::size_t>(mesh.local_index(t, apex))].dot(dirs[col]);
      cert.pairing_error = std::max(cert.pairing_error, std::abs(quad - closed) / std::max(1.0, std::abs(closed)));
      cert.m(row, col) = quad / (-sigma * unit);
    }
  }
  cert.min_singular_value = min_singular(cert.m);
  cert.status = cert.min_singular_value > kMinSigma ? EliminationStatus::certified : EliminationStatus::singular;
  return cert;
}

EliminationCertificate odd_elimination(const Mesh& mesh, const CriticalEdgeRecord& rec, int k, double tol) {
  EliminationCertificate cert;
  cert.edge = rec.edge;
  cert.k = k;
  const auto& ev = mesh.edge(rec.edge).vertices;
  for (int t : rec.patch) {
    int f = -1, g = -1;
    for (int x : mesh.tet_facets(t)) {
      if (mesh.facet(x).boundary)
        continue;
      const bool contains = facet_has(mesh, x, ev[0]) && facet_has(mesh, x, ev[1]);
      if (contains && f < 0)
        f = x;
      if (!contains && g < 0)
        g = x;
    }
    if (f >= 0 && g >= 0) {
      cert.tet = t;
      cert.facet_f = f;
      cert.facet_g = g;
      break;
    }
  }
  if (cert.tet < 0) {
    cert.status = EliminationStatus::precondition_unmet;
    cert.message = "no tet of the edge patch has an inner facet through the edge and one avoiding it";
    return cert;
  }
  const int t = cert.tet;
  const auto& ft = mesh.facet(cert.facet_f).tets;
  const int t2 = ft[0] == t ? ft[1] : ft[0];
  const int v1 = mesh.tet(t)[static_cast<std::size_t>(mesh.opposite_local_vertex(t, cert.facet_f))];
  const int v2 = mesh.tet(t2)[static_cast<std::size_t>(mesh.opposite_local_vertex(t2, cert.facet_f))];
  Vec3 s = mesh.facet_normal(cert.facet_f);
  if (s.dot(centroid(mesh, t2) - mesh.vertex(mesh.facet(cert.facet_f).vertices[0])) < 0)
    s = -s;
  const auto g1 = mesh.barycentric_gradients(t);
  const auto g2 = mesh.barycentric_gradients(t2);
  cert.theta = g1[static_cast<std::size_t>(mesh.local_index(t, v1))].dot(s) -
               g2[static_cast<std::size_t>(mesh.local_index(t2, v2))].dot(s);

  cert.y = mesh.tet(t)[static_cast<std::size_t>(mesh.opposite_local_vertex(t, cert.facet_g))];
  int u = -1;
  for (int x : mesh.tet(t))
    if (x != cert.y && (u < 0 || x < u))
      u = x;
  const Vec3 tv = mesh.vertex(cert.y) - mesh.vertex(u);
  const double dty = g1[static_cast<std::size_t>(mesh.local_index(t, cert.y))].dot(tv);

  const ShapeFunction bf = cr_facet_function(mesh, k, cert.facet_f);
  const ShapeFunction bg = cr_facet_function(mesh, k, cert.facet_g);
  const int other = cert.y == ev[0] ? ev[1] : ev[0];
  cert.rows = {other, cert.y};
  for (int row = 0; row < 2; ++row) {
    const int apex = cert.rows[static_cast<std::size_t>(row)];
    const CriticalPressure cp = build_critical_pressure(mesh, rec.edge, apex, k, tol);
    const double sigma = sign_of(cp, t);
    const double c = -sigma / ((k + 1.0) * kRefVolume);
    const double quad_f = pressure_pairing(mesh, cp, bf, s);
    const double quad_g = pressure_pairing(mesh, cp, bg, tv);
    const double closed_f = c * cert.theta;
    const double closed_g = apex == cert.y ? -sigma * dty / (2.0 * kRefVolume) : c * dty;
    cert.pairing_error =
        std::max({cert.pairing_error, std::abs(quad_f - closed_f) / std::max(1.0, std::abs(closed_f)),
                  std::abs(quad_g - closed_g) / std::max(1.0, std::abs(closed_g))});
    cert.m(row, 0) = quad_f / c;
    cert.m(row, 1) = quad_g / c;
  }
  cert.min_singular_value = min_singular(cert.m);
  cert.status = cert.min_singular_value > kMinSigma ? EliminationStatus::certified : EliminationStatus::singular;
  return cert;
}

}  // namespace

EliminationCertificate certify_elimination(const Mesh& mesh, int edge, int k, double tol_coplanar) {
  const CriticalEdgeRecord rec = describe_edge(mesh, edge, tol_coplanar);
  EliminationCertificate cert;
  cert.edge = edge;
  cert.k = k;
  if (!rec.critical) {
    cert.status = EliminationStatus::precondition_unmet;
    cert.message = "edge is not critical";
    return cert;
  }
  if (k == 1) {
    cert.status = EliminationStatus::not_applicable;
    cert.message = "k = 1 has no elimination by facet-oriented functions";
    return cert;
  }
  return k % 2 == 0 ? even_elimination(mesh, rec, k, tol_coplanar) : odd_elimination(mesh, rec, k, tol_coplanar);
}

std::vector<CriticalCertificate> certify_critical_edges(
    const Mesh& mesh, int k, const Tolerances& tol,
    const std::function<void(const CriticalCertificate&)>& on_certificate) {
  std::vector<CriticalCertificate> out;
  for (const auto& rec : detect_critical_edges(mesh, tol.coplanar)) {
    const auto elimination = certify_elimination(mesh, rec.edge, k, tol.coplanar);
    for (int apex : mesh.edge(rec.edge).vertices) {
      CriticalCertificate c;
      c.edge = rec;
      c.apex = apex;
      c.pressure = build_critical_pressure(mesh, rec.edge, apex, k, tol.coplanar);
      c.spurious = certify_spurious(c.pressure, mesh, k);
      c.elimination = elimination;
      if (on_certificate)
        on_certificate(c);
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace cr3d
