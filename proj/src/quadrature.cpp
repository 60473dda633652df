#include "cr3d/quadrature.hpp"

#include "cr3d/mesh.hpp"
#include "cr3d/polylib.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace cr3d {

GaussJacobi gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1)
    throw std::invalid_argument("gauss_jacobi needs n >= 1");
  const double a = alpha, b = beta, ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) {
    const double s = 2.0 * i + ab;
    diag(i) = (i == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int i = 1; i < n; ++i) {
    const double s = 2.0 * i + ab;
    const double num = 4.0 * i * (i + a) * (i + b) * (i + ab);
    sub(i - 1) = std::sqrt(num / (s * s * (s + 1.0) * (s - 1.0)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(ab + 2.0));
  GaussJacobi out;
  out.nodes.resize(static_cast<std::size_t>(n));
  out.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
    const double v = eig.eigenvectors()(0, i);
    out.weights[static_cast<std::size_t>(i)] = mu0 * v * v;
  }
  return out;
}

QuadRule gauss_1d(int n) {
  const GaussJacobi gj = gauss_jacobi(n, 0.0, 0.0);
  QuadRule r;
  r.dim = 1;
  r.exact_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    r.points.push_back({0.5 * (1.0 + gj.nodes[static_cast<std::size_t>(i)]), 0.0, 0.0, 0.0});
    r.weights.push_back(0.5 * gj.weights[static_cast<std::size_t>(i)]);
  }
  return r;
}

namespace {

QuadRule collapsed_rule(int dim, int degree) {
  const int n = (degree + 2) / 2;
  // direction j carries the Duffy weight (1-u)^(dim-1-j) on [0, 1]
  std::vector<GaussJacobi> dirs;
  for (int j = 0; j < dim; ++j) {
    const double alpha = dim - 1 - j;
    GaussJacobi gj = gauss_jacobi(n, alpha, 0.0);
    const double scale = std::pow(0.5, alpha + 1.0);
    for (std::size_t i = 0; i < gj.nodes.size(); ++i) {
      gj.nodes[i] = 0.5 * (1.0 + gj.nodes[i]);
      gj.weights[i] *= scale;
    }
    dirs.push_back(std::move(gj));
  }
  QuadRule r;
  r.dim = dim;
  r.exact_degree = 2 * n - 1;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    std::array<double, 4> x{};
    double w = 1.0, rest = 1.0;
    for (int j = 0; j < dim; ++j) {
      const double u = dirs[static_cast<std::size_t>(j)].nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      x[static_cast<std::size_t>(j)] = rest * u;
      w *= dirs[static_cast<std::size_t>(j)].weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      rest *= 1.0 - u;
    }
    r.points.push_back(x);
    r.weights.push_back(w);
    int j = dim - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == n) {
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0)
      break;
  }
  return r;
}

void for_each_exponent(int dim, int degree, std::vector<int>& a, int pos, int left,
                       const std::function<void(const std::vector<int>&)>& f) {
  if (pos == dim) {
    f(a);
    return;
  }
  for (int e = 0; e <= left; ++e) {
    a[static_cast<std::size_t>(pos)] = e;
    for_each_exponent(dim, degree, a, pos + 1, left - e, f);
  }
}

}  // namespace

double monomial_integral(std::span<const int> exponents) {
  double log_num = 0.0;
  int total = static_cast<int>(exponents.size());
  for (int a : exponents) {
    log_num += std::lgamma(a + 1.0);
    total += a;
  }
  return std::exp(log_num - std::lgamma(total + 1.0));
}

double monomial_audit(const QuadRule& rule, int degree) {
  double worst = 0.0;
  std::vector<int> a(static_cast<std::size_t>(rule.dim), 0);
  for_each_exponent(rule.dim, degree, a, 0, degree, [&](const std::vector<int>& e) {
    double q = 0.0;
    for (std::size_t p = 0; p < rule.size(); ++p) {
      double v = rule.weights[p];
      for (int j = 0; j < rule.dim; ++j)
        v *= std::pow(rule.points[p][static_cast<std::size_t>(j)], e[static_cast<std::size_t>(j)]);
      q += v;
    }
    const double exact = monomial_integral(e);
    worst = std::max(worst, std::abs(q - exact) / exact);
  });
  return worst;
}

const QuadRule& simplex_rule(int dim, int degree) {
  if (dim < 1 || dim > 4)
    throw std::invalid_argument("simplex_rule supports dimensions 1..4");
  degree = std::max(degree, 0);
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<QuadRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{dim, degree}];
  if (!slot) {
    auto rule = std::make_unique<QuadRule>(collapsed_rule(dim, degree));
    const double err = monomial_audit(*rule, degree);
    if (!(err <= 1e-12))
      throw ExactnessVerificationFailed("simplex rule dim=" + std::to_string(dim) + " degree=" +
                                        std::to_string(degree) + " has monomial error " + std::to_string(err));
    slot = std::move(rule);
  }
  return *slot;
}

double integrate_tet(const Mesh& mesh, int tet, const Integrand& f, int degree) {
  const QuadRule& rule = simplex_rule(3, degree);
  const double scale = 6.0 * mesh.volume(tet);
  double sum = 0.0;
  QuadPoint qp;
  for (std::size_t p = 0; p < rule.size(); ++p) {
    const auto& x = rule.points[p];
    qp.bary = {1.0 - x[0] - x[1] - x[2], x[0], x[1], x[2]};
    const Vec3 phys = mesh.to_physical(tet, qp.bary);
    qp.x = {phys.x(), phys.y(), phys.z()};
    sum += rule.weights[p] * f(qp);
  }
  return scale * sum;
}

double integrate_facet(const Mesh& mesh, int facet, const Integrand& f, int degree) {
  const QuadRule& rule = simplex_rule(2, degree);
  const auto& fv = mesh.facet(facet).vertices;
  const double scale = 2.0 * mesh.facet_area(facet);
  double sum = 0.0;
  QuadPoint qp;
  for (std::size_t p = 0; p < rule.size(); ++p) {
    const auto& x = rule.points[p];
    qp.bary = {1.0 - x[0] - x[1], x[0], x[1], 0.0};
    const Vec3 phys = qp.bary[0] * mesh.vertex(fv[0]) + qp.bary[1] * mesh.vertex(fv[1]) + qp.bary[2] * mesh.vertex(fv[2]);
    qp.x = {phys.x(), phys.y(), phys.z()};
    sum += rule.weights[p] * f(qp);
  }
  return scale * sum;
}

IyIntegrals iy_integrals(int k) {
  if (k < 1)
    throw std::invalid_argument("iy_integrals needs k >= 1");
  const UnivariatePoly p = jacobi(0.0, 3.0, k - 1);
  const UnivariatePoly d2 = (legendre(k + 1) - legendre(k)).derivative(2);
  const QuadRule& rule = simplex_rule(3, 2 * k);
  IyIntegrals out;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& x = rule.points[q];
    const double pv = p(1.0 - 2.0 * x[0]);
    out.i_p += rule.weights[q] * pv * d2(1.0 - 2.0 * x[0]);
    out.i_y += rule.weights[q] * pv * d2(1.0 - 2.0 * x[1]);
  }
  return out;
}

}  // namespace cr3d
