#include "cr3d/verify.hpp"

#include "cr3d/fespace.hpp"
#include "cr3d/mesh.hpp"
#include "cr3d/polylib.hpp"
#include "cr3d/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace cr3d {

const char* to_string(Suite s) {
  switch (s) {
  case Suite::polylib:
    return "polylib";
  case Suite::quadrature:
    return "quadrature";
  case Suite::cr_orthogonality:
    return "cr-orthogonality";
  case Suite::direct_sum:
    return "direct-sum";
  case Suite::appendix_a:
    return "appendix-a";
  case Suite::appendix_b:
    return "appendix-b";
  }
  return "?";
}

std::optional<Suite> parse_suite(const std::string& name) {
  for (Suite s : {Suite::polylib, Suite::quadrature, Suite::cr_orthogonality, Suite::direct_sum, Suite::appendix_a,
                  Suite::appendix_b})
    if (name == to_string(s))
      return s;
  return std::nullopt;
}

double Check::error() const { return lower_bound ? 0.0 : std::abs(value - expected); }

bool Check::pass() const {
  if (std::isnan(value))
    return false;
  return lower_bound ? value > tolerance : error() <= tolerance;
}

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

namespace {

Check make(std::string name, int k, int d, double value, double expected, double tol) {
  Check c;
  c.name = std::move(name);
  c.k = k;
  c.d = d;
  c.value = value;
  c.expected = expected;
  c.tolerance = tol;
  return c;
}

Check lower(std::string name, int k, double value, double bound) {
  Check c = make(std::move(name), k, -1, value, bound, bound);
  c.lower_bound = true;
  return c;
}

void polylib_suite(IntRange kr, std::vector<Check>& out) {
  for (int k = std::max(1, kr.lo); k <= kr.hi; ++k) {
    const auto q = q_k(k);
    out.push_back(make("Q_k(1)", k, -1, q(1.0), 1.0, 1e-14));
    out.push_back(make("Q_k(-1)", k, -1, q(-1.0), (k % 2 ? -1.0 : 1.0) * (k + 1), 1e-12));
    out.push_back(make("P_k^(0,3)(1)", k, -1, jacobi(0.0, 3.0, k)(1.0), 1.0, 1e-12));
    // orthogonality of P_k^{(0,3)} to lower degrees under (1+x)^3
    const auto gj = gauss_jacobi(k + 2, 0.0, 3.0);
    const auto p = jacobi(0.0, 3.0, k);
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      const auto pj = jacobi(0.0, 3.0, j);
      double s = 0.0;
      for (std::size_t i = 0; i < gj.nodes.size(); ++i)
        s += gj.weights[i] * p(gj.nodes[i]) * pj(gj.nodes[i]);
      worst = std::max(worst, std::abs(s));
    }
    out.push_back(make("P_k^(0,3) orthogonality", k, -1, worst, 0.0, 1e-12));
  }
}

void quadrature_suite(IntRange kr, std::vector<Check>& out) {
  for (int k = std::max(0, kr.lo); k <= kr.hi; ++k)
    for (int dim = 1; dim <= 4; ++dim) {
      const int deg = std::max(1, 2 * k);
      out.push_back(make("monomial exactness dim " + std::to_string(dim), k, dim,
                         monomial_audit(simplex_rule(dim, deg), deg), 0.0, 1e-12));
    }
  // int_K P_1^{(0,3)}(1 - 2 lambda_y) lambda_z = -|K|/4 delta_yz
  const Mesh m = kuhn_cube(1);
  const auto p1 = jacobi(0.0, 3.0, 1);
  double worst = 0.0;
  for (int t = 0; t < m.num_tets(); ++t)
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z) {
        const double v = integrate_tet(
            m, t, [&](const QuadPoint& q) { return p1(1.0 - 2.0 * q.bary[y]) * q.bary[z]; }, 2);
        const double expected = y == z ? -m.volume(t) / 4.0 : 0.0;
        worst = std::max(worst, std::abs(v - expected));
      }
  out.push_back(make("P_1^(0,3) lambda moments", 2, 3, worst, 0.0, 1e-11));
}

void cr_orthogonality_suite(IntRange kr, std::vector<Check>& out) {
  const Mesh meshes[] = {kuhn_cube(1), capped_inner_patch()};
  for (int k = std::max(1, kr.lo); k <= kr.hi; ++k) {
    out.push_back(make("Q_k(1)", k, -1, q_k(k)(1.0), 1.0, 1e-14));
    double worst = 0.0;
    for (const Mesh& m : meshes) {
      if (k % 2 == 0) {
        for (int t = 0; t < m.num_tets(); ++t) {
          const auto f = cr_cell_function(m, k, t);
          worst = std::max(worst, jump_moment_audit(f, m, k) / l2_norm(f, m));
        }
      } else {
        for (int f = 0; f < m.num_facets(); ++f) {
          if (m.facet(f).boundary)
            continue;
          const auto s = cr_facet_function(m, k, f);
          worst = std::max(worst, jump_moment_audit(s, m, k) / l2_norm(s, m));
        }
      }
    }
    out.push_back(make(k % 2 ? "facet function moments" : "cell function moments", k, -1, worst, 0.0, 1e-12));
  }
}

void direct_sum_suite(IntRange kr, std::vector<Check>& out) {
  const Mesh m = kuhn_cube(1);
  for (int k = std::max(1, kr.lo); k <= kr.hi; ++k) {
    if (k % 2 == 1 && k >= 3) {
      const double det = static_cast<double>(determinant(endpoint_matrix(k)));
      out.push_back(make("endpoint determinant", k, -1, det, -static_cast<double>((k - 1) * (k + 2) * (k + 2)), 0.0));
    }
    out.push_back(lower("min singular value", k, direct_sum_audit(m, k), 1e-8));
  }
}

void appendix_a_suite(IntRange kr, IntRange dr, std::vector<Check>& out) {
  for (int d = std::max(2, dr.lo); d <= dr.hi; ++d)
    for (int k = std::max(1, kr.lo); k <= kr.hi; ++k) {
      const auto a = qdk_audit(d, k);
      out.push_back(make("Q_dk facet value", k, d, a.facet_value_error, 0.0, 1e-11));
      out.push_back(make("Q_dk facet moments", k, d, a.moment_residual, 0.0, 1e-11));
      const auto s = beta_coeffs(k, d - 2, BetaMethod::solve);
      const auto e = beta_coeffs(k, d - 2, BetaMethod::explicit_formula);
      double worst = 0.0;
      for (std::size_t i = 0; i < e.values.size(); ++i)
        worst = std::max(worst, std::abs(s.values[i] - e.values[i]) / std::max(1.0, std::abs(e.values[i])));
      out.push_back(make("beta solve vs explicit", k, d, worst, 0.0, 1e-10));
      if (d == 3) {
        const auto q3 = q_dk(3, k);
        const auto q = q_k(k);
        double diff = std::abs(q3.degree() - q.degree());
        for (int i = 0; i <= std::max(q.degree(), q3.degree()); ++i)
          diff = std::max(diff, std::abs(q3.coeff(i) - q.coeff(i)));
        out.push_back(make("Q_3k equals Q_k", k, d, diff, 0.0, 1e-12));
      }
    }
}

void appendix_b_suite(IntRange kr, std::vector<Check>& out) {
  for (int k = std::max(0, kr.lo); k <= kr.hi; ++k) {
    out.push_back(make("iota_k", k, -1, iota_k(k), iota_k_closed_form(k), 1e-11));
    if (k >= 2) {
      const auto iy = iy_integrals(k);
      out.push_back(make("I_p", k, -1, iy.i_p, (k + 1) / 4.0, 1e-11));
      out.push_back(make("I_y", k, -1, iy.i_y, 0.5 * (k % 2 ? 1.0 : -1.0), 1e-11));
    }
  }
}

}  // namespace

SuiteResult run_suite(Suite suite, IntRange k, IntRange d) {
  SuiteResult r;
  r.suite = suite;
  switch (suite) {
  case Suite::polylib:
    polylib_suite(k, r.checks);
    break;
  case Suite::quadrature:
    quadrature_suite(k, r.checks);
    break;
  case Suite::cr_orthogonality:
    cr_orthogonality_suite(k, r.checks);
    break;
  case Suite::direct_sum:
    direct_sum_suite(k, r.checks);
    break;
  case Suite::appendix_a:
    appendix_a_suite(k, d, r.checks);
    break;
  case Suite::appendix_b:
    appendix_b_suite(k, r.checks);
    break;
  }
  return r;
}

}  // namespace cr3d
