#include "cr3d/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cr3d {

Json mesh_to_json(const Mesh& mesh) {
  Json j;
  Json verts = Json::array();
  for (const auto& v : mesh.vertices())
    verts.push_back({v.x(), v.y(), v.z()});
  Json tets = Json::array();
  for (const auto& t : mesh.tets())
    tets.push_back({t[0], t[1], t[2], t[3]});
  j["vertices"] = std::move(verts);
  j["tets"] = std::move(tets);
  return j;
}

Mesh mesh_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.contains("tets"))
    throw ConfigError("mesh document needs \"vertices\" and \"tets\"");
  const auto& jv = j["vertices"];
  const auto& jt = j["tets"];
  if (!jv.is_array() || !jt.is_array())
    throw ConfigError("mesh \"vertices\" and \"tets\" must be arrays");
  std::vector<Vec3> vertices;
  for (const auto& v : jv) {
    if (!v.is_array() || v.size() != 3)
      throw ConfigError("each vertex must be an array of 3 numbers");
    Vec3 x;
    for (int i = 0; i < 3; ++i) {
      if (!v[static_cast<std::size_t>(i)].is_number())
        throw ConfigError("vertex coordinates must be numbers");
      x[i] = v[static_cast<std::size_t>(i)].get<double>();
    }
    vertices.push_back(x);
  }
  std::vector<std::array<int, 4>> tets;
  for (const auto& t : jt) {
    if (!t.is_array() || t.size() != 4)
      throw ConfigError("each tet must be an array of 4 vertex indices");
    std::array<int, 4> a{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!t[i].is_number_integer())
        throw ConfigError("tet entries must be integers");
      const auto v = t[i].get<long long>();
      if (v < 0 || v >= static_cast<long long>(vertices.size()))
        throw MeshError(MeshErrorKind::IndexOutOfRange, "tet references vertex " + std::to_string(v));
      a[i] = static_cast<int>(v);
    }
    tets.push_back(a);
  }
  return Mesh::build(std::move(vertices), std::move(tets));
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open mesh file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("mesh file " + path + " is not valid JSON: " + e.what());
  }
  return mesh_from_json(j);
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out)
    throw ConfigError("cannot write " + path);
  write_json(out, mesh_to_json(mesh));
}

namespace {

void write_number(std::ostream& os, double x) {
  if (!std::isfinite(x)) {
    os << "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

void write_value(std::ostream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
  case Json::value_t::object: {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first)
        os << ",\n";
      first = false;
      os << pad << Json(it.key()).dump() << ": ";
      write_value(os, it.value(), indent + 2);
    }
    os << '\n' << close << '}';
    return;
  }
  case Json::value_t::array: {
    if (j.empty()) {
      os << "[]";
      return;
    }
    const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (flat) {
      os << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i)
          os << ", ";
        write_value(os, j[i], indent);
      }
      os << ']';
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i)
        os << ",\n";
      os << pad;
      write_value(os, j[i], indent + 2);
    }
    os << '\n' << close << ']';
    return;
  }
  case Json::value_t::number_float:
    write_number(os, j.get<double>());
    return;
  default:
    os << j.dump();
  }
}

Json vec(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v)
    a.push_back(x);
  return a;
}

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    a.push_back(v(i));
  return a;
}

Json ints(const std::vector<int>& v) {
  Json a = Json::array();
  for (int x : v)
    a.push_back(x);
  return a;
}

Json matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

void write_json(std::ostream& os, const Json& j) {
  write_value(os, j, 0);
  os << '\n';
}

std::string dump_json(const Json& j) {
  std::ostringstream os;
  write_json(os, j);
  return os.str();
}

Json to_json(const Tolerances& tol) {
  Json j;
  j["coplanar"] = tol.coplanar;
  j["rank"] = tol.rank;
  j["eig"] = tol.eig;
  j["quad_degree_margin"] = tol.quad_margin;
  return j;
}

Json to_json(const InfSupReport& r) {
  Json j;
  j["k"] = r.k;
  j["pair"] = r.pair;
  j["gamma_h"] = r.gamma_h;
  j["smallest_eigenvalues"] = vec(r.smallest_eigenvalues);
  j["eigen_residuals"] = vec(r.eigen_residuals);
  j["lambda_max"] = r.lambda_max;
  j["spurious_modes"] = r.spurious_modes;
  j["deflation"] = "Mp-orthogonal complement of the constant pressure";
  j["mesh"] = {{"tets", r.num_tets}, {"vertices", r.num_vertices}};
  j["dofs"] = {{"velocity", r.velocity_dofs}, {"pressure", r.pressure_dofs}};
  j["validated_range"] = r.validated_range;
  j["tolerances"] = to_json(r.tolerances);
  return j;
}

Json to_json(const NspaceReport& r) {
  Json j;
  j["macro"] = ints(r.macro);
  j["k"] = r.k;
  j["space"] = to_string(r.space);
  j["dim"] = r.dim;
  j["pressure_dofs"] = r.pressure_dofs;
  j["velocity_dofs"] = r.velocity_dofs;
  j["rank"] = r.rank;
  j["singular_values"] = vec(r.singular_values);
  return j;
}

Json to_json(const CriticalCertificate& c) {
  Json j;
  const auto& e = c.elimination;
  j["edge"] = c.edge.edge;
  j["inner"] = c.edge.inner;
  j["iota"] = c.edge.iota();
  j["patch"] = ints(c.edge.patch);
  j["apex"] = c.apex;
  j["k"] = c.pressure.k;
  Json p;
  p["tets"] = ints(c.pressure.tets);
  p["signs"] = vec(c.pressure.signs);
  p["coefficients"] = vec(c.pressure.coefficients);
  p["mean"] = c.pressure.mean;
  j["pressure"] = std::move(p);
  j["spurious"] = {{"residual", c.spurious.residual},
                   {"checked_functions", c.spurious.checked_functions},
                   {"pass", c.spurious.pass}};
  Json el;
  el["status"] = to_string(e.status);
  el["tet"] = e.tet;
  if (c.pressure.k % 2 == 1) {
    el["facet_f"] = e.facet_f;
    el["facet_g"] = e.facet_g;
    el["y"] = e.y;
    el["theta"] = e.theta;
  }
  el["rows"] = {e.rows[0], e.rows[1]};
  el["m"] = matrix(e.m);
  el["min_singular_value"] = e.min_singular_value;
  el["pairing_error"] = e.pairing_error;
  el["message"] = e.message;
  j["elimination"] = std::move(el);
  return j;
}

Json to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  if (c.k >= 0)
    j["k"] = c.k;
  if (c.d >= 0)
    j["d"] = c.d;
  j["value"] = c.value;
  if (c.lower_bound) {
    j["lower_bound"] = c.tolerance;
  } else {
    j["expected"] = c.expected;
    j["error"] = c.error();
    j["tolerance"] = c.tolerance;
  }
  j["pass"] = c.pass();
  return j;
}

Json to_json(const SuiteResult& r) {
  Json j;
  j["suite"] = to_string(r.suite);
  j["pass"] = r.pass();
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(to_json(c));
  j["checks"] = std::move(checks);
  return j;
}

Json report(const std::string& command, const Json& payload) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  for (auto it = payload.begin(); it != payload.end(); ++it)
    j[it.key()] = it.value();
  return j;
}

}  // namespace cr3d
