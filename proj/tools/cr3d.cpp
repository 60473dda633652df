// Command line driver: mesh generation, verification suites, inf-sup
// constants, N-spaces and critical-edge certificates.

#include "cr3d/assembly.hpp"
#include "cr3d/io.hpp"
#include "cr3d/polylib.hpp"
#include "cr3d/quadrature.hpp"
#include "cr3d/stability.hpp"
#include "cr3d/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>

using namespace cr3d;

namespace {

enum class Format { json, csv };

struct RunConfig {
  std::string mesh_path;
  std::string gen;
  int n = 1;
  int iota = 1;
  double offset = 0.1;
  int k = 2;
  std::string k_range = "1..4";
  std::string d_range = "2..4";
  std::string suite;
  std::string pair = "cr";
  std::string macro;
  std::string out;
  std::string matrices;
  std::string format = "json";
  Tolerances tol;
};

class ExitError : public std::runtime_error {
public:
  ExitError(int code, std::string type, const std::string& what)
      : std::runtime_error(what), code(code), type(std::move(type)) {}
  int code;
  std::string type;
};

[[noreturn]] void config_error(const std::string& what) { throw ConfigError(what); }

IntRange parse_range(const std::string& s) {
  IntRange r;
  try {
    const auto dots = s.find("..");
    std::size_t used = 0;
    if (dots == std::string::npos) {
      r.lo = r.hi = std::stoi(s, &used);
      if (used != s.size())
        throw std::invalid_argument(s);
    } else {
      const std::string a = s.substr(0, dots), b = s.substr(dots + 2);
      r.lo = std::stoi(a, &used);
      if (used != a.size())
        throw std::invalid_argument(s);
      r.hi = std::stoi(b, &used);
      if (used != b.size())
        throw std::invalid_argument(s);
    }
  } catch (const std::exception&) {
    config_error("range must look like 3 or 2..8, got '" + s + "'");
  }
  if (r.lo > r.hi)
    config_error("empty range '" + s + "'");
  return r;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception&) {
      config_error("expected a comma separated list of tet ids, got '" + s + "'");
    }
  }
  return out;
}

Format parse_format(const std::string& s) {
  if (s == "json")
    return Format::json;
  if (s == "csv")
    return Format::csv;
  config_error("unknown format '" + s + "'");
}

void validate(const RunConfig& c) {
  if (c.k < 1 || c.k > 6)
    config_error("k must be in 1..6");
  if (!(c.tol.coplanar > 0) || !(c.tol.rank > 0) || !(c.tol.eig > 0))
    config_error("tolerances must be positive");
  if (c.tol.quad_margin < 0)
    config_error("quadrature degree margin must be >= 0");
}

Mesh load_mesh(const RunConfig& c) {
  if (!c.mesh_path.empty() && !c.gen.empty())
    config_error("give either --mesh or --gen, not both");
  if (!c.mesh_path.empty())
    return read_mesh(c.mesh_path);
  if (c.gen.empty())
    config_error("a mesh is required (--mesh FILE or --gen NAME)");
  const auto kind = parse_mesh_kind(c.gen);
  if (!kind)
    config_error("unknown generator '" + c.gen + "'");
  GeneratorSpec spec;
  spec.kind = *kind;
  spec.n = c.n;
  spec.iota = c.iota;
  spec.offset = c.offset;
  try {
    return generate(spec);
  } catch (const MeshError& e) {
    if (e.kind() == MeshErrorKind::InvalidParameter)
      config_error(e.what());
    throw;
  }
}

VelocityKind load_pair(const RunConfig& c) {
  const auto v = parse_velocity_kind(c.pair);
  if (!v)
    config_error("pair must be cr or conforming, got '" + c.pair + "'");
  return *v;
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        config_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_mesh(const RunConfig& c) {
  if (parse_format(c.format) != Format::json)
    config_error("mesh output is JSON only");
  const Mesh m = load_mesh(c);
  Output out(c.out);
  write_json(out.stream(), mesh_to_json(m));
  return 0;
}

int cmd_verify(const RunConfig& c) {
  const auto suite = parse_suite(c.suite);
  if (!suite)
    config_error("unknown suite '" + c.suite + "'");
  const Format format = parse_format(c.format);
  const IntRange kr = parse_range(c.k_range);
  const IntRange dr = parse_range(c.d_range);
  if (kr.lo < 0 || kr.hi > 12)
    config_error("k range must lie in 0..12");
  if (dr.lo < 2 || dr.hi > 5)
    config_error("d range must lie in 2..5");
  const SuiteResult r = run_suite(*suite, kr, dr);
  Output out(c.out);
  if (format == Format::json) {
    write_json(out.stream(), report("verify", to_json(r)));
  } else {
    auto& os = out.stream();
    os << "name,k,d,value,expected,error,tolerance,pass\n";
    for (const auto& ch : r.checks)
      os << '"' << ch.name << "\"," << ch.k << ',' << ch.d << ',' << fmt(ch.value) << ','
         << (ch.lower_bound ? "" : fmt(ch.expected)) << ',' << fmt(ch.error()) << ',' << fmt(ch.tolerance) << ','
         << (ch.pass() ? "true" : "false") << '\n';
  }
  return r.pass() ? 0 : 1;
}

void write_matrices(const std::string& prefix, const AssembledSystem& sys) {
  for (const auto& [name, m] : {std::pair<const char*, const Eigen::MatrixXd*>{"A", &sys.A}, {"B", &sys.B}, {"Mp", &sys.Mp}}) {
    std::ofstream f(prefix + "." + name + ".csv");
    if (!f)
      config_error("cannot write " + prefix + "." + name + ".csv");
    write_csv(f, *m);
  }
  Json h;
  h["schema"] = kReportSchema;
  h["k"] = sys.k;
  h["pair"] = to_string(sys.velocity);
  h["A"] = {sys.A.rows(), sys.A.cols()};
  h["B"] = {sys.B.rows(), sys.B.cols()};
  h["Mp"] = {sys.Mp.rows(), sys.Mp.cols()};
  h["velocity_ordering"] = "key-major, index 3 i + c";
  h["velocity_digest"] = hex_digest(sys.velocity_digest);
  h["pressure_digest"] = hex_digest(sys.pressure_digest);
  std::ofstream f(prefix + ".json");
  if (!f)
    config_error("cannot write " + prefix + ".json");
  write_json(f, h);
}

int cmd_infsup(const RunConfig& c) {
  validate(c);
  const Format format = parse_format(c.format);
  const VelocityKind pair = load_pair(c);
  const Mesh m = load_mesh(c);
  const auto sys = assemble(m, c.k, pair, {c.tol.quad_margin});
  if (!c.matrices.empty())
    write_matrices(c.matrices, sys);
  const auto r = infsup_constant(sys, m, c.tol);
  Output out(c.out);
  if (format == Format::json) {
    Json j = to_json(r);
    j["velocity_digest"] = hex_digest(sys.velocity_digest);
    j["pressure_digest"] = hex_digest(sys.pressure_digest);
    j["quad_degree"] = sys.quad_degree;
    write_json(out.stream(), report("infsup", j));
  } else {
    auto& os = out.stream();
    os << "index,eigenvalue,residual\n";
    for (std::size_t i = 0; i < r.smallest_eigenvalues.size(); ++i)
      os << i << ',' << fmt(r.smallest_eigenvalues[i]) << ',' << fmt(r.eigen_residuals[i]) << '\n';
  }
  for (double res : r.eigen_residuals)
    if (res > c.tol.eig)
      throw ExitError(1, "EigenResidual", "eigen-residual " + fmt(res) + " exceeds the tolerance");
  return 0;
}

int cmd_nspace(const RunConfig& c) {
  validate(c);
  const Format format = parse_format(c.format);
  const VelocityKind pair = load_pair(c);
  const Mesh m = load_mesh(c);
  std::vector<int> macro;
  if (c.macro.empty()) {
    macro.resize(static_cast<std::size_t>(m.num_tets()));
    std::iota(macro.begin(), macro.end(), 0);
  } else {
    macro = parse_ints(c.macro);
  }
  const auto r = nspace_dim(m, macro, c.k, pair, c.tol.rank);
  Output out(c.out);
  if (format == Format::json) {
    write_json(out.stream(), report("nspace", to_json(r)));
  } else {
    write_csv(out.stream(), r.pairing);
  }
  return 0;
}

int cmd_critical(const RunConfig& c) {
  validate(c);
  const Format format = parse_format(c.format);
  const Mesh m = load_mesh(c);
  Output out(c.out);
  Json certs = Json::array();
  bool pass = true;
  auto emit = [&](bool complete) {
    if (format == Format::json) {
      Json j;
      j["k"] = c.k;
      j["tolerances"] = to_json(c.tol);
      j["complete"] = complete;
      j["pass"] = pass;
      j["certificates"] = certs;
      write_json(out.stream(), report("critical", j));
    }
    out.stream().flush();
  };
  if (format == Format::csv)
    out.stream() << "edge,v0,v1,inner,iota,apex,k,spurious_residual,checked_functions,spurious_pass,"
                    "elimination,min_singular_value\n";
  try {
    certify_critical_edges(m, c.k, c.tol, [&](const CriticalCertificate& cc) {
      const bool ok = cc.spurious.pass && cc.elimination.status != EliminationStatus::singular;
      pass = pass && ok;
      certs.push_back(to_json(cc));
      if (format == Format::csv) {
        const auto& ev = m.edge(cc.edge.edge).vertices;
        out.stream() << cc.edge.edge << ',' << ev[0] << ',' << ev[1] << ',' << (cc.edge.inner ? "true" : "false") << ','
                     << cc.edge.iota() << ',' << cc.apex << ',' << c.k << ',' << fmt(cc.spurious.residual) << ','
                     << cc.spurious.checked_functions << ',' << (cc.spurious.pass ? "true" : "false") << ','
                     << to_string(cc.elimination.status) << ',' << fmt(cc.elimination.min_singular_value) << '\n';
      }
    });
  } catch (...) {
    emit(false);
    throw;
  }
  emit(true);
  return pass ? 0 : 1;
}

std::string error_type(const std::exception& e) {
  if (const auto* me = dynamic_cast<const MeshError*>(&e))
    return std::string("MeshError.") + to_string(me->kind());
  if (const auto* se = dynamic_cast<const StabilityError*>(&e))
    return std::string("StabilityError.") + to_string(se->kind());
  if (dynamic_cast<const NotSPD*>(&e))
    return "NotSPD";
  if (dynamic_cast<const NoConvergence*>(&e))
    return "NoConvergence";
  if (dynamic_cast<const UnsupportedDegree*>(&e))
    return "UnsupportedDegree";
  if (dynamic_cast<const ExactnessVerificationFailed*>(&e))
    return "ExactnessVerificationFailed";
  if (dynamic_cast<const ConfigError*>(&e))
    return "ConfigError";
  return "RuntimeError";
}

int fail(int code, const std::string& type, const std::string& message) {
  Json j;
  j["error"] = {{"type", type}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  return code;
}

void add_tolerances(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--tol-coplanar", c.tol.coplanar, "Plane clustering tolerance for critical edges")->capture_default_str();
  cmd->add_option("--tol-rank", c.tol.rank, "Relative singular/eigenvalue threshold")->capture_default_str();
  cmd->add_option("--tol-eig", c.tol.eig, "Largest accepted eigen-residual")->capture_default_str();
  cmd->add_option("--quad-degree-margin", c.tol.quad_margin, "Quadrature exactness 2k + margin")->capture_default_str();
}

void add_mesh_source(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--mesh", c.mesh_path, "Mesh JSON file");
  cmd->add_option("--gen", c.gen,
                  "Generator: reference, inner-critical-patch, outer-critical-patch, kuhn, capped-inner-patch, "
                  "perturbed-inner-patch");
  cmd->add_option("--n", c.n, "Kuhn cube subdivisions")->capture_default_str();
  cmd->add_option("--iota", c.iota, "Outer patch size 1..3")->capture_default_str();
  cmd->add_option("--offset", c.offset, "Perturbation of the perturbed patch")->capture_default_str();
}

void add_output(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--out", c.out, "Output file (default stdout)");
  cmd->add_option("--format", c.format, "json or csv")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crouzeix-Raviart Stokes elements in 3D: spaces, inf-sup constants and critical pressures"};
  app.require_subcommand(1);
  RunConfig c;

  auto* mesh = app.add_subcommand("mesh", "Write a generated mesh as JSON");
  add_mesh_source(mesh, c);
  add_output(mesh, c);

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("--suite", c.suite, "polylib, quadrature, cr-orthogonality, direct-sum, appendix-a, appendix-b")
      ->required();
  verify->add_option("--k", c.k_range, "Degree range, e.g. 1..6")->capture_default_str();
  verify->add_option("--d", c.d_range, "Dimension range for appendix-a")->capture_default_str();
  add_output(verify, c);

  auto* infsup = app.add_subcommand("infsup", "Discrete inf-sup constant");
  add_mesh_source(infsup, c);
  infsup->add_option("--k", c.k, "Velocity degree 1..6")->capture_default_str();
  infsup->add_option("--pair", c.pair, "cr or conforming")->capture_default_str();
  infsup->add_option("--matrices", c.matrices, "Also write PREFIX.{A,B,Mp}.csv and PREFIX.json");
  add_tolerances(infsup, c);
  add_output(infsup, c);

  auto* nspace = app.add_subcommand("nspace", "Macroelement N-space dimension");
  add_mesh_source(nspace, c);
  nspace->add_option("--k", c.k, "Velocity degree 1..6")->capture_default_str();
  nspace->add_option("--pair", c.pair, "cr or conforming")->capture_default_str();
  nspace->add_option("--macro", c.macro, "Comma separated tet ids (default: all)");
  add_tolerances(nspace, c);
  add_output(nspace, c);

  auto* critical = app.add_subcommand("critical", "Critical edges with spurious and elimination certificates");
  add_mesh_source(critical, c);
  critical->add_option("--k", c.k, "Velocity degree 1..6")->capture_default_str();
  add_tolerances(critical, c);
  add_output(critical, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail(2, "ConfigError", e.what());
  }

  try {
    if (*mesh)
      return cmd_mesh(c);
    if (*verify)
      return cmd_verify(c);
    if (*infsup)
      return cmd_infsup(c);
    if (*nspace)
      return cmd_nspace(c);
    return cmd_critical(c);
  } catch (const ExitError& e) {
    return fail(e.code, e.type, e.what());
  } catch (const ConfigError& e) {
    return fail(2, "ConfigError", e.what());
  } catch (const UnsupportedDegree& e) {
    return fail(2, "UnsupportedDegree", e.what());
  } catch (const std::exception& e) {
    return fail(1, error_type(e), e.what());
  }
}
