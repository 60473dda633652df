#include "cr3d/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace cr3d;

TEST_CASE("mesh JSON round trip is exact") {
  const Mesh m = transformed(kuhn_cube(2), Eigen::Matrix3d::Identity(), Vec3(0.1, 1.0 / 3.0, -2.0), 0.7);
  const std::string text = dump_json(mesh_to_json(m));
  const Mesh back = mesh_from_json(Json::parse(text));
  REQUIRE(back.num_vertices() == m.num_vertices());
  REQUIRE(back.num_tets() == m.num_tets());
  for (int v = 0; v < m.num_vertices(); ++v)
    CHECK(back.vertex(v) == m.vertex(v));
  for (int t = 0; t < m.num_tets(); ++t)
    CHECK(back.tet(t) == m.tet(t));
  CHECK(dump_json(mesh_to_json(back)) == text);
}

TEST_CASE("mesh files") {
  const std::string path = "test_io_mesh.json";
  write_mesh(path, inner_critical_patch());
  const Mesh m = read_mesh(path);
  CHECK(m.num_tets() == 4);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_mesh("does-not-exist.json"), ConfigError);
  {
    std::ofstream f(path);
    f << "{\"vertices\": [[0,0,0]], \"tets\": [";
  }
  CHECK_THROWS_AS(read_mesh(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("malformed mesh documents") {
  CHECK_THROWS_AS(mesh_from_json(Json::parse("[]")), ConfigError);
  CHECK_THROWS_AS(mesh_from_json(Json::parse(R"({"vertices": []})")), ConfigError);
  CHECK_THROWS_AS(mesh_from_json(Json::parse(R"({"vertices": [[0,0]], "tets": []})")), ConfigError);
  CHECK_THROWS_AS(mesh_from_json(Json::parse(R"({"vertices": [[0,0,"a"]], "tets": []})")), ConfigError);
  CHECK_THROWS_AS(
      mesh_from_json(Json::parse(R"({"vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]], "tets": [[0,1,2,3.5]]})")),
      ConfigError);
  CHECK_THROWS_AS(
      mesh_from_json(Json::parse(R"({"vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]], "tets": [[0,1,2,4]]})")),
      MeshError);
  CHECK_THROWS_AS(
      mesh_from_json(Json::parse(R"({"vertices": [[0,0,0],[1,0,0],[0,1,0],[2,0,0]], "tets": [[0,1,2,3]]})")),
      MeshError);
}

TEST_CASE("JSON output uses 17 significant digits and fixed key order") {
  Json j;
  j["b"] = 0.1;
  j["a"] = 1;
  j["c"] = {1.0 / 3.0, -2.5e-300};
  j["d"] = std::nan("");
  j["e"] = Json::object();
  const std::string s = dump_json(j);
  CHECK(s.find("\"b\": 0.10000000000000001") != std::string::npos);
  CHECK(s.find("\"b\"") < s.find("\"a\""));
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  char tiny[32];
  std::snprintf(tiny, sizeof tiny, "%.17g", -2.5e-300);
  CHECK(s.find(tiny) != std::string::npos);
  CHECK(s.find("\"d\": null") != std::string::npos);
  CHECK(s.find("\"e\": {}") != std::string::npos);
  const Json back = Json::parse(s);
  CHECK(back["c"][0].get<double>() == 1.0 / 3.0);
}

TEST_CASE("reports carry the schema and are reproducible") {
  const Mesh m = inner_critical_patch();
  const auto a = dump_json(report("infsup", to_json(infsup_constant(assemble(m, 2, VelocityKind::CR), m))));
  const auto b = dump_json(report("infsup", to_json(infsup_constant(assemble(m, 2, VelocityKind::CR), m))));
  CHECK(a == b);
  const Json j = Json::parse(a);
  CHECK(j["schema"] == "cr3d-report/1");
  CHECK(j["command"] == "infsup");
  CHECK(j["k"] == 2);
  CHECK(j["pair"] == "cr");
  CHECK(j["tolerances"]["rank"].get<double>() == 1e-10);
  CHECK(j["smallest_eigenvalues"].size() <= 5);
}

TEST_CASE("critical certificate JSON") {
  const Mesh m = capped_inner_patch();
  const auto certs = certify_critical_edges(m, 3);
  REQUIRE_FALSE(certs.empty());
  int streamed = 0;
  certify_critical_edges(m, 3, {}, [&](const CriticalCertificate&) { ++streamed; });
  CHECK(streamed == static_cast<int>(certs.size()));
  bool found = false;
  for (const auto& c : certs) {
    const Json j = to_json(c);
    CHECK(j["spurious"]["pass"] == true);
    if (j["inner"] == true) {
      found = true;
      CHECK(j["elimination"]["status"] == "certified");
      CHECK(j["elimination"]["theta"].get<double>() < 0);
      CHECK(j["iota"] == 4);
    }
  }
  CHECK(found);
}

TEST_CASE("nspace and suite JSON") {
  const Mesh m = reference_tet();
  const Json n = to_json(nspace_dim(m, {0}, 2, VelocityKind::CR));
  CHECK(n["dim"] == 1);
  CHECK(n["space"] == "cr");
  const Json s = to_json(run_suite(Suite::appendix_b, {2, 3}));
  CHECK(s["suite"] == "appendix-b");
  CHECK(s["pass"] == true);
  CHECK(s["checks"].size() == 6);
}

TEST_CASE("suite names") {
  for (const char* name : {"polylib", "quadrature", "cr-orthogonality", "direct-sum", "appendix-a", "appendix-b"})
    CHECK(std::string(to_string(*parse_suite(name))) == name);
  CHECK_FALSE(parse_suite("everything"));
}

TEST_CASE("suites pass over their documented ranges") {
  CHECK(run_suite(Suite::polylib, {1, 8}).pass());
  CHECK(run_suite(Suite::quadrature, {0, 4}).pass());
  CHECK(run_suite(Suite::direct_sum, {1, 5}).pass());
  CHECK(run_suite(Suite::appendix_a, {1, 5}, {2, 4}).pass());
  CHECK(run_suite(Suite::appendix_b, {0, 12}).pass());
}

TEST_CASE("failing checks are reported as failures") {
  Check c;
  c.value = 1.0;
  c.expected = 1.0 + 1e-9;
  c.tolerance = 1e-12;
  CHECK_FALSE(c.pass());
  c.tolerance = 1e-8;
  CHECK(c.pass());
  c.value = std::nan("");
  CHECK_FALSE(c.pass());
  Check lb;
  lb.lower_bound = true;
  lb.tolerance = 1e-8;
  lb.value = 1e-9;
  CHECK_FALSE(lb.pass());
}
