#pragma once

// Mesh files and report serialization. Reports carry a schema string and are
// written with a fixed key order and 17 significant digits so that identical
// inputs give byte-identical output.

#include "cr3d/mesh.hpp"
#include "cr3d/stability.hpp"
#include "cr3d/verify.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace cr3d {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "cr3d-report/1";

/// Malformed input files and invalid settings.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// {"vertices": [[x,y,z],...], "tets": [[i0,i1,i2,i3],...]}
Json mesh_to_json(const Mesh& mesh);
/// Throws ConfigError on a malformed document; Mesh::build checks the rest.
Mesh mesh_from_json(const Json& j);
Mesh read_mesh(const std::string& path);
void write_mesh(const std::string& path, const Mesh& mesh);

/// Pretty-printed JSON, two-space indent, doubles as %.17g, non-finite
/// numbers as null.
void write_json(std::ostream& os, const Json& j);
std::string dump_json(const Json& j);

Json to_json(const Tolerances& tol);
Json to_json(const InfSupReport& r);
Json to_json(const NspaceReport& r);
Json to_json(const CriticalCertificate& c);
Json to_json(const Check& c);
Json to_json(const SuiteResult& r);

/// Wraps a payload as {"schema": ..., "command": ..., <payload fields>}.
Json report(const std::string& command, const Json& payload);

}  // namespace cr3d
