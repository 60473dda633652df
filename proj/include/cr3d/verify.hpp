#pragma once

// Verification suites: batches of numerical checks of the polynomial,
// quadrature and finite element identities, each with its residual and
// tolerance.

#include <optional>
#include <string>
#include <vector>

namespace cr3d {

enum class Suite { polylib, quadrature, cr_orthogonality, direct_sum, appendix_a, appendix_b };

const char* to_string(Suite s);
std::optional<Suite> parse_suite(const std::string& name);

struct Check {
  std::string name;
  int k = -1;  // -1 when not applicable
  int d = -1;
  double value = 0.0;
  double expected = 0.0;
  /// Pass iff |value - expected| <= tolerance, or value > tolerance when
  /// lower_bound is set.
  double tolerance = 0.0;
  bool lower_bound = false;
  double error() const;
  bool pass() const;
};

struct SuiteResult {
  Suite suite = Suite::polylib;
  std::vector<Check> checks;
  bool pass() const;
};

struct IntRange {
  int lo = 1;
  int hi = 1;
};

/// Runs a suite over the k range (and the d range for appendix_a).
SuiteResult run_suite(Suite suite, IntRange k, IntRange d = {2, 4});

}  // namespace cr3d
