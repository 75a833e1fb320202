#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gcdeig::cli {

struct SuiteReport {
  std::string name;
  std::size_t checks = 0;
  // One minimal reproducer per failed check.
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

// numtheory arith smith en-plus-diag sandwich rank-one kronecker interlacing
const std::vector<std::string>& suite_names();

/// Runs one invariant suite (or "all") deterministically from `seed`.
/// Throws std::invalid_argument for an unknown suite.
std::vector<SuiteReport> run_suite(std::string_view name, std::uint64_t seed);

}  // namespace gcdeig::cli
