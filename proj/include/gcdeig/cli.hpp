#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gcdeig/arith.hpp"

namespace gcdeig::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailure = 1,
  kUsageError = 2,
  kHypothesisViolation = 3,
};

/// Settings of a `converge` run. Stored on disk as a flat JSON object; every
/// field round-trips exactly (tol is kept as its shortest decimal).
struct ExperimentConfig {
  std::string function;
  std::string sequence;
  std::uint64_t q = 1;
  std::uint64_t n_max = 0;
  double tol = 1e-12;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
  bool exploratory = false;
  std::uint64_t threads = 1;
  // Primes used for the divergence block; 0 picks n_max for prime-based
  // and progression sequences and skips it otherwise.
  std::uint64_t divergence_primes = 0;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::string to_json(const ExperimentConfig& c);
// Throws std::invalid_argument on unknown keys or mistyped values.
ExperimentConfig config_from_json(std::string_view text);

/// f_1^(l_1) * ... * f_c^(l_c) * mu^(d) split into its non-mu operands and
/// d. A function with no non-mu operand is taken as a single operand.
struct Decomposition {
  std::vector<arith::Term> fs;
  unsigned d = 0;
};
Decomposition decompose(const arith::ArithFn& f);

/// Entry point: parses argv, runs the subcommand, returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gcdeig::cli
