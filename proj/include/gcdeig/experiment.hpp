#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcdeig/arith.hpp"
#include "gcdeig/numtheory.hpp"
#include "gcdeig/sequence.hpp"
#include "gcdeig/spectra.hpp"

namespace gcdeig::spectra {

struct ExperimentOptions {
  SolverOptions solver;
  // Skip the class and multiplicity hypotheses; the series is then evidence
  // only (used for the open converse questions).
  bool exploratory = false;
  unsigned threads = 1;
  // How many progression primes are probed for a zero of the composite.
  std::size_t zero_probe_primes = 64;
};

struct SeriesPoint {
  std::size_t n = 0;
  std::optional<double> value;  // empty when the solver failed at this n
  double residual = 0.0;
  std::string error;
};

struct ConvergenceReport {
  std::string function;
  std::string sequence;
  std::size_t q = 1;
  std::size_t n_max = 0;
  bool exploratory = false;
  std::vector<SeriesPoint> series;  // n = q..n_max

  bool monotone_nonincreasing = true;
  bool nonnegative = true;
  std::optional<double> final_value;
  std::size_t interlacing_violations = 0;
  double max_interlacing_violation = 0.0;
  std::size_t gaps = 0;

  // Set when the composite vanishes at some p_i(b) of the progression's
  // common difference; then lambda_n^(q) should reach zero for large n.
  std::optional<std::uint64_t> zero_prime;
  bool zero_confirmed = false;
  // Number of exactly zero rows of the largest matrix; lambda^(q) is exactly
  // zero when this is at least q.
  std::size_t exact_zero_rows = 0;
};

/// lambda_n^(q) of the GCD matrix of f_1^(l_1) * ... * mu^(d) on the first n
/// terms of `seq`, for n = q..n_max and every q in `qs`. One set of spectra is
/// shared across all q. Throws HypothesisError unless exploratory.
std::vector<ConvergenceReport> convergence_experiment(std::span<const arith::Term> fs, unsigned d,
                                                      const SequenceSpec& seq, std::span<const std::size_t> qs,
                                                      std::size_t n_max, const ExperimentOptions& opts = {});

ConvergenceReport convergence_experiment(std::span<const arith::Term> fs, unsigned d, const SequenceSpec& seq,
                                         std::size_t q, std::size_t n_max, const ExperimentOptions& opts = {});

struct DoublingWindow {
  std::size_t begin = 0;  // prime indices [begin, end), 0-based
  std::size_t end = 0;
  double increment = 0.0;  // growth of the partial sum over the window
  double max_ratio = 0.0;  // max f(p) / p over the window
};

/// Finite evidence about sum 1 / (f_1(p) + ... + f_c(p)) over p = p_i(b) and
/// about the linear bound f_j(p) <= C p. Not a proof of divergence.
struct DivergenceEvidence {
  std::string function;
  std::uint64_t b = 1;
  std::vector<std::uint64_t> primes;
  std::vector<double> partial_sums;
  std::vector<DoublingWindow> windows;
  bool strictly_increasing = false;  // every window adds a positive amount
  // Largest f_j(p) / p seen; the linear bound with constant C holds at every
  // sample iff best_c <= C.
  double best_c = 0.0;
  double c = 1.0;
  bool linear_bound_holds = false;
  // Least-squares slope of log f(p) against log p over the upper half of
  // the primes (NaN if some f(p) <= 0 there).
  double growth_exponent = 0.0;
  // Window maxima of f(p) / p increase strictly and growth_exponent exceeds
  // 1.05: no single C works across the sampled range.
  bool superlinear = false;
  std::optional<std::uint64_t> zero_at_prime;
  std::string label = "finite evidence only; not a proof of divergence";
};

DivergenceEvidence divergence_check(std::span<const arith::ArithFn> fs, const numtheory::ProgressionPrimes& primes,
                                    double c = 1.0);
DivergenceEvidence divergence_check(const arith::ArithFn& f, const numtheory::ProgressionPrimes& primes,
                                    double c = 1.0);

}  // namespace gcdeig::spectra
