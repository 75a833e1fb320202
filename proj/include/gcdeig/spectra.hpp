#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcdeig/arith.hpp"
#include "gcdeig/errors.hpp"
#include "gcdeig/matrix.hpp"
#include "gcdeig/numtheory.hpp"
#include "gcdeig/value.hpp"

namespace gcdeig::spectra {

using matrix::Matrix;

struct SolverOptions {
  // Stop once the largest off-diagonal magnitude is below tol times the
  // initial Frobenius norm.
  double tol = 1e-12;
  int max_sweeps = 60;
};

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  double residual = 0.0;            // max |offdiag| / initial Frobenius norm
  int sweeps = 0;
  double frobenius = 0.0;           // initial Frobenius norm

  std::size_t size() const { return eigenvalues.size(); }
  double smallest() const { return eigenvalues.front(); }
  double spectral_radius() const;
  // Absolute accuracy estimate for each eigenvalue.
  double error_bound() const;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(double residual, int sweeps);
  double residual() const { return residual_; }
  int sweeps() const { return sweeps_; }

 private:
  double residual_;
  int sweeps_;
};

/// Cyclic Jacobi with row-major sweeps over the upper triangle.
Spectrum eigenvalues_symmetric(const Matrix<double>& m, const SolverOptions& opts = {});
// Symmetry is checked exactly when every entry is exact.
Spectrum eigenvalues_symmetric(const matrix::GcdMatrix& m, const SolverOptions& opts = {});

/// Fraction-free (Bareiss) elimination after clearing denominators row by row.
mpq_class determinant_exact(const Matrix<mpq_class>& m);
// Partial-pivoting LU; used on the floating path only.
double determinant_float(const Matrix<double>& m);
// Exact when every entry is exact.
FnValue determinant(const matrix::GcdMatrix& m);

/// prod_{k<=n} (f*mu)(k), the determinant of f on {1..n}, without elimination.
FnValue smith_determinant(const arith::ArithFn& f, std::size_t n, arith::Evaluator& ev);
FnValue smith_determinant(const arith::ArithFn& f, std::size_t n);

/// det(E_n + diag(a_1 - 1, ..., a_n - 1))
///   = prod (a_i - 1) + sum_i prod_{j != i} (a_j - 1)
/// over any commutative ring; the empty product is 1.
template <class T>
T det_en_plus_diag(std::span<const T> a) {
  const std::size_t n = a.size();
  if (n == 0) throw std::invalid_argument("det_en_plus_diag: empty input");
  std::vector<T> shifted;
  shifted.reserve(n);
  for (const auto& v : a) shifted.push_back(v - T(1));
  // prefix[i] = prod_{j<i}, suffix[i] = prod_{j>=i}
  std::vector<T> prefix(n + 1, T(1)), suffix(n + 1, T(1));
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * shifted[i];
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] * shifted[i];
  T total = prefix[n];
  for (std::size_t i = 0; i < n; ++i) total += prefix[i] * suffix[i + 1];
  return total;
}

enum class BoundSource {
  divisor_sum_lower,     // det(g(S)) >= prod alpha_g(x_k) for g in C~_S
  determinant_sandwich,  // prod alpha <= det <= prod h(x_k), PSD, for composites
  rank_one_plus_diag,    // smallest eigenvalue of E_n + diag(r - 1)
  constant_gcd,          // smallest eigenvalue when all pairwise gcds equal x
};

std::string_view to_string(BoundSource s);

struct BoundReport {
  BoundSource source = BoundSource::determinant_sandwich;
  FnValue lower;
  FnValue upper;
  FnValue observed;
  bool lower_strict = false;
  bool upper_strict = false;
  bool holds = false;
  // Which branch of the statement applied, e.g. "equality" or "strict".
  std::string regime;
  // Solver diagnostics when `observed` is an eigenvalue.
  double solver_residual = 0.0;
  double required_margin = 0.0;
  // Smallest eigenvalue check for determinant_sandwich.
  std::optional<double> smallest_eigenvalue;
  std::optional<bool> positive_semidefinite;
};

/// prod_k sum over d' | x_k with d' not dividing any smaller element of S of
/// g(d'). Here g is already the Mobius transform (the caller convolves).
FnValue divisor_sum_lower(const arith::ArithFn& transform, const matrix::IndexSet& set, arith::Evaluator& ev);

/// det(f(S)) >= prod alpha_f(x_k); requires f in C~_S.
BoundReport divisor_sum_bound(const arith::ArithFn& f, const matrix::IndexSet& set, arith::Evaluator& ev);

/// For h = f_1^(l_1) * ... * f_c^(l_c) * mu^(d) with every f_i in C_S and
/// sum l_i > d: prod alpha_{h}(x_k) <= det(h(S)) <= prod h(x_k), and h(S) is
/// positive semi-definite (smallest eigenvalue >= -1e-8 trace).
BoundReport sandwich_bounds(std::span<const arith::Term> fs, unsigned d, const matrix::IndexSet& set,
                            arith::Evaluator& ev, const SolverOptions& opts = {});
BoundReport sandwich_bounds(std::span<const arith::Term> fs, unsigned d, const matrix::IndexSet& set,
                            const SolverOptions& opts = {});

/// Smallest eigenvalue of E_n + diag(r - 1) for ascending r with r_1 >= 1:
/// exactly r_1 - 1 when r_1 = r_2, otherwise strictly between r_1 - 1 and
/// r_1 - 1 + 1 / (1 + sum_{i>=2} 1 / (r_i - r_1)).
BoundReport rank_one_diag_bounds(std::span<const FnValue> r, const SolverOptions& opts = {});

/// Smallest eigenvalue of f(S) when every pairwise gcd of S is x, f is in C
/// on S and f is nondecreasing along S.
BoundReport constant_gcd_bounds(const arith::ArithFn& f, std::uint64_t x, const matrix::IndexSet& set,
                                arith::Evaluator& ev, const SolverOptions& opts = {});
BoundReport constant_gcd_bounds(const arith::ArithFn& f, std::uint64_t x, const matrix::IndexSet& set,
                                const SolverOptions& opts = {});

struct InterlacingResult {
  bool ok = true;
  double max_violation = 0.0;
  double tolerance = 0.0;
};

/// Cauchy interlacing of an n-spectrum inside an (n+1)-spectrum:
/// large_k <= small_k + tol <= large_{k+1} + 2 tol, tol = 1e-8 * spectral radius.
InterlacingResult interlacing_check(const Spectrum& small, const Spectrum& large);

}  // namespace gcdeig::spectra
