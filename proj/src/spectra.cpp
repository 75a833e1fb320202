#include "gcdeig/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gcdeig::spectra {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string show(std::uint64_t v) { return std::to_string(v); }

double frobenius_norm(const Matrix<double>& m) {
  long double s = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (double v : m.row(i)) s += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(s));
}

double max_offdiag(const std::vector<double>& a, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, std::abs(a[i * n + j]));
  return best;
}

// Absolute slack for comparing a solver eigenvalue with an exact quantity.
double strict_margin(const Spectrum& s) {
  return 10.0 * (s.residual + static_cast<double>(s.size()) * kEps) * s.frobenius;
}

FnValue product_over(const matrix::IndexSet& set, const arith::ArithFn& f, arith::Evaluator& ev) {
  FnValue p(1);
  for (auto x : set.elements()) p *= ev(f, x);
  return p;
}

// a <= b, exactly when both are exact, else with relative slack.
bool leq(const FnValue& a, const FnValue& b) {
  if (a.is_exact() && b.is_exact()) return a <= b;
  const double scale = std::max({1.0, std::abs(a.approx()), std::abs(b.approx())});
  return a.approx() <= b.approx() + 1e-9 * scale;
}

}  // namespace

double Spectrum::spectral_radius() const {
  if (eigenvalues.empty()) return 0.0;
  return std::max(std::abs(eigenvalues.front()), std::abs(eigenvalues.back()));
}

double Spectrum::error_bound() const {
  const double n = static_cast<double>(size());
  return frobenius * (n * residual + 4.0 * n * kEps);
}

NonConvergence::NonConvergence(double residual, int sweeps)
    : std::runtime_error("Jacobi iteration did not converge after " + std::to_string(sweeps) +
                         " sweeps (residual " + format_double(residual) + ")"),
      residual_(residual),
      sweeps_(sweeps) {}

Spectrum eigenvalues_symmetric(const Matrix<double>& m, const SolverOptions& opts) {
  const std::size_t n = m.rows();
  if (n == 0 || m.cols() != n) throw std::invalid_argument("eigenvalues_symmetric: matrix must be square and nonempty");
  const double frob = frobenius_norm(m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * frob)
        throw std::invalid_argument("matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");

  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = i <= j ? m(i, j) : m(j, i);

  Spectrum out;
  out.frobenius = frob;
  if (frob == 0.0) {
    out.eigenvalues.assign(n, 0.0);
    return out;
  }

  // Entries this small cannot move the stopping test; rotating them is wasted work.
  const double skip = 1e-2 * opts.tol * frob;
  double residual = max_offdiag(a, n) / frob;
  int sweeps = 0;
  while (residual >= opts.tol) {
    if (sweeps >= opts.max_sweeps) throw NonConvergence(residual, sweeps);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < skip) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          const double np = c * akp - s * akq;
          const double nq = s * akp + c * akq;
          a[k * n + p] = a[p * n + k] = np;
          a[k * n + q] = a[q * n + k] = nq;
        }
      }
    }
    ++sweeps;
    residual = max_offdiag(a, n) / frob;
  }

  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = a[i * n + i];
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  out.residual = residual;
  out.sweeps = sweeps;
  return out;
}

Spectrum eigenvalues_symmetric(const matrix::GcdMatrix& m, const SolverOptions& opts) {
  if (m.is_exact() && !matrix::is_symmetric(m.entries()))
    throw std::invalid_argument("gcd matrix is not exactly symmetric");
  return eigenvalues_symmetric(m.approx(), opts);
}

mpq_class determinant_exact(const Matrix<mpq_class>& m) {
  const std::size_t n = m.rows();
  if (n == 0 || m.cols() != n) throw std::invalid_argument("determinant_exact: matrix must be square and nonempty");

  // Row i scaled by the lcm of its denominators; det(m) = det(a) / prod(scale).
  std::vector<mpz_class> a(n * n);
  mpz_class scale_product = 1;
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class l = 1;
    for (const auto& v : m.row(i)) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j).get_num() * (l / m(i, j).get_den());
    scale_product *= l;
  }

  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k * n + k] == 0) {
      std::size_t pivot = k + 1;
      while (pivot < n && a[pivot * n + k] == 0) ++pivot;
      if (pivot == n) return 0;
      for (std::size_t j = k; j < n; ++j) std::swap(a[k * n + j], a[pivot * n + j]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class v = a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a[i * n + j] = std::move(v);
      }
      a[i * n + k] = 0;
    }
    prev = a[k * n + k];
  }
  mpq_class det(a[(n - 1) * n + (n - 1)] * sign, scale_product);
  det.canonicalize();
  return det;
}

double determinant_float(const Matrix<double>& m) {
  const std::size_t n = m.rows();
  if (n == 0 || m.cols() != n) throw std::invalid_argument("determinant_float: matrix must be square and nonempty");
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[pivot * n + k])) pivot = i;
    if (a[pivot * n + k] == 0.0) return 0.0;
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[pivot * n + j]);
      det = -det;
    }
    const double akk = a[k * n + k];
    det *= akk;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = a[i * n + k] / akk;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= factor * a[k * n + j];
    }
  }
  return det;
}

FnValue determinant(const matrix::GcdMatrix& m) {
  if (m.is_exact()) return FnValue(determinant_exact(m.exact()));
  return FnValue::approximate(determinant_float(m.approx()));
}

FnValue smith_determinant(const arith::ArithFn& f, std::size_t n, arith::Evaluator& ev) {
  if (n == 0) throw std::invalid_argument("smith_determinant: n must be positive");
  const auto transform = arith::convolve(f, arith::ArithFn::mobius());
  FnValue p(1);
  for (std::size_t k = 1; k <= n; ++k) p *= ev(transform, k);
  return p;
}

FnValue smith_determinant(const arith::ArithFn& f, std::size_t n) {
  arith::Evaluator ev;
  return smith_determinant(f, n, ev);
}

std::string_view to_string(BoundSource s) {
  switch (s) {
    case BoundSource::divisor_sum_lower: return "divisor_sum_lower";
    case BoundSource::determinant_sandwich: return "determinant_sandwich";
    case BoundSource::rank_one_plus_diag: return "rank_one_plus_diag";
    case BoundSource::constant_gcd: return "constant_gcd";
  }
  return "unknown";
}

FnValue divisor_sum_lower(const arith::ArithFn& transform, const matrix::IndexSet& set, arith::Evaluator& ev) {
  FnValue product(1);
  for (std::size_t k = 0; k < set.size(); ++k) {
    FnValue alpha(0);
    for (auto dv : numtheory::divisors(set[k])) {
      bool fresh = true;
      for (std::size_t t = 0; t < k && fresh; ++t) fresh = set[t] % dv != 0;
      if (fresh) alpha += ev(transform, dv);
    }
    product *= alpha;
  }
  return product;
}

BoundReport divisor_sum_bound(const arith::ArithFn& f, const matrix::IndexSet& set, arith::Evaluator& ev) {
  const auto transform = arith::convolve(f, arith::ArithFn::mobius());
  const auto verdict = arith::class_membership(f, set.elements(), ev);
  if (verdict.verdict != arith::Membership::in_c_tilde)
    throw HypothesisError(f.str() + " is not in C~_S: (f*mu)(" + show(verdict.witness_divisor) +
                          ") = " + verdict.witness_value.str());
  BoundReport r;
  r.source = BoundSource::divisor_sum_lower;
  r.lower = divisor_sum_lower(transform, set, ev);
  r.observed = determinant(matrix::build_gcd_matrix(f, set, ev));
  r.upper = product_over(set, f, ev);
  r.holds = leq(r.lower, r.observed);
  r.regime = "lower";
  return r;
}

BoundReport sandwich_bounds(std::span<const arith::Term> fs, unsigned d, const matrix::IndexSet& set,
                            arith::Evaluator& ev, const SolverOptions& opts) {
  if (fs.empty()) throw std::invalid_argument("sandwich_bounds: empty operand list");
  unsigned long total = 0;
  for (const auto& t : fs) total += t.multiplicity;
  if (total <= d)
    throw HypothesisError("sum of multiplicities " + std::to_string(total) + " must exceed the mu power " +
                          std::to_string(d));
  for (const auto& t : fs) {
    const auto verdict = arith::class_membership(t.fn, set.elements(), ev);
    if (!verdict.in_c())
      throw HypothesisError(t.fn.str() + " is not in C_S: (f*mu)(" + show(verdict.witness_divisor) + ") = " +
                            verdict.witness_value.str());
  }
  const auto h = arith::composite(fs, d);
  const auto g = arith::composite(fs, d + 1);
  const auto m = matrix::build_gcd_matrix(h, set, ev);

  BoundReport r;
  r.source = BoundSource::determinant_sandwich;
  r.lower = divisor_sum_lower(g, set, ev);
  r.upper = product_over(set, h, ev);
  r.observed = determinant(m);
  r.regime = r.observed.is_exact() ? "exact" : "float";

  const auto spec = eigenvalues_symmetric(m, opts);
  const auto dense = m.approx();
  double trace = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) trace += dense(i, i);
  r.smallest_eigenvalue = spec.smallest();
  r.positive_semidefinite = spec.smallest() >= -1e-8 * std::abs(trace);
  r.solver_residual = spec.residual;
  r.holds = leq(r.lower, r.observed) && leq(r.observed, r.upper) && *r.positive_semidefinite;
  return r;
}

BoundReport sandwich_bounds(std::span<const arith::Term> fs, unsigned d, const matrix::IndexSet& set,
                            const SolverOptions& opts) {
  arith::Evaluator ev;
  return sandwich_bounds(fs, d, set, ev, opts);
}

namespace {

void check_eigen_equality(BoundReport& r, const Spectrum& spec, const FnValue& expected) {
  const double err = std::max(1e-9 * std::abs(expected.approx()), 10.0 * spec.error_bound());
  r.required_margin = err;
  r.holds = std::abs(spec.smallest() - expected.approx()) <= err;
}

void check_eigen_strict(BoundReport& r, const Spectrum& spec) {
  const double margin = strict_margin(spec);
  const double obs = spec.smallest();
  r.required_margin = margin;
  r.lower_strict = r.upper_strict = true;
  r.holds = obs - r.lower.approx() > margin && r.upper.approx() - obs > margin;
}

}  // namespace

BoundReport rank_one_diag_bounds(std::span<const FnValue> r, const SolverOptions& opts) {
  const std::size_t n = r.size();
  if (n < 2) throw std::invalid_argument("rank_one_diag_bounds: need at least two entries");
  for (std::size_t i = 1; i < n; ++i)
    if (r[i] < r[i - 1])
      throw std::invalid_argument("rank_one_diag_bounds: r is not ascending at position " + std::to_string(i));
  if (r[0] < FnValue(1)) throw HypothesisError("rank_one_diag_bounds: r_1 = " + r[0].str() + " is below 1");

  matrix::OneRankPlusDiag form{{r.begin(), r.end()}, FnValue(1)};
  const auto spec = eigenvalues_symmetric(matrix::approx(form.materialize()), opts);

  BoundReport out;
  out.source = BoundSource::rank_one_plus_diag;
  out.observed = FnValue::approximate(spec.smallest());
  out.solver_residual = spec.residual;
  out.lower = r[0] - FnValue(1);
  if (r[0] == r[1]) {
    out.upper = out.lower;
    out.regime = "equality";
    check_eigen_equality(out, spec, out.lower);
  } else {
    FnValue denom(1);
    for (std::size_t i = 1; i < n; ++i) denom += FnValue(1) / (r[i] - r[0]);
    out.upper = out.lower + FnValue(1) / denom;
    out.regime = "strict";
    check_eigen_strict(out, spec);
  }
  return out;
}

BoundReport constant_gcd_bounds(const arith::ArithFn& f, std::uint64_t x, const matrix::IndexSet& set,
                                arith::Evaluator& ev, const SolverOptions& opts) {
  const std::size_t n = set.size();
  if (n < 2) throw std::invalid_argument("constant_gcd_bounds: need at least two elements");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::gcd(set[i], set[j]) != x)
        throw HypothesisError("gcd(" + show(set[i]) + ", " + show(set[j]) + ") = " +
                              show(std::gcd(set[i], set[j])) + ", expected " + show(x));
  const auto verdict = arith::class_membership(f, set.elements(), ev);
  if (!verdict.in_c())
    throw HypothesisError(f.str() + " is not in C_S: (f*mu)(" + show(verdict.witness_divisor) + ") = " +
                          verdict.witness_value.str());
  std::vector<FnValue> fv;
  fv.reserve(n);
  for (auto v : set.elements()) fv.push_back(ev(f, v));
  for (std::size_t i = 1; i < n; ++i)
    if (fv[i] < fv[i - 1])
      throw HypothesisError("f is not increasing: f(" + show(set[i - 1]) + ") = " + fv[i - 1].str() + " > f(" +
                            show(set[i]) + ") = " + fv[i].str());

  const FnValue fx = ev(f, x);
  const auto m = matrix::build_gcd_matrix(f, set, ev);
  const auto spec = eigenvalues_symmetric(m, opts);

  BoundReport out;
  out.source = BoundSource::constant_gcd;
  out.observed = FnValue::approximate(spec.smallest());
  out.solver_residual = spec.residual;
  if (fv[0].is_zero()) {
    out.lower = out.upper = FnValue(0);
    out.regime = "zero";
    check_eigen_equality(out, spec, out.lower);
  } else if (fx.is_zero() || fv[0] == fv[1]) {
    out.lower = out.upper = fv[0] - fx;
    out.regime = fx.is_zero() ? "diagonal" : "equality";
    check_eigen_equality(out, spec, out.lower);
  } else {
    FnValue denom(1);
    for (std::size_t i = 1; i < n; ++i) denom += fx / (fv[i] - fv[0]);
    out.lower = fv[0] - fx;
    out.upper = out.lower + fx / denom;
    out.regime = "strict";
    check_eigen_strict(out, spec);
  }
  return out;
}

BoundReport constant_gcd_bounds(const arith::ArithFn& f, std::uint64_t x, const matrix::IndexSet& set,
                                const SolverOptions& opts) {
  arith::Evaluator ev;
  return constant_gcd_bounds(f, x, set, ev, opts);
}

InterlacingResult interlacing_check(const Spectrum& small, const Spectrum& large) {
  if (small.size() + 1 != large.size())
    throw std::invalid_argument("interlacing_check: expected sizes n and n+1, got " + std::to_string(small.size()) +
                                " and " + std::to_string(large.size()));
  InterlacingResult r;
  r.tolerance = 1e-8 * std::max(small.spectral_radius(), large.spectral_radius());
  const double tol = r.tolerance;
  for (std::size_t k = 0; k < small.size(); ++k) {
    const double s = small.eigenvalues[k];
    const double below = large.eigenvalues[k] - (s + tol);
    const double above = (s + tol) - (large.eigenvalues[k + 1] + 2 * tol);
    r.max_violation = std::max({r.max_violation, below, above});
  }
  r.ok = r.max_violation <= 0.0;
  r.max_violation = std::max(0.0, r.max_violation);
  return r;
}

}  // namespace gcdeig::spectra
