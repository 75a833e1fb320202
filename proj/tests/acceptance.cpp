// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from independent oracles (oracles.hpp,
// Eigen, and numpy/sympy values frozen below).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "gcdeig/experiment.hpp"
#include "gcdeig/matrix.hpp"
#include "gcdeig/numtheory.hpp"
#include "gcdeig/sequence.hpp"
#include "gcdeig/spectra.hpp"
#include "oracles.hpp"

using namespace gcdeig;
using arith::ArithFn;
using arith::Term;
using matrix::IndexSet;

namespace {

using Clock = std::chrono::steady_clock;

struct Gate {
  int failures = 0;
  void report(int id, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

IndexSet first_n(std::size_t n) {
  std::vector<std::uint64_t> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = i + 1;
  return IndexSet(xs);
}

IndexSet random_subset(std::mt19937& rng, std::uint64_t hi, std::size_t max_n) {
  std::vector<std::uint64_t> all;
  for (std::uint64_t x = 1; x <= hi; ++x) all.push_back(x);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(1 + rng() % max_n);
  std::sort(all.begin(), all.end());
  return IndexSet(all);
}

double eigen_smallest(const matrix::Matrix<double>& m) {
  Eigen::MatrixXd a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::vector<std::vector<mpq_class>> to_rows(const matrix::Matrix<mpq_class>& m) {
  std::vector<std::vector<mpq_class>> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows[i].assign(m.row(i).begin(), m.row(i).end());
  return rows;
}

bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

void criterion_smith(Gate& gate) {
  const auto t0 = Clock::now();
  const std::vector<ArithFn> fns = {ArithFn::identity(), ArithFn::phi(), ArithFn::sigma(1), ArithFn::zeta()};
  arith::Evaluator ev;
  int checked = 0;
  bool ok = true;
  for (const auto& f : fns)
    for (std::size_t n = 1; n <= 25; ++n) {
      const auto m = matrix::build_gcd_matrix(f, first_n(n), ev);
      const auto det = spectra::determinant(m);
      ok = ok && det.is_exact() && det == spectra::smith_determinant(f, n, ev);
      ++checked;
    }
  // det I(1..10) = prod phi(k) = 18432
  ok = ok && spectra::smith_determinant(ArithFn::identity(), 10) == FnValue(18432);
  const double secs = seconds_since(t0);
  gate.report(1, ok && secs < 10.0,
              "Smith determinant equals Bareiss determinant on {1..n}, n<=25, 4 functions (" +
                  std::to_string(checked) + " cases, " + std::to_string(secs) + " s)");
}

void criterion_counterexample(Gate& gate) {
  const Term phi1[] = {{ArithFn::phi(), 1}};
  const auto value = arith::eval(arith::composite(phi1, 2), 2);
  const std::uint64_t s[] = {2};
  const auto v = arith::class_membership(arith::composite(phi1, 1), s);
  const bool ok = value == FnValue(-1) && v.verdict == arith::Membership::not_in_c && v.witness_divisor == 2 &&
                  v.witness_value == FnValue(-1);
  gate.report(2, ok,
              "(phi*mu^(2))(2) = " + value.str() + ", phi*mu on S={2} is " + std::string(to_string(v.verdict)));
}

void criterion_prime_formula(Gate& gate) {
  struct Atom {
    ArithFn fn;
    oracle::Fn ref;
  };
  const std::vector<Atom> atoms = {
      {ArithFn::identity(), oracle::power_fn(1)},     {ArithFn::phi(), oracle::totient},
      {ArithFn::zeta(), oracle::power_fn(0)},         {ArithFn::xi(2), oracle::power_fn(2)},
      {ArithFn::jordan(1), oracle::jordan(1)},        {ArithFn::jordan(2), oracle::jordan(2)},
      {ArithFn::sigma(0), oracle::divisor_power_sum(0)}, {ArithFn::sigma(1), oracle::divisor_power_sum(1)},
      {ArithFn::psi(1), oracle::dedekind_psi(1)},     {ArithFn::psi(2), oracle::dedekind_psi(2)},
  };
  const auto primes = numtheory::primes_below(101);
  arith::Evaluator ev;
  std::size_t checked = 0;
  bool ok = true;
  std::string first_bad;
  // Multisets of atoms with total multiplicity 1..4.
  std::vector<unsigned> mult(atoms.size(), 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
    if (i == atoms.size()) {
      std::vector<Term> fs;
      oracle::Fn ref = oracle::delta_fn();
      for (std::size_t k = 0; k < atoms.size(); ++k)
        if (mult[k]) {
          fs.push_back({atoms[k].fn, mult[k]});
          ref = oracle::conv(ref, oracle::conv_power(atoms[k].ref, mult[k]));
        }
      if (fs.empty()) return;
      for (unsigned d = 0; d <= 3; ++d) {
        const auto h = oracle::conv(ref, oracle::conv_power(oracle::mu_fn(), d));
        for (auto p : primes) {
          const auto got = arith::value_at_prime(fs, d, p, ev);
          ++checked;
          if (!got.is_exact() || *got.exact() != h(p)) {
            if (ok) first_bad = arith::composite(fs, d).str() + " at " + std::to_string(p);
            ok = false;
          }
        }
      }
      return;
    }
    for (unsigned l = 0; l <= left; ++l) {
      mult[i] = l;
      rec(i + 1, left - l);
    }
    mult[i] = 0;
  };
  rec(0, 4);
  gate.report(3, ok,
              "closed form at primes <= 100 matches divisor-sum oracle (" + std::to_string(checked) + " cases)" +
                  (ok ? "" : ", first mismatch " + first_bad));
}

void criterion_sandwich(Gate& gate) {
  const std::vector<ArithFn> pool = {ArithFn::phi(),    ArithFn::identity(), ArithFn::sigma(1), ArithFn::psi(1),
                                     ArithFn::jordan(2), ArithFn::xi(2),      ArithFn::zeta()};
  std::mt19937 rng(20240611);
  arith::Evaluator ev;
  int held = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Term> fs;
    unsigned total = 0;
    for (const auto& f : pool)
      if (rng() % 4 == 0) {
        const unsigned l = 1 + rng() % 2;
        fs.push_back({f, l});
        total += l;
      }
    if (fs.empty()) {
      fs.push_back({pool[trial % pool.size()], 2});
      total = 2;
    }
    const unsigned d = rng() % total;
    const auto r = spectra::sandwich_bounds(fs, d, random_subset(rng, 40, 8), ev);
    held += r.holds && r.regime == "exact";
  }
  int psd = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Term fs[] = {{pool[trial % pool.size()], 2}, {ArithFn::phi(), 1}};
    const auto set = random_subset(rng, 120, 40);
    const auto m = matrix::build_composite_matrix(fs, 2, set, ev);
    const auto s = spectra::eigenvalues_symmetric(m);
    double trace = 0;
    for (std::size_t i = 0; i < set.size(); ++i) trace += m.approx()(i, i);
    psd += s.smallest() >= -1e-8 * trace;
  }
  gate.report(4, held == 100 && psd == 10,
              "determinant sandwich holds exactly on " + std::to_string(held) + "/100 seeded instances; PSD on " +
                  std::to_string(psd) + "/10 sets with n <= 40");
}

void criterion_en_plus_diag(Gate& gate) {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> num(-6, 12), den(1, 4);
  int ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<mpq_class> a(n);
    for (auto& v : a) {
      v = mpq_class(num(rng), den(rng));
      v.canonicalize();
    }
    matrix::Matrix<mpq_class> m(n, n, mpq_class(1));
    for (std::size_t i = 0; i < n; ++i) m(i, i) = a[i];
    const auto closed = spectra::det_en_plus_diag<mpq_class>(a);
    ok += closed == spectra::determinant_exact(m) && closed == oracle::cofactor_det(to_rows(m));
  }
  gate.report(5, ok == 50, "det(E_n + diag(a - 1)) closed form exact on " + std::to_string(ok) + "/50 vectors");
}

void criterion_rank_one(Gate& gate) {
  // phi on {2, 3, 5} is E_3 + diag(0, 1, 3); smallest root of
  // x^3 - 7x^2 + 11x - 3 from sympy.
  const double lambda_ref = 0.344557618450169216906;
  const auto m = matrix::build_gcd_matrix(ArithFn::phi(), IndexSet({2, 3, 5}));
  const auto r = matrix::as_one_rank_plus_diag(m, 1);
  const auto strict = spectra::rank_one_diag_bounds(r.r);
  const auto cg = spectra::constant_gcd_bounds(ArithFn::phi(), 1, IndexSet({2, 3, 5}));
  const double obs = strict.observed.approx();
  const bool strict_ok = strict.regime == "strict" && strict.holds && strict.lower == FnValue(0) &&
                         strict.upper == FnValue(mpq_class(3, 7)) && obs - 0.0 > strict.required_margin &&
                         3.0 / 7.0 - obs > strict.required_margin && std::abs(obs - lambda_ref) < 1e-12 &&
                         std::abs(eigen_smallest(m.approx()) - lambda_ref) < 1e-12 && cg.holds &&
                         cg.regime == "strict";

  const FnValue req[] = {3, 3, 5, 8};
  const auto eq = spectra::rank_one_diag_bounds(req);
  const bool eq_ok = eq.regime == "equality" && std::abs(eq.observed.approx() - 2.0) <= 1e-9 && eq.holds;
  // phi(3) = phi(4) = 2 with all pairwise gcds 1: lambda = f(x1) - f(x) = 1.
  const auto cge = spectra::constant_gcd_bounds(ArithFn::phi(), 1, IndexSet({3, 4, 5, 7}));
  const bool cge_ok = cge.regime == "equality" && std::abs(cge.observed.approx() - 1.0) <= 1e-9 && cge.holds;
  gate.report(6, strict_ok && eq_ok && cge_ok,
              "phi on {2,3,5}: lambda = " + format_double(obs) + " strictly inside (0, 3/7); equality cases " +
                  format_double(eq.observed.approx()) + " and " + format_double(cge.observed.approx()));
}

void criterion_kronecker(Gate& gate) {
  bool ok = true;
  {
    const IndexSet x({1, 2}), y({3, 5});
    const auto t = matrix::tensor_product_set(x, y);
    ok = ok && t.set == IndexSet({3, 5, 6, 10});
    for (const auto& f : {ArithFn::phi(), ArithFn::sigma(1), ArithFn::identity()}) {
      const auto lhs = matrix::permute_to_product_order(matrix::build_gcd_matrix(f, t.set).entries(), t);
      ok = ok && lhs == matrix::kronecker(matrix::build_gcd_matrix(f, x).entries(),
                                          matrix::build_gcd_matrix(f, y).entries());
    }
  }
  const auto primes = numtheory::primes_below(60);
  std::mt19937 rng(777);
  const std::vector<ArithFn> fns = {ArithFn::phi(), ArithFn::identity(), ArithFn::sigma(1), ArithFn::psi(1),
                                    ArithFn::jordan(2)};
  int pairs = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint64_t> pool(primes.begin(), primes.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    auto draw = [&](std::size_t k, std::size_t off) {
      std::vector<std::uint64_t> xs;
      if (rng() % 2) xs.push_back(1);
      for (std::size_t i = 0; i < k; ++i) xs.push_back(pool[off + i] * (rng() % 3 == 0 ? pool[off + i] : 1));
      std::sort(xs.begin(), xs.end());
      return IndexSet(xs);
    };
    const auto x = draw(1 + rng() % 3, 0), y = draw(1 + rng() % 3, 5);
    const auto& f = fns[trial % fns.size()];
    const auto t = matrix::tensor_product_set(x, y);
    pairs += matrix::permute_to_product_order(matrix::build_gcd_matrix(f, t.set).entries(), t) ==
             matrix::kronecker(matrix::build_gcd_matrix(f, x).entries(), matrix::build_gcd_matrix(f, y).entries());
  }
  const auto g = ArithFn::patched(ArithFn::identity(), {{10, mpq_class(9)}});
  const auto t = matrix::tensor_product_set(IndexSet({1, 2}), IndexSet({3, 5}));
  const auto lhs = matrix::permute_to_product_order(matrix::build_gcd_matrix(g, t.set).entries(), t);
  const auto rhs = matrix::kronecker(matrix::build_gcd_matrix(g, IndexSet({1, 2})).entries(),
                                     matrix::build_gcd_matrix(g, IndexSet({3, 5})).entries());
  const bool counter = lhs(3, 3) == FnValue(9) && rhs(3, 3) == FnValue(10);
  gate.report(7, ok && pairs == 20 && counter,
              "f(X (.) Y) = f(X) (x) f(Y) on {1,2}x{3,5} and " + std::to_string(pairs) +
                  "/20 random pairs; non-multiplicative f gives " + rhs(3, 3).str() + " vs " + lhs(3, 3).str());
}

void criterion_convergence(Gate& gate) {
  const auto t0 = Clock::now();
  struct Case {
    std::vector<Term> fs;
    unsigned d;
    const char* seq;
    double pinned;  // lambda_200^(1), numpy eigvalsh
  };
  const std::vector<Case> cases = {
      {{{ArithFn::xi(1), 1}}, 0, "range:1..200", 0.09504904835221355},
      {{{ArithFn::phi(), 1}}, 0, "ap:1,2,0", 0.1291894051131994},
      {{{ArithFn::phi(), 2}}, 1, "ap:1,2,0", 0.3158093361759313},
  };
  const std::size_t qs[] = {1, 2, 3};
  spectra::ExperimentOptions opts;
  opts.threads = 1;
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto reps = spectra::convergence_experiment(c.fs, c.d, spectra::parse_sequence(c.seq), qs, 200, opts);
    for (const auto& r : reps) {
      const auto& first = r.series.at(10 - r.q);
      const bool decreased = first.value && r.final_value && *r.final_value < *first.value;
      ok = ok && r.monotone_nonincreasing && r.nonnegative && r.interlacing_violations == 0 && r.gaps == 0 &&
           decreased;
    }
    const double got = reps[0].final_value.value_or(NAN);
    const auto m = matrix::build_composite_matrix(c.fs, c.d, spectra::generate(spectra::parse_sequence(c.seq), 200));
    const double eig = eigen_smallest(m.approx());
    ok = ok && close_rel(got, c.pinned, 1e-8) && close_rel(eig, c.pinned, 1e-8);
    detail += " " + format_double(got);
  }
  const double secs = seconds_since(t0);
  gate.report(8, ok && secs < 120.0,
              "lambda_n^(q), q=1..3, n<=200: monotone, nonnegative, interlacing, pinned lambda_200^(1) =" + detail +
                  " (" + std::to_string(secs) + " s)");
}

void criterion_divergence(Gate& gate) {
  const auto primes = numtheory::primes_in_progression(1, 200);
  const auto e = spectra::divergence_check(ArithFn::phi(), primes);
  bool windows_up = !e.windows.empty();
  for (const auto& w : e.windows) windows_up = windows_up && w.increment > 0;
  const bool ok = e.strictly_increasing && windows_up && e.best_c <= 1.0 && e.linear_bound_holds &&
                  e.partial_sums.size() == 200;
  gate.report(9, ok,
              "sum 1/phi(p) over the first 200 primes grows in every doubling window (" +
                  std::to_string(e.windows.size()) + " windows, partial sum " + format_double(e.partial_sums.back()) +
                  "), best C = " + format_double(e.best_c) + "; " + e.label);
}

}  // namespace

int main() {
  Gate gate;
  const std::vector<std::function<void(Gate&)>> criteria = {
      criterion_smith,   criterion_counterexample, criterion_prime_formula,
      criterion_sandwich, criterion_en_plus_diag,  criterion_rank_one,
      criterion_kronecker, criterion_convergence,  criterion_divergence,
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i](gate);
    } catch (const std::exception& e) {
      gate.report(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", gate.failures, criteria.size());
  return gate.failures ? 1 : 0;
}
