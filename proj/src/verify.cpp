#include "gcdeig/verify.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

#include "gcdeig/arith.hpp"
#include "gcdeig/matrix.hpp"
#include "gcdeig/numtheory.hpp"
#include "gcdeig/spectra.hpp"

namespace gcdeig::cli {

namespace {

using arith::ArithFn;
using arith::Term;
using matrix::IndexSet;

// Deliberately naive reference implementations, sharing nothing with the
// library's fast paths.
namespace naive {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int mobius(std::uint64_t m) {
  int sign = 1;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    m /= p;
    if (m % p == 0) return 0;
    sign = -sign;
  }
  return m > 1 ? -sign : sign;
}

std::uint64_t euclid_subtract(std::uint64_t a, std::uint64_t b) {
  while (a != b) {
    if (a > b)
      a -= b;
    else
      b -= a;
  }
  return a;
}

mpq_class power(std::uint64_t base, long e) {
  mpz_class z = 1;
  for (long i = 0; i < (e < 0 ? -e : e); ++i) z *= base;
  return e < 0 ? mpq_class(mpz_class(1), z) : mpq_class(z);
}

mpq_class atom(const ArithFn& f, std::uint64_t m) {
  const long e = static_cast<long>(f.exponent());
  mpq_class s = 0;
  switch (f.atom()) {
    case arith::Atom::delta: return m == 1 ? 1 : 0;
    case arith::Atom::mobius: return mobius(m);
    case arith::Atom::zeta: return 1;
    case arith::Atom::identity: return mpq_class(mpz_class(std::to_string(m)));
    case arith::Atom::phi: {
      long count = 0;
      for (std::uint64_t k = 1; k <= m; ++k) count += euclid_subtract(k, m) == 1;
      return count;
    }
    case arith::Atom::xi: return power(m, e);
    case arith::Atom::jordan:
      for (std::uint64_t d = 1; d <= m; ++d)
        if (m % d == 0) s += power(d, e) * mobius(m / d);
      return s;
    case arith::Atom::sigma:
      for (std::uint64_t d = 1; d <= m; ++d)
        if (m % d == 0) s += power(d, e);
      return s;
    case arith::Atom::psi:
      for (std::uint64_t d = 1; d <= m; ++d)
        if (m % d == 0 && mobius(m / d) != 0) s += power(d, e);
      return s;
    case arith::Atom::patched: {
      const auto& ov = f.overrides();
      if (auto it = ov.find(m); it != ov.end()) return it->second;
      return atom(f.patch_base(), m);
    }
  }
  throw std::logic_error("unknown atom");
}

// Divisor-sum definition applied factor by factor.
class Evaluator {
 public:
  mpq_class operator()(const ArithFn& f, std::uint64_t m) {
    if (f.is_atom()) return atom(f, m);
    std::vector<ArithFn> factors;
    for (const auto& t : f.terms())
      for (unsigned k = 0; k < t.multiplicity; ++k) factors.push_back(t.fn);
    memo_.clear();
    return chain(factors, 0, m);
  }

 private:
  mpq_class chain(const std::vector<ArithFn>& fs, std::size_t i, std::uint64_t m) {
    if (i + 1 == fs.size()) return atom(fs[i], m);
    const auto key = std::make_pair(i, m);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    mpq_class s = 0;
    for (std::uint64_t d = 1; d <= m; ++d)
      if (m % d == 0) s += atom(fs[i], d) * chain(fs, i + 1, m / d);
    memo_[key] = s;
    return s;
  }

  std::map<std::pair<std::size_t, std::uint64_t>, mpq_class> memo_;
};

// Cofactor expansion along the first row; n <= 8.
mpq_class cofactor_det(const matrix::Matrix<mpq_class>& a) {
  const std::size_t n = a.rows();
  if (n == 1) return a(0, 0);
  mpq_class s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    matrix::Matrix<mpq_class> minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = a(r, c);
    const mpq_class term = a(0, j) * cofactor_det(minor);
    s += (j % 2 ? -term : term);
  }
  return s;
}

}  // namespace naive

class Suite {
 public:
  Suite(std::string name, std::uint64_t seed) : rng_(seed) { report_.name = std::move(name); }

  void check(bool ok, const std::function<std::string()>& reproducer) {
    ++report_.checks;
    if (!ok) report_.failures.push_back(report_.name + ": " + reproducer());
  }

  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
  }

  mpq_class rational(long lo, long hi, long max_den) {
    mpq_class q(std::uniform_int_distribution<long>(lo, hi)(rng_),
                std::uniform_int_distribution<long>(1, max_den)(rng_));
    q.canonicalize();
    return q;
  }

  // Random strictly increasing subset of {1..limit} of size n.
  IndexSet subset(std::uint64_t limit, std::size_t n) {
    std::vector<std::uint64_t> pool(limit);
    for (std::uint64_t i = 0; i < limit; ++i) pool[i] = i + 1;
    std::shuffle(pool.begin(), pool.end(), rng_);
    pool.resize(n);
    std::sort(pool.begin(), pool.end());
    return IndexSet(pool);
  }

  std::mt19937_64& rng() { return rng_; }
  SuiteReport take() { return std::move(report_); }

 private:
  std::mt19937_64 rng_;
  SuiteReport report_;
};

std::vector<ArithFn> multiplicative_catalog() {
  return {ArithFn::identity(), ArithFn::phi(),      ArithFn::zeta(),     ArithFn::xi(1),    ArithFn::xi(2),
          ArithFn::jordan(1),  ArithFn::jordan(2),  ArithFn::sigma(0),   ArithFn::sigma(1), ArithFn::psi(0),
          ArithFn::psi(1),     ArithFn::mobius(),   ArithFn::delta()};
}

std::string show_set(const IndexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

SuiteReport suite_numtheory(std::uint64_t seed) {
  Suite s("numtheory", seed);
  for (std::uint64_t n = 1; n <= 20000; ++n) {
    const auto f = numtheory::factorize(n);
    bool ok = f.product() == n && (n == 1) == f.factors.empty();
    for (std::size_t i = 0; i < f.factors.size() && ok; ++i)
      ok = f.factors[i].exponent >= 1 && naive::is_prime(f.factors[i].prime) &&
           (i == 0 || f.factors[i - 1].prime < f.factors[i].prime);
    s.check(ok, [n] { return "factorize(" + std::to_string(n) + ")"; });
  }
  const auto small_primes = numtheory::primes_below(100000);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::uint64_t, unsigned> want;
    std::uint64_t n = 1;
    for (int k = 0; k < 3; ++k) {
      const auto p = small_primes[s.uniform(0, small_primes.size() - 1)];
      n *= p;
      ++want[p];
    }
    const auto f = numtheory::factorize(n);
    std::map<std::uint64_t, unsigned> got;
    for (const auto& pp : f.factors) got[pp.prime] = pp.exponent;
    s.check(got == want, [n] { return "factorize(" + std::to_string(n) + ") disagrees with its construction"; });
  }
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    std::vector<std::uint64_t> want;
    for (std::uint64_t d = 1; d <= n; ++d)
      if (n % d == 0) want.push_back(d);
    s.check(numtheory::divisors(n) == want, [n] { return "divisors(" + std::to_string(n) + ")"; });
  }
  for (int trial = 0; trial < 10000; ++trial) {
    const auto a = s.uniform(1, 5000), b = s.uniform(1, 5000);
    s.check(numtheory::gcd(a, b) == naive::euclid_subtract(a, b),
            [a, b] { return "gcd(" + std::to_string(a) + ", " + std::to_string(b) + ")"; });
  }
  for (std::uint64_t b : {1, 2, 3, 4, 6, 10, 12}) {
    const auto pp = numtheory::primes_in_progression(b, 50);
    bool ok = pp.primes.size() == 50;
    std::uint64_t prev = 0;
    for (auto p : pp.primes) {
      ok = ok && naive::is_prime(p) && (b == 1 || p % b == 1) && p > prev;
      for (std::uint64_t q = prev + 1; q < p && ok; ++q)
        if ((b == 1 || q % b == 1) && naive::is_prime(q)) ok = false;
      prev = p;
    }
    s.check(ok, [b] { return "primes_in_progression(" + std::to_string(b) + ", 50)"; });
  }
  return s.take();
}

SuiteReport suite_arith(std::uint64_t seed) {
  Suite s("arith", seed);
  arith::Evaluator ev;
  naive::Evaluator oracle;
  const auto catalog = multiplicative_catalog();
  for (const auto& f : catalog) {
    const auto fd = arith::convolve(f, ArithFn::delta());
    for (std::uint64_t m = 1; m <= 200; ++m) {
      const auto v = ev(f, m);
      s.check(v == FnValue(oracle(f, m)) && ev(fd, m) == v,
              [&] { return f.str() + " at " + std::to_string(m) + " = " + v.str(); });
    }
  }
  const auto mz = arith::convolve(ArithFn::mobius(), ArithFn::zeta());
  for (std::uint64_t m = 1; m <= 3000; ++m)
    s.check(ev(mz, m) == FnValue(m == 1 ? 1 : 0), [m] { return "(mu*zeta)(" + std::to_string(m) + ")"; });
  for (int e = 0; e <= 2; ++e) {
    const auto lhs = arith::convolve(ArithFn::sigma(e), ArithFn::mobius());
    for (std::uint64_t m = 1; m <= 300; ++m)
      s.check(ev(lhs, m) == ev(ArithFn::xi(e), m),
              [&] { return "(sigma{" + std::to_string(e) + "}*mu)(" + std::to_string(m) + ")"; });
  }
  const std::vector<ArithFn> positive = {ArithFn::identity(), ArithFn::phi(),    ArithFn::zeta(),
                                         ArithFn::xi(1),       ArithFn::sigma(1), ArithFn::psi(1),
                                         ArithFn::jordan(2)};
  const auto primes = numtheory::primes_below(101);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Term> fs;
    unsigned total = 0;
    const auto c = s.uniform(1, 3);
    std::vector<ArithFn> pool = positive;
    std::shuffle(pool.begin(), pool.end(), s.rng());
    for (std::uint64_t i = 0; i < c && total < 4; ++i) {
      const auto l = static_cast<unsigned>(s.uniform(1, 4 - total));
      fs.push_back({pool[i], l});
      total += l;
    }
    const auto d = static_cast<unsigned>(s.uniform(0, 3));
    const auto h = arith::composite(fs, d);
    for (auto p : primes) {
      const auto closed = arith::value_at_prime(fs, d, p, ev);
      const auto full = oracle(h, p);
      s.check(closed == FnValue(full),
              [&] { return h.str() + " at " + std::to_string(p) + ": closed " + closed.str() + " vs " + format_exact(full); });
    }
  }
  for (int trial = 0; trial < 30; ++trial) {
    const auto& f = catalog[s.uniform(0, catalog.size() - 1)];
    const auto& g = catalog[s.uniform(0, catalog.size() - 1)];
    const auto& h = catalog[s.uniform(0, catalog.size() - 1)];
    const auto fg = arith::convolve(f, g), gf = arith::convolve(g, f);
    const auto l = arith::convolve(fg, h), r = arith::convolve(f, arith::convolve(g, h));
    for (std::uint64_t m = 1; m <= 120; ++m)
      s.check(ev(fg, m) == ev(gf, m) && ev(l, m) == ev(r, m) && ev(l, m) == FnValue(oracle(l, m)),
              [&] { return "convolution of " + f.str() + ", " + g.str() + ", " + h.str() + " at " + std::to_string(m); });
  }
  const Term phi_term[] = {{ArithFn::phi(), 1}};
  const auto counterexample = arith::composite(phi_term, 2);
  const std::uint64_t two[] = {2};
  const auto verdict = arith::class_membership(arith::composite(phi_term, 1), two, ev);
  s.check(ev(counterexample, 2) == FnValue(-1) && verdict.verdict == arith::Membership::not_in_c &&
              verdict.witness_divisor == 2 && verdict.witness_value == FnValue(-1),
          [&] { return "(phi*mu^2)(2) = " + ev(counterexample, 2).str(); });
  return s.take();
}

SuiteReport suite_smith(std::uint64_t seed) {
  Suite s("smith", seed);
  arith::Evaluator ev;
  const std::vector<ArithFn> fns = {ArithFn::identity(), ArithFn::phi(),    ArithFn::sigma(1),
                                    ArithFn::psi(1),     ArithFn::jordan(1), ArithFn::zeta()};
  std::vector<std::uint64_t> range;
  for (std::uint64_t n = 1; n <= 25; ++n) {
    range.push_back(n);
    for (const auto& f : fns) {
      const auto m = matrix::build_gcd_matrix(f, IndexSet(range), ev);
      const auto det = spectra::determinant_exact(m.exact());
      const auto smith = spectra::smith_determinant(f, n, ev);
      s.check(FnValue(det) == smith, [&] {
        return f.str() + " on {1.." + std::to_string(n) + "}: det " + format_exact(det) + " vs product " + smith.str();
      });
    }
  }
  return s.take();
}

SuiteReport suite_en_plus_diag(std::uint64_t seed) {
  Suite s("en-plus-diag", seed);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(s.uniform(1, 8));
    std::vector<mpq_class> a;
    for (std::size_t i = 0; i < n; ++i) a.push_back(s.rational(-12, 12, 5));
    matrix::Matrix<mpq_class> m(n, n, mpq_class(1));
    for (std::size_t i = 0; i < n; ++i) m(i, i) = a[i];
    const auto closed = spectra::det_en_plus_diag<mpq_class>(a);
    const auto elim = spectra::determinant_exact(m);
    const auto cof = naive::cofactor_det(m);
    s.check(closed == elim && elim == cof, [&] {
      std::string v;
      for (const auto& x : a) v += (v.empty() ? "" : ",") + format_exact(x);
      return "a=(" + v + "): closed " + format_exact(closed) + ", elimination " + format_exact(elim);
    });
  }
  return s.take();
}

// fs with every f_i in C_S, sum l > d.
struct SandwichInstance {
  std::vector<Term> fs;
  unsigned d;
};

SandwichInstance random_sandwich(Suite& s) {
  static const std::vector<ArithFn> pool = {ArithFn::identity(), ArithFn::phi(),   ArithFn::zeta(),
                                            ArithFn::xi(1),      ArithFn::sigma(1), ArithFn::psi(1),
                                            ArithFn::jordan(2),  ArithFn::sigma(0)};
  std::vector<ArithFn> shuffled = pool;
  std::shuffle(shuffled.begin(), shuffled.end(), s.rng());
  SandwichInstance inst;
  unsigned total = 0;
  const auto c = s.uniform(1, 2);
  for (std::uint64_t i = 0; i < c; ++i) {
    const auto l = static_cast<unsigned>(s.uniform(1, 2));
    inst.fs.push_back({shuffled[i], l});
    total += l;
  }
  inst.d = static_cast<unsigned>(s.uniform(0, total - 1));
  return inst;
}

std::string describe(const SandwichInstance& inst, const IndexSet& set) {
  return arith::composite(inst.fs, inst.d).str() + " on " + show_set(set);
}

SuiteReport suite_sandwich(std::uint64_t seed) {
  Suite s("sandwich", seed);
  arith::Evaluator ev;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_sandwich(s);
    const auto set = s.subset(40, static_cast<std::size_t>(s.uniform(1, 8)));
    const auto r = spectra::sandwich_bounds(inst.fs, inst.d, set, ev);
    s.check(r.observed.is_exact() && r.lower <= r.observed && r.observed <= r.upper && *r.positive_semidefinite, [&] {
      return describe(inst, set) + ": lower " + r.lower.str() + ", det " + r.observed.str() + ", upper " + r.upper.str();
    });
  }
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_sandwich(s);
    const auto set = s.subset(80, static_cast<std::size_t>(s.uniform(9, 40)));
    const auto r = spectra::sandwich_bounds(inst.fs, inst.d, set, ev);
    s.check(*r.positive_semidefinite, [&] {
      return describe(inst, set) + ": smallest eigenvalue " + format_double(*r.smallest_eigenvalue);
    });
  }
  return s.take();
}

SuiteReport suite_rank_one(std::uint64_t seed) {
  Suite s("rank-one", seed);
  auto show = [](const std::vector<FnValue>& r) {
    std::string v;
    for (const auto& x : r) v += (v.empty() ? "" : ",") + x.str();
    return "r=(" + v + ")";
  };
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = static_cast<std::size_t>(s.uniform(2, 30));
    std::vector<mpq_class> raw;
    for (std::size_t i = 0; i < n; ++i) raw.push_back(1 + abs(s.rational(0, 40, 4)));
    std::sort(raw.begin(), raw.end());
    if (trial >= 50) raw[1] = raw[0];  // equality branch
    std::vector<FnValue> r(raw.begin(), raw.end());
    const auto rep = spectra::rank_one_diag_bounds(r);
    s.check(rep.holds, [&] {
      return show(r) + ": " + rep.regime + " bounds (" + rep.lower.str() + ", " + rep.upper.str() + "), observed " +
             rep.observed.str();
    });
  }
  return s.take();
}

SuiteReport suite_kronecker(std::uint64_t seed) {
  Suite s("kronecker", seed);
  arith::Evaluator ev;
  auto agree = [&](const ArithFn& f, const IndexSet& x, const IndexSet& y) {
    const auto t = matrix::tensor_product_set(x, y);
    const auto sorted = matrix::build_gcd_matrix(f, t.set, ev);
    const auto k = matrix::kronecker(matrix::build_gcd_matrix(f, x, ev).entries(),
                                     matrix::build_gcd_matrix(f, y, ev).entries());
    return matrix::permute_to_product_order(sorted.entries(), t) == k;
  };
  const IndexSet x0({1, 2}), y0({3, 5});
  for (const auto& f : multiplicative_catalog())
    s.check(agree(f, x0, y0), [&] { return f.str() + " on X={1,2}, Y={3,5}"; });

  const auto catalog = multiplicative_catalog();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint64_t> chosen;
    std::vector<std::uint64_t> xs, ys;
    const auto nx = s.uniform(1, 4), ny = s.uniform(1, 4);
    while (xs.size() < nx || ys.size() < ny) {
      const auto v = s.uniform(1, 40);
      if (v != 1 && std::any_of(chosen.begin(), chosen.end(), [v](auto c) { return std::gcd(c, v) != 1; })) continue;
      if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
      chosen.push_back(v);
      (xs.size() < nx ? xs : ys).push_back(v);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const IndexSet x(xs), y(ys);
    for (const auto& f : catalog)
      s.check(agree(f, x, y), [&] { return f.str() + " on X=" + show_set(x) + ", Y=" + show_set(y); });
  }

  // A non-multiplicative f breaks the factorization at the product 2*5.
  const auto patched = ArithFn::patched(ArithFn::identity(), {{10, mpq_class(9)}});
  const auto t = matrix::tensor_product_set(x0, y0);
  const auto k = matrix::kronecker(matrix::build_gcd_matrix(patched, x0, ev).entries(),
                                   matrix::build_gcd_matrix(patched, y0, ev).entries());
  const auto m = matrix::permute_to_product_order(matrix::build_gcd_matrix(patched, t.set, ev).entries(), t);
  s.check(k(3, 3) == FnValue(10) && m(3, 3) == FnValue(9) && !(k == m),
          [&] { return "patched f(10)=9: kron entry " + k(3, 3).str() + ", matrix entry " + m(3, 3).str(); });
  return s.take();
}

SuiteReport suite_interlacing(std::uint64_t seed) {
  Suite s("interlacing", seed);
  arith::Evaluator ev;
  auto run = [&](const ArithFn& f, const IndexSet& set) {
    const auto dense = matrix::build_gcd_matrix(f, set, ev).approx();
    std::optional<spectra::Spectrum> prev;
    for (std::size_t n = 1; n <= set.size(); ++n) {
      auto cur = spectra::eigenvalues_symmetric(matrix::leading(dense, n));
      if (prev) {
        const auto r = spectra::interlacing_check(*prev, cur);
        s.check(r.ok, [&] {
          return f.str() + " on " + show_set(set.prefix(n)) + ": violation " + format_double(r.max_violation);
        });
      }
      prev = std::move(cur);
    }
  };
  std::vector<std::uint64_t> range(21);
  for (std::size_t i = 0; i < range.size(); ++i) range[i] = i + 1;
  run(ArithFn::phi(), IndexSet(range));
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_sandwich(s);
    run(arith::composite(inst.fs, inst.d), s.subset(60, static_cast<std::size_t>(s.uniform(2, 16))));
  }
  return s.take();
}

using SuiteFn = SuiteReport (*)(std::uint64_t);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"numtheory", suite_numtheory},   {"arith", suite_arith},       {"smith", suite_smith},
      {"en-plus-diag", suite_en_plus_diag}, {"sandwich", suite_sandwich}, {"rank-one", suite_rank_one},
      {"kronecker", suite_kronecker},   {"interlacing", suite_interlacing},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

std::vector<SuiteReport> run_suite(std::string_view name, std::uint64_t seed) {
  std::vector<SuiteReport> out;
  for (const auto& [n, fn] : registry())
    if (name == "all" || name == n) out.push_back(fn(seed));
  if (out.empty()) throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
  return out;
}

}  // namespace gcdeig::cli
