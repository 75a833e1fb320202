#include "gcdeig/arith.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <tuple>

#include "gcdeig/numtheory.hpp"

namespace gcdeig::arith {

struct ArithFn::Node {
  Kind kind = Kind::atom;
  Atom atom = Atom::delta;
  double exponent = 0.0;
  std::vector<Term> terms;
  std::optional<ArithFn> base;
  std::map<std::uint64_t, mpq_class> overrides;
  bool exact = true;
  bool multiplicative = true;
  FnValue one{1};
  std::string text;
};

namespace {

bool integral(double e) { return std::isfinite(e) && std::floor(e) == e && std::fabs(e) < 9.0e15; }

std::string format_exponent(double e) {
  if (integral(e)) return std::to_string(static_cast<long long>(e));
  return format_double(e);
}

int rank(Atom a) {
  switch (a) {
    case Atom::delta: return 0;
    case Atom::zeta: return 1;
    case Atom::identity: return 2;
    case Atom::phi: return 3;
    case Atom::xi: return 4;
    case Atom::jordan: return 5;
    case Atom::sigma: return 6;
    case Atom::psi: return 7;
    case Atom::patched: return 8;
    case Atom::mobius: return 9;
  }
  return 10;
}

bool is_parametric(Atom a) {
  return a == Atom::xi || a == Atom::jordan || a == Atom::sigma || a == Atom::psi;
}

}  // namespace

ArithFn ArithFn::make_atom(Atom a, double e) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::atom;
  node->atom = a;
  if (is_parametric(a)) {
    if (!std::isfinite(e)) throw std::invalid_argument("exponent must be finite");
    node->exponent = integral(e) ? e + 0.0 : e;  // folds -0 into 0
    node->exact = integral(e);
  }
  switch (a) {
    case Atom::delta: node->text = "delta"; break;
    case Atom::mobius: node->text = "mu"; break;
    case Atom::zeta: node->text = "zeta"; break;
    case Atom::identity: node->text = "I"; break;
    case Atom::phi: node->text = "phi"; break;
    case Atom::xi: node->text = "xi{" + format_exponent(node->exponent) + "}"; break;
    case Atom::jordan: node->text = "J{" + format_exponent(node->exponent) + "}"; break;
    case Atom::sigma: node->text = "sigma{" + format_exponent(node->exponent) + "}"; break;
    case Atom::psi: node->text = "psi{" + format_exponent(node->exponent) + "}"; break;
    case Atom::patched: throw std::logic_error("use ArithFn::patched");
  }
  return ArithFn(std::move(node));
}

ArithFn ArithFn::delta() { return make_atom(Atom::delta, 0); }
ArithFn ArithFn::mobius() { return make_atom(Atom::mobius, 0); }
ArithFn ArithFn::zeta() { return make_atom(Atom::zeta, 0); }
ArithFn ArithFn::identity() { return make_atom(Atom::identity, 0); }
ArithFn ArithFn::phi() { return make_atom(Atom::phi, 0); }
ArithFn ArithFn::xi(double e) { return make_atom(Atom::xi, e); }
ArithFn ArithFn::jordan(double e) { return make_atom(Atom::jordan, e); }
ArithFn ArithFn::sigma(double e) { return make_atom(Atom::sigma, e); }
ArithFn ArithFn::psi(double e) { return make_atom(Atom::psi, e); }

ArithFn ArithFn::patched(const ArithFn& base, std::map<std::uint64_t, mpq_class> overrides) {
  if (overrides.empty()) return base;
  for (const auto& [m, v] : overrides)
    if (m == 0) throw std::invalid_argument("patch: arguments must be positive");
  auto node = std::make_shared<Node>();
  node->kind = Kind::atom;
  node->atom = Atom::patched;
  node->base = base;
  node->overrides = std::move(overrides);
  node->exact = base.is_exact();
  node->multiplicative = false;
  if (auto it = node->overrides.find(1); it != node->overrides.end())
    node->one = FnValue(it->second);
  else
    node->one = base.value_at_one();
  node->text = "patch(" + base.str();
  for (const auto& [m, v] : node->overrides) node->text += ", " + std::to_string(m) + ":" + format_exact(v);
  node->text += ")";
  return ArithFn(std::move(node));
}

ArithFn ArithFn::from_terms(std::vector<Term> input) {
  std::vector<Term> flat;
  for (auto& t : input) {
    if (t.multiplicity == 0) continue;
    if (t.fn.is_atom()) {
      if (t.fn.atom() == Atom::delta) continue;
      flat.push_back(t);
    } else {
      for (const auto& inner : t.fn.terms()) flat.push_back({inner.fn, inner.multiplicity * t.multiplicity});
    }
  }
  auto order = [](const Term& a, const Term& b) {
    return std::make_tuple(rank(a.fn.atom()), a.fn.exponent(), a.fn.str()) <
           std::make_tuple(rank(b.fn.atom()), b.fn.exponent(), b.fn.str());
  };
  std::stable_sort(flat.begin(), flat.end(), order);
  std::vector<Term> merged;
  for (auto& t : flat) {
    if (!merged.empty() && merged.back().fn == t.fn)
      merged.back().multiplicity += t.multiplicity;
    else
      merged.push_back(t);
  }
  if (merged.empty()) return delta();
  if (merged.size() == 1 && merged.front().multiplicity == 1) return merged.front().fn;

  auto node = std::make_shared<Node>();
  node->kind = merged.size() == 1 ? Kind::power : Kind::convolution;
  node->text = "conv(";
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const auto& t = merged[i];
    if (i) node->text += ", ";
    node->text += t.fn.str() + "^" + std::to_string(t.multiplicity);
    node->exact = node->exact && t.fn.is_exact();
    node->multiplicative = node->multiplicative && t.fn.is_multiplicative();
    for (unsigned k = 0; k < t.multiplicity; ++k) node->one *= t.fn.value_at_one();
  }
  node->text += ")";
  node->terms = std::move(merged);
  return ArithFn(std::move(node));
}

ArithFn::Kind ArithFn::kind() const { return node_->kind; }
Atom ArithFn::atom() const {
  // Composites sort between catalog atoms and mu; only atoms carry a real id.
  return node_->kind == Kind::atom ? node_->atom : Atom::patched;
}
double ArithFn::exponent() const { return node_->exponent; }
const ArithFn& ArithFn::patch_base() const {
  if (!node_->base) throw std::logic_error("not a patched function");
  return *node_->base;
}
const std::map<std::uint64_t, mpq_class>& ArithFn::overrides() const { return node_->overrides; }
std::span<const Term> ArithFn::terms() const { return node_->terms; }
bool ArithFn::is_exact() const { return node_->exact; }
bool ArithFn::is_multiplicative() const { return node_->multiplicative; }
const FnValue& ArithFn::value_at_one() const { return node_->one; }
const std::string& ArithFn::str() const { return node_->text; }

ArithFn convolve(const ArithFn& f, const ArithFn& g) {
  return ArithFn::from_terms({Term{f, 1}, Term{g, 1}});
}

ArithFn convolution_power(const ArithFn& f, unsigned c) {
  if (c == 0) return ArithFn::delta();
  return ArithFn::from_terms({Term{f, c}});
}

ArithFn composite(std::span<const Term> fs, unsigned d) {
  if (fs.empty()) throw std::invalid_argument("composite: operand list is empty");
  unsigned total = 0;
  for (const auto& t : fs) total += t.multiplicity;
  if (total == 0) throw std::invalid_argument("composite: total multiplicity must be positive");
  ArithFn result = ArithFn::delta();
  for (const auto& t : fs) result = convolve(result, convolution_power(t.fn, t.multiplicity));
  return convolve(result, convolution_power(ArithFn::mobius(), d));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <class T>
struct Num;

template <>
struct Num<mpq_class> {
  static constexpr const char* kTag = "";
  static mpq_class power(std::uint64_t p, double e, long long k) {
    const long long ex = k * static_cast<long long>(e);
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), p, static_cast<unsigned long>(ex < 0 ? -ex : ex));
    if (ex >= 0) return mpq_class(z);
    mpq_class q(1, z);
    q.canonicalize();
    return q;
  }
  static mpq_class from_exact(const mpq_class& q) { return q; }
  static mpq_class unwrap(const FnValue& v) { return *v.exact(); }
  static FnValue wrap(const mpq_class& q, std::size_t max_bits) {
    const std::size_t bits = mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
    if (bits > max_bits) throw EvaluationOverflow("exact value exceeds " + std::to_string(max_bits) + " bits");
    return FnValue(q);
  }
};

template <>
struct Num<double> {
  static constexpr const char* kTag = "~";
  static double power(std::uint64_t p, double e, long long k) {
    return std::pow(static_cast<double>(p), static_cast<double>(k) * e);
  }
  static double from_exact(const mpq_class& q) { return to_double(q); }
  static double unwrap(const FnValue& v) { return v.approx(); }
  static FnValue wrap(double d, std::size_t) { return FnValue::approximate(d); }
};

std::uint64_t ipow(std::uint64_t p, unsigned k) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < k; ++i) r *= p;
  return r;
}

}  // namespace

template <class T>
struct EvalImpl {
  using V = std::vector<T>;

  static std::string key(const ArithFn& f) { return std::string(Num<T>::kTag) + f.str(); }

  // Values of a multiplicative atom at p^0 .. p^k.
  static V atom_chain(const ArithFn& f, std::uint64_t p, unsigned k) {
    V v(k + 1, T(0));
    const double e = f.exponent();
    auto pw = [&](long long j) { return Num<T>::power(p, e, j); };
    v[0] = T(1);
    for (unsigned j = 1; j <= k; ++j) {
      switch (f.atom()) {
        case Atom::delta: v[j] = T(0); break;
        case Atom::mobius: v[j] = j == 1 ? T(-1) : T(0); break;
        case Atom::zeta: v[j] = T(1); break;
        case Atom::identity: v[j] = Num<T>::power(p, 1.0, j); break;
        case Atom::phi: v[j] = Num<T>::power(p, 1.0, j) - Num<T>::power(p, 1.0, j - 1); break;
        case Atom::xi: v[j] = pw(j); break;
        case Atom::jordan: v[j] = pw(j) - pw(j - 1); break;
        case Atom::sigma: v[j] = v[j - 1] + pw(j); break;
        case Atom::psi:
          if (e == 0.0) {
            // sum over d | p^j of d^0 |mu(p^j / d)|: only d = p^j, p^(j-1) count.
            v[j] = T(2);
          } else {
            // Accumulate (psi*mu)(p^l): p^e at l = 1, p^((l-2)e)(p^(2e) - 1) beyond.
            const T step = j == 1 ? pw(1) : T(pw(j - 2) * (pw(2) - T(1)));
            v[j] = v[j - 1] + step;
          }
          break;
        case Atom::patched: throw std::logic_error("patched atom in multiplicative path");
      }
    }
    return v;
  }

  static V chain_conv(const V& a, const V& b) {
    const std::size_t n = a.size();
    V r(n, T(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == T(0)) continue;
      for (std::size_t j = 0; i + j < n; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
  }

  static V chain_unit(std::size_t n) {
    V r(n, T(0));
    r[0] = T(1);
    return r;
  }

  static V chain_pow(V base, unsigned c) {
    V result = chain_unit(base.size());
    while (c > 0) {
      if (c & 1U) result = chain_conv(result, base);
      c >>= 1U;
      if (c) base = chain_conv(base, base);
    }
    return result;
  }

  static T prime_power(const ArithFn& f, std::uint64_t p, unsigned k, Evaluator& ev) {
    const std::string kf = key(f);
    FnValue hit;
    if (ev.lookup(kf, ipow(p, k), hit)) return Num<T>::unwrap(hit);

    V chain;
    if (f.is_atom()) {
      chain = atom_chain(f, p, k);
    } else {
      chain = chain_unit(k + 1);
      for (const auto& t : f.terms()) chain = chain_conv(chain, chain_pow(atom_chain(t.fn, p, k), t.multiplicity));
    }
    std::uint64_t pj = 1;
    for (unsigned j = 0; j <= k; ++j, pj *= p) ev.store(kf, pj, Num<T>::wrap(chain[j], ev.options_.max_exact_bits));
    return chain[k];
  }

  static V lattice_conv(const V& a, const V& b, const std::vector<std::uint64_t>& divs) {
    const std::uint64_t m = divs.back();
    V r(divs.size(), T(0));
    for (std::size_t i = 0; i < divs.size(); ++i) {
      if (a[i] == T(0)) continue;
      const std::uint64_t rest = m / divs[i];
      for (std::size_t j = 0; j < divs.size() && divs[j] <= rest; ++j) {
        if (rest % divs[j] != 0) continue;
        const auto idx = std::lower_bound(divs.begin(), divs.end(), divs[i] * divs[j]) - divs.begin();
        r[idx] += a[i] * b[j];
      }
    }
    return r;
  }

  static V lattice_pow(V base, unsigned c, const std::vector<std::uint64_t>& divs) {
    V result = chain_unit(divs.size());
    while (c > 0) {
      if (c & 1U) result = lattice_conv(result, base, divs);
      c >>= 1U;
      if (c) base = lattice_conv(base, base, divs);
    }
    return result;
  }

  static T value(const ArithFn& f, std::uint64_t m, Evaluator& ev) {
    if (m == 0) throw std::invalid_argument("arithmetical functions are defined on positive integers");
    const std::string kf = key(f);
    FnValue hit;
    if (ev.lookup(kf, m, hit)) return Num<T>::unwrap(hit);

    T result(1);
    if (f.is_multiplicative()) {
      for (const auto& [p, k] : numtheory::factorize(m).factors) result *= prime_power(f, p, k, ev);
      ev.store(kf, m, Num<T>::wrap(result, ev.options_.max_exact_bits));
      return result;
    }
    if (f.is_atom()) {
      const auto& ov = f.overrides();
      if (auto it = ov.find(m); it != ov.end())
        result = Num<T>::from_exact(it->second);
      else
        result = value(f.patch_base(), m, ev);
      ev.store(kf, m, Num<T>::wrap(result, ev.options_.max_exact_bits));
      return result;
    }

    // General divisor-sum convolution over the divisor lattice of m.
    const auto divs = numtheory::divisors(m);
    V acc = chain_unit(divs.size());
    for (const auto& t : f.terms()) {
      V vals(divs.size());
      for (std::size_t i = 0; i < divs.size(); ++i) vals[i] = value(t.fn, divs[i], ev);
      acc = lattice_conv(acc, lattice_pow(std::move(vals), t.multiplicity, divs), divs);
    }
    for (std::size_t i = 0; i < divs.size(); ++i) ev.store(kf, divs[i], Num<T>::wrap(acc[i], ev.options_.max_exact_bits));
    return acc.back();
  }
};

std::size_t Evaluator::KeyHash::operator()(const std::pair<std::string, std::uint64_t>& k) const noexcept {
  const std::size_t h = std::hash<std::string>{}(k.first);
  return h ^ (std::hash<std::uint64_t>{}(k.second) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

bool Evaluator::lookup(const std::string& key, std::uint64_t m, FnValue& out) const {
  std::shared_lock lock(mutex_);
  auto it = cache_.find({key, m});
  if (it == cache_.end()) return false;
  out = it->second;
  return true;
}

void Evaluator::store(const std::string& key, std::uint64_t m, const FnValue& v) {
  std::unique_lock lock(mutex_);
  cache_.emplace(std::make_pair(key, m), v);
}

std::size_t Evaluator::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

FnValue Evaluator::operator()(const ArithFn& f, std::uint64_t m) {
  if (f.is_exact()) return Num<mpq_class>::wrap(EvalImpl<mpq_class>::value(f, m, *this), options_.max_exact_bits);
  return FnValue::approximate(EvalImpl<double>::value(f, m, *this));
}

FnValue eval(const ArithFn& f, std::uint64_t m) {
  Evaluator ev;
  return ev(f, m);
}

// ---------------------------------------------------------------------------

FnValue value_at_prime(std::span<const Term> fs, unsigned d, std::uint64_t p, Evaluator& ev) {
  if (!numtheory::is_prime(p)) throw std::invalid_argument("value_at_prime: " + std::to_string(p) + " is not prime");
  if (fs.empty()) throw std::invalid_argument("value_at_prime: operand list is empty");
  for (const auto& t : fs) {
    if (!t.fn.is_multiplicative())
      throw std::invalid_argument("value_at_prime: closed form needs multiplicative operands, got " + t.fn.str());
  }
  for (const auto& t : fs) {
    if (ev(t.fn, 1).is_zero()) return FnValue(0);
  }
  FnValue total(0);
  for (const auto& t : fs) total += FnValue(static_cast<long>(t.multiplicity)) * ev(t.fn, p);
  return total - FnValue(static_cast<long>(d));
}

FnValue value_at_prime(std::span<const Term> fs, unsigned d, std::uint64_t p) {
  Evaluator ev;
  return value_at_prime(fs, d, p, ev);
}

std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::in_c_tilde: return "in_C_tilde";
    case Membership::in_c_only: return "in_C_only";
    case Membership::not_in_c: return "not_in_C";
  }
  return "?";
}

ClassVerdict class_membership(const ArithFn& f, std::span<const std::uint64_t> set, Evaluator& ev) {
  if (set.empty()) throw std::invalid_argument("class_membership: empty set");
  std::set<std::uint64_t> seen;
  std::set<std::uint64_t> divs;
  for (auto x : set) {
    if (x == 0) throw std::invalid_argument("class_membership: elements must be positive");
    if (!seen.insert(x).second) throw std::invalid_argument("class_membership: duplicate element " + std::to_string(x));
    for (auto d : numtheory::divisors(x)) divs.insert(d);
  }
  const ArithFn transform = convolve(f, ArithFn::mobius());

  ClassVerdict v;
  v.set.assign(set.begin(), set.end());
  std::optional<std::pair<std::uint64_t, FnValue>> most_negative, first_zero, smallest;
  for (auto d : divs) {
    FnValue val = ev(transform, d);
    const int s = val.sign();
    if (s < 0 && (!most_negative || val < most_negative->second)) most_negative.emplace(d, val);
    if (s == 0 && !first_zero) first_zero.emplace(d, val);
    if (!smallest || val < smallest->second) smallest.emplace(d, val);
  }
  const auto& pick = most_negative ? most_negative : first_zero ? first_zero : smallest;
  v.verdict = most_negative ? Membership::not_in_c : first_zero ? Membership::in_c_only : Membership::in_c_tilde;
  v.witness_divisor = pick->first;
  v.witness_value = pick->second;
  return v;
}

ClassVerdict class_membership(const ArithFn& f, std::span<const std::uint64_t> set) {
  Evaluator ev;
  return class_membership(f, set, ev);
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::invalid_argument("parse error at position " + std::to_string(position) + ": " + message),
      position_(position) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ArithFn parse() {
    ArithFn f = term();
    skip();
    if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
    return f;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(pos_, std::string("expected '") + c + "'");
  }

  std::string_view identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError(pos_, "expected a function name");
    return text_.substr(start, pos_ - start);
  }

  std::string_view token(std::string_view allowed) {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                   allowed.find(text_[pos_]) != std::string_view::npos))
      ++pos_;
    if (start == pos_) throw ParseError(pos_, "expected a number");
    return text_.substr(start, pos_ - start);
  }

  std::uint64_t unsigned_integer() {
    const std::size_t start = (skip(), pos_);
    const auto tok = token("");
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw ParseError(start, "integer out of range");
    return v;
  }

  double real() {
    const std::size_t start = (skip(), pos_);
    const auto tok = token("+-.eE");
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
      throw ParseError(start, "malformed exponent '" + std::string(tok) + "'");
    return v;
  }

  ArithFn term() {
    ArithFn f = function();
    if (accept('^')) {
      const std::size_t at = pos_;
      const std::uint64_t c = unsigned_integer();
      if (c > 1'000'000) throw ParseError(at, "multiplicity too large");
      f = convolution_power(f, static_cast<unsigned>(c));
    }
    return f;
  }

  ArithFn function() {
    const std::size_t start = (skip(), pos_);
    const std::string_view name = identifier();
    if (name == "conv") {
      expect('(');
      ArithFn acc = ArithFn::delta();
      do {
        acc = convolve(acc, term());
      } while (accept(','));
      expect(')');
      return acc;
    }
    if (name == "patch") {
      expect('(');
      ArithFn base = term();
      std::map<std::uint64_t, mpq_class> ov;
      while (accept(',')) {
        const std::size_t at = (skip(), pos_);
        const std::uint64_t m = unsigned_integer();
        if (m == 0) throw ParseError(at, "patch argument must be positive");
        expect(':');
        const std::size_t vat = (skip(), pos_);
        const auto tok = token("+-./eE");
        try {
          ov[m] = parse_exact(std::string(tok));
        } catch (const std::invalid_argument& e) {
          throw ParseError(vat, e.what());
        }
      }
      expect(')');
      return ArithFn::patched(base, std::move(ov));
    }
    if (name == "delta") return ArithFn::delta();
    if (name == "mu") return ArithFn::mobius();
    if (name == "zeta") return ArithFn::zeta();
    if (name == "I") return ArithFn::identity();
    if (name == "phi") return ArithFn::phi();
    ArithFn (*ctor)(double) = nullptr;
    if (name == "xi") ctor = &ArithFn::xi;
    if (name == "J") ctor = &ArithFn::jordan;
    if (name == "sigma") ctor = &ArithFn::sigma;
    if (name == "psi") ctor = &ArithFn::psi;
    if (!ctor) throw ParseError(start, "unknown function '" + std::string(name) + "'");
    expect('{');
    const double e = real();
    expect('}');
    return ctor(e);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ArithFn parse_function(std::string_view text) { return Parser(text).parse(); }

}  // namespace gcdeig::arith
