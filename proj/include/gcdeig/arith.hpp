#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gcdeig/value.hpp"

namespace gcdeig::arith {

enum class Atom {
  delta,     // unit of Dirichlet convolution
  zeta,      // constant 1
  identity,  // I(m) = m
  phi,       // Euler totient
  xi,        // m^e
  jordan,    // J_e = xi_e * mu
  sigma,     // sum of d^e over divisors
  psi,       // sum of d^e |mu(m/d)| over divisors
  patched,   // a base function with pointwise overrides; not multiplicative
  mobius,
};

class ArithFn;

struct Term;

/// Immutable symbolic arithmetical function: a catalog atom, or the
/// Dirichlet convolution of atoms with multiplicities. Convolutions are kept
/// in a canonical flattened form (delta factors dropped, equal atoms merged,
/// operands sorted with mu last), so structural equality is equality of the
/// printed form.
class ArithFn {
 public:
  enum class Kind { atom, convolution, power };

  static ArithFn delta();
  static ArithFn mobius();
  static ArithFn zeta();
  static ArithFn identity();
  static ArithFn phi();
  static ArithFn xi(double e);
  static ArithFn jordan(double e);
  static ArithFn sigma(double e);
  static ArithFn psi(double e);
  // Overrides are exact values at the listed arguments.
  static ArithFn patched(const ArithFn& base, std::map<std::uint64_t, mpq_class> overrides);

  Kind kind() const;
  // Only meaningful for atoms.
  Atom atom() const;
  double exponent() const;
  const ArithFn& patch_base() const;
  const std::map<std::uint64_t, mpq_class>& overrides() const;

  // Canonical operand list of a convolution or power; empty for atoms.
  std::span<const Term> terms() const;

  bool is_atom() const { return kind() == Kind::atom; }
  bool is_exact() const;
  bool is_multiplicative() const;
  // Product of the operands' values at 1.
  const FnValue& value_at_one() const;

  const std::string& str() const;

  friend bool operator==(const ArithFn& a, const ArithFn& b) { return a.str() == b.str(); }

 private:
  struct Node;
  explicit ArithFn(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static ArithFn make_atom(Atom a, double e);
  static ArithFn from_terms(std::vector<Term> terms);

  friend ArithFn convolve(const ArithFn& f, const ArithFn& g);
  friend ArithFn convolution_power(const ArithFn& f, unsigned c);

  std::shared_ptr<const Node> node_;
};

struct Term {
  ArithFn fn;
  unsigned multiplicity = 1;
};

ArithFn convolve(const ArithFn& f, const ArithFn& g);

// f^(0) is delta.
ArithFn convolution_power(const ArithFn& f, unsigned c);

/// f_1^(l_1) * ... * f_c^(l_c) * mu^(d). Requires a nonempty list with total
/// multiplicity at least one.
ArithFn composite(std::span<const Term> fs, unsigned d);

class EvaluationOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

struct EvalOptions {
  // Upper limit on numerator plus denominator bits of any exact value.
  std::size_t max_exact_bits = std::size_t{1} << 26;
};

/// Evaluates functions with a shared memo keyed by (canonical form, argument).
/// Safe for concurrent use; results do not depend on evaluation order.
class Evaluator {
 public:
  explicit Evaluator(EvalOptions options = {}) : options_(options) {}
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  FnValue operator()(const ArithFn& f, std::uint64_t m);

  std::size_t cache_size() const;

 private:
  template <class T>
  friend struct EvalImpl;

  struct KeyHash {
    std::size_t operator()(const std::pair<std::string, std::uint64_t>& k) const noexcept;
  };

  bool lookup(const std::string& key, std::uint64_t m, FnValue& out) const;
  void store(const std::string& key, std::uint64_t m, const FnValue& v);

  EvalOptions options_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::pair<std::string, std::uint64_t>, FnValue, KeyHash> cache_;
};

// One-shot evaluation with an invocation-local memo.
FnValue eval(const ArithFn& f, std::uint64_t m);

/// Value of f_1^(l_1) * ... * f_c^(l_c) * mu^(d) at a prime from the
/// closed form sum(l_i f_i(p)) - d, or 0 when some f_i(1) = 0, without
/// performing any convolution. Every f_i must be multiplicative.
FnValue value_at_prime(std::span<const Term> fs, unsigned d, std::uint64_t p,
                       Evaluator& ev);
FnValue value_at_prime(std::span<const Term> fs, unsigned d, std::uint64_t p);

enum class Membership {
  in_c_tilde,  // (f*mu)(d') > 0 on every divisor of every element
  in_c_only,   // all >= 0, some = 0
  not_in_c,    // some (f*mu)(d') < 0
};

std::string_view to_string(Membership m);

struct ClassVerdict {
  std::vector<std::uint64_t> set;
  Membership verdict = Membership::in_c_tilde;
  // For not_in_c: the most negative value; in_c_only: the smallest zero
  // divisor; in_c_tilde: the smallest value. Ties go to the smaller divisor.
  std::uint64_t witness_divisor = 1;
  FnValue witness_value;

  bool in_c() const { return verdict != Membership::not_in_c; }
};

ClassVerdict class_membership(const ArithFn& f, std::span<const std::uint64_t> set,
                              Evaluator& ev);
ClassVerdict class_membership(const ArithFn& f, std::span<const std::uint64_t> set);

class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Textual syntax:
///   atoms      delta mu zeta I phi xi{e} J{e} sigma{e} psi{e}
///   composite  conv(f^l, g^l, ..., mu^d)     (^l optional, defaults to 1)
///   overrides  patch(f, m:value, ...)
/// and a trailing ^c on any function for a convolution power.
ArithFn parse_function(std::string_view text);

}  // namespace gcdeig::arith
