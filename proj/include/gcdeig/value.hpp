#pragma once

#include <compare>
#include <optional>
#include <string>

#include <gmpxx.h>

namespace gcdeig {

/// Round-to-nearest conversion (mpq_get_d truncates).
double to_double(const mpq_class& q);

/// "p" or "p/q" in lowest terms.
std::string format_exact(const mpq_class& q);

/// Shortest decimal that round-trips through strtod.
std::string format_double(double v);

/// Parses "p", "-p", "p/q" or a finite decimal ("0.25", "1e-3") into an exact
/// rational. Throws std::invalid_argument on malformed input.
mpq_class parse_exact(const std::string& text);

/// A value carried on both paths: the exact rational when the computation
/// producing it was exact, and always a double. When both are present the
/// double is the correctly rounded exact value.
class FnValue {
 public:
  FnValue() : FnValue(mpq_class(0)) {}
  FnValue(const mpq_class& q);  // NOLINT(google-explicit-constructor)
  FnValue(long v) : FnValue(mpq_class(v)) {}  // NOLINT
  FnValue(int v) : FnValue(mpq_class(v)) {}   // NOLINT
  static FnValue approximate(double v);

  bool is_exact() const { return exact_.has_value(); }
  const std::optional<mpq_class>& exact() const { return exact_; }
  double approx() const { return approx_; }

  int sign() const;
  bool is_zero() const { return sign() == 0; }

  // Exact rational when present, shortest round-trip double otherwise.
  std::string str() const;

  FnValue& operator+=(const FnValue& o);
  FnValue& operator-=(const FnValue& o);
  FnValue& operator*=(const FnValue& o);
  FnValue& operator/=(const FnValue& o);
  FnValue operator-() const;

  friend FnValue operator+(FnValue a, const FnValue& b) { return a += b; }
  friend FnValue operator-(FnValue a, const FnValue& b) { return a -= b; }
  friend FnValue operator*(FnValue a, const FnValue& b) { return a *= b; }
  friend FnValue operator/(FnValue a, const FnValue& b) { return a /= b; }

  // Exact comparison when both sides are exact, double comparison otherwise.
  friend std::partial_ordering operator<=>(const FnValue& a, const FnValue& b);
  friend bool operator==(const FnValue& a, const FnValue& b) {
    return (a <=> b) == std::partial_ordering::equivalent;
  }

 private:
  std::optional<mpq_class> exact_;
  double approx_ = 0.0;
};

}  // namespace gcdeig
