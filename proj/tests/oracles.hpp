#pragma once

// Reference implementations for tests. Each one follows the textbook
// definition directly and shares no code with the library.

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using Fn = std::function<mpq_class(std::uint64_t)>;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::uint64_t gcd_subtract(std::uint64_t a, std::uint64_t b) {
  while (a != b) {
    if (a > b)
      a -= b;
    else
      b -= a;
  }
  return a;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d <= n; ++d)
    if (n % d == 0) out.push_back(d);
  return out;
}

inline int mobius(std::uint64_t n) {
  int s = 1;
  for (std::uint64_t p = 2; p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    s = -s;
  }
  return s;
}

inline mpq_class ipow(std::uint64_t b, unsigned e) {
  mpz_class z = 1;
  for (unsigned i = 0; i < e; ++i) z *= b;
  return mpq_class(z);
}

// Counting definition: #{1 <= k <= n : gcd(k, n) = 1}.
inline mpq_class totient(std::uint64_t n) {
  long c = 0;
  for (std::uint64_t k = 1; k <= n; ++k) c += gcd_subtract(k, n) == 1;
  return c;
}

inline Fn power_fn(unsigned e) {
  return [e](std::uint64_t n) { return ipow(n, e); };
}

inline Fn divisor_power_sum(unsigned e) {
  return [e](std::uint64_t n) {
    mpq_class s = 0;
    for (auto d : divisors(n)) s += ipow(d, e);
    return s;
  };
}

inline Fn dedekind_psi(unsigned e) {
  return [e](std::uint64_t n) {
    mpq_class s = 0;
    for (auto d : divisors(n))
      if (mobius(n / d) != 0) s += ipow(d, e);
    return s;
  };
}

inline Fn jordan(unsigned e) {
  return [e](std::uint64_t n) {
    mpq_class s = 0;
    for (auto d : divisors(n)) s += ipow(d, e) * mobius(n / d);
    return s;
  };
}

inline mpq_class dirichlet(const Fn& f, const Fn& g, std::uint64_t n) {
  mpq_class s = 0;
  for (auto d : divisors(n)) s += f(d) * g(n / d);
  return s;
}

inline Fn conv(Fn f, Fn g) {
  return [f, g](std::uint64_t n) { return dirichlet(f, g, n); };
}

inline Fn mu_fn() {
  return [](std::uint64_t n) { return mpq_class(mobius(n)); };
}

inline Fn delta_fn() {
  return [](std::uint64_t n) { return mpq_class(n == 1 ? 1 : 0); };
}

inline Fn conv_power(const Fn& f, unsigned c) {
  Fn r = delta_fn();
  for (unsigned i = 0; i < c; ++i) r = conv(r, f);
  return r;
}

// Laplace expansion along the first row.
inline mpq_class cofactor_det(const std::vector<std::vector<mpq_class>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  mpq_class s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j] == 0) continue;
    std::vector<std::vector<mpq_class>> minor(n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) minor[r - 1].push_back(a[r][c]);
    const mpq_class t = a[0][j] * cofactor_det(minor);
    s += j % 2 ? mpq_class(-t) : t;
  }
  return s;
}

}  // namespace oracle
