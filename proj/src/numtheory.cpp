#include "gcdeig/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gcdeig::numtheory {

namespace {

constexpr std::uint64_t kTrialLimit = 1'000'000;

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (e > 0) {
    if (e & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    e >>= 1;
  }
  return result;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Immutable after first use; initialization of function-local statics is
// thread-safe.
const std::vector<std::uint64_t>& small_primes() {
  static const std::vector<std::uint64_t> table = primes_below(kTrialLimit + 1);
  return table;
}

// Brent's variant of Pollard rho. `n` is odd, composite and has no factor
// below the trial limit.
std::uint64_t pollard_rho(std::uint64_t n) {
  for (std::uint64_t c = 1;; ++c) {
    auto step = [&](std::uint64_t v) { return (mul_mod(v, v, n) + c) % n; };
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    constexpr std::uint64_t kBatch = 128;
    std::uint64_t r = 1;
    do {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = step(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(kBatch, r - k); ++i) {
          y = step(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += kBatch;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = step(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split_large(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  const std::uint64_t d = pollard_rho(n);
  split_large(d, out);
  split_large(n / d, out);
}

}  // namespace

std::uint64_t Factorization::product() const {
  std::uint64_t p = 1;
  for (const auto& [prime, e] : factors)
    for (unsigned i = 0; i < e; ++i) p *= prime;
  return p;
}

std::uint64_t Factorization::divisor_count() const {
  std::uint64_t c = 1;
  for (const auto& pp : factors) c *= pp.exponent + 1;
  return c;
}

SieveExhausted::SieveExhausted(std::uint64_t bound, std::size_t found,
                               std::size_t wanted)
    : std::runtime_error("sieve bound " + std::to_string(bound) +
                         " exhausted after " + std::to_string(found) + " of " +
                         std::to_string(wanted) + " progression primes"),
      bound_(bound),
      found_(found) {}

std::vector<std::uint64_t> primes_below(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit <= 2) return primes;
  std::vector<bool> composite(limit, false);
  for (std::uint64_t i = 2; i < limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j < limit; j += i) composite[j] = true;
  }
  return primes;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kBases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

Factorization factorize(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  Factorization result{n, {}};
  std::uint64_t rest = n;
  for (std::uint64_t p : small_primes()) {
    if (p * p > rest) break;
    if (rest % p != 0) continue;
    unsigned e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    result.factors.push_back({p, e});
  }
  if (rest == 1) return result;

  std::vector<std::uint64_t> large;
  split_large(rest, large);
  std::sort(large.begin(), large.end());
  for (std::size_t i = 0; i < large.size();) {
    std::size_t j = i;
    while (j < large.size() && large[j] == large[i]) ++j;
    result.factors.push_back({large[i], static_cast<unsigned>(j - i)});
    i = j;
  }
  return result;
}

std::vector<std::uint64_t> divisors(const Factorization& f) {
  std::vector<std::uint64_t> out{1};
  out.reserve(f.divisor_count());
  for (const auto& [p, e] : f.factors) {
    const std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("divisors: n must be positive");
  return divisors(factorize(n));
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) throw std::invalid_argument("gcd: arguments must be positive");
  return std::gcd(a, b);
}

ProgressionPrimes primes_in_progression(std::uint64_t b, std::size_t count,
                                        std::uint64_t cap) {
  if (b == 0) throw std::invalid_argument("primes_in_progression: b must be positive");
  if (count == 0) throw std::invalid_argument("primes_in_progression: count must be positive");
  auto matches = [b](std::uint64_t p) { return b == 1 || p % b == 1; };

  ProgressionPrimes result;
  result.b = b;
  std::uint64_t lo = 2;
  std::uint64_t hi = std::min<std::uint64_t>(std::max<std::uint64_t>(1024, 16 * b), cap + 1);
  std::vector<bool> composite;
  while (true) {
    // Range [lo, hi), sieved in fixed windows.
    const std::uint64_t root = isqrt(hi - 1);
    const std::vector<std::uint64_t> extra =
        root <= kTrialLimit ? std::vector<std::uint64_t>{} : primes_below(root + 1);
    const auto& sieving = root <= kTrialLimit ? small_primes() : extra;
    constexpr std::uint64_t kWindow = 1U << 20;
    for (std::uint64_t wlo = lo; wlo < hi; wlo += kWindow) {
      const std::uint64_t whi = std::min(hi, wlo + kWindow);
      composite.assign(whi - wlo, false);
      for (std::uint64_t p : sieving) {
        if (p * p >= whi) break;
        const std::uint64_t start = std::max(p * p, (wlo + p - 1) / p * p);
        for (std::uint64_t j = start; j < whi; j += p) composite[j - wlo] = true;
      }
      for (std::uint64_t v = wlo; v < whi; ++v) {
        if (composite[v - wlo] || !matches(v)) continue;
        result.primes.push_back(v);
        if (result.primes.size() == count) {
          result.search_bound = v;
          return result;
        }
      }
    }
    result.search_bound = hi - 1;
    if (hi > cap) throw SieveExhausted(cap, result.primes.size(), count);
    lo = hi;
    hi = std::min<std::uint64_t>(2 * hi, cap + 1);
  }
}

}  // namespace gcdeig::numtheory
