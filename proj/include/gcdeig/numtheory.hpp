#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gcdeig::numtheory {

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime-power decomposition of a positive integer. Primes are strictly
/// increasing and every exponent is at least one; n == 1 has no factors.
struct Factorization {
  std::uint64_t n = 1;
  std::vector<PrimePower> factors;

  std::uint64_t product() const;
  std::uint64_t divisor_count() const;
};

/// First primes of the progression 1, 1 + b, 1 + 2b, ...
struct ProgressionPrimes {
  std::uint64_t b = 1;
  std::vector<std::uint64_t> primes;
  // Every prime congruent to 1 mod b below this bound is listed.
  std::uint64_t search_bound = 0;
};

class SieveExhausted : public std::runtime_error {
 public:
  SieveExhausted(std::uint64_t bound, std::size_t found, std::size_t wanted);

  std::uint64_t bound() const { return bound_; }
  std::size_t found() const { return found_; }

 private:
  std::uint64_t bound_;
  std::size_t found_;
};

inline constexpr std::uint64_t kDefaultSieveCap = 1'000'000'000ULL;

Factorization factorize(std::uint64_t n);

std::vector<std::uint64_t> divisors(std::uint64_t n);
std::vector<std::uint64_t> divisors(const Factorization& f);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

// Deterministic for the full 64-bit range.
bool is_prime(std::uint64_t n);

/// Smallest primes p with p mod b == 1 (every prime when b == 1). The sieve
/// doubles its bound until `count` primes are found or `cap` is passed.
ProgressionPrimes primes_in_progression(std::uint64_t b, std::size_t count,
                                        std::uint64_t cap = kDefaultSieveCap);

// Primes below `limit` by a plain Eratosthenes sieve.
std::vector<std::uint64_t> primes_below(std::uint64_t limit);

}  // namespace gcdeig::numtheory
