#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gcdeig/matrix.hpp"

namespace gcdeig::spectra {

/// x_i = a + b (e + i - 1), i = 1..n.  `range:lo..hi` is a = lo, b = 1, e = 0.
struct Progression {
  std::uint64_t a = 1;
  std::uint64_t b = 1;
  std::uint64_t e = 0;
  std::uint64_t n = 0;  // 0: unbounded, length supplied by the caller
  bool from_range = false;
};

struct ExplicitList {
  std::vector<std::uint64_t> elements;
};

/// p_1(b) < p_2(b) < ...
struct PrimesOneModB {
  std::uint64_t b = 1;
  std::uint64_t count = 0;  // 0: unbounded
};

/// x * p_i(b); every pairwise gcd is x since gcd(xp, xp') = x gcd(p, p').
/// With `include_base` the sequence starts with x itself.
struct ConstantGcd {
  std::uint64_t x = 1;
  std::uint64_t b = 1;
  bool include_base = false;
  std::uint64_t count = 0;  // 0: unbounded
};

using SequenceSpec = std::variant<Progression, ExplicitList, PrimesOneModB, ConstantGcd>;

/// Text forms:
///   range:lo..hi   ap:a,b,e[,n]   list:x1,x2,...   primes:b[,count]   cgcd:x,b[,base][,count]
/// Throws std::invalid_argument on malformed input.
SequenceSpec parse_sequence(std::string_view text);
std::string to_string(const SequenceSpec& s);

// Largest n the sequence can produce; UINT64_MAX when unbounded.
std::uint64_t max_length(const SequenceSpec& s);

/// The first n terms. Throws std::invalid_argument if n exceeds max_length.
matrix::IndexSet generate(const SequenceSpec& s, std::size_t n);
// All terms of a bounded sequence.
matrix::IndexSet generate(const SequenceSpec& s);

}  // namespace gcdeig::spectra
