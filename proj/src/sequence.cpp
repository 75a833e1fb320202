#include "gcdeig/sequence.hpp"

#include <charconv>
#include <limits>
#include <stdexcept>

#include "gcdeig/numtheory.hpp"

namespace gcdeig::spectra {

namespace {

constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end)
    throw std::invalid_argument("sequence: bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t checked_term(std::uint64_t a, std::uint64_t b, std::uint64_t k) {
  if (b != 0 && k > (kUnbounded - a) / b) throw std::overflow_error("sequence term overflows 64 bits");
  return a + b * k;
}

}  // namespace

SequenceSpec parse_sequence(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("sequence: expected kind:args, got '" + std::string(text) + "'");
  const auto kind = text.substr(0, colon);
  const auto args = text.substr(colon + 1);

  if (kind == "range") {
    const auto dots = args.find("..");
    if (dots == std::string_view::npos) throw std::invalid_argument("sequence: range needs lo..hi");
    const auto lo = parse_u64(args.substr(0, dots), "range start");
    const auto hi = parse_u64(args.substr(dots + 2), "range end");
    if (lo == 0 || hi < lo) throw std::invalid_argument("sequence: range needs 1 <= lo <= hi");
    return Progression{lo, 1, 0, hi - lo + 1, true};
  }
  const auto parts = split(args, ',');
  if (kind == "ap") {
    if (parts.size() != 3 && parts.size() != 4) throw std::invalid_argument("sequence: ap needs a,b,e[,n]");
    Progression p{parse_u64(parts[0], "a"), parse_u64(parts[1], "b"), parse_u64(parts[2], "e"),
                  parts.size() == 4 ? parse_u64(parts[3], "n") : 0, false};
    if (p.a == 0 || p.b == 0) throw std::invalid_argument("sequence: ap needs a, b >= 1");
    return p;
  }
  if (kind == "list") {
    ExplicitList l;
    for (auto part : parts) l.elements.push_back(parse_u64(part, "list element"));
    matrix::IndexSet check(l.elements);
    return l;
  }
  if (kind == "primes") {
    if (parts.size() != 1 && parts.size() != 2) throw std::invalid_argument("sequence: primes needs b[,count]");
    PrimesOneModB p{parse_u64(parts[0], "b"), parts.size() == 2 ? parse_u64(parts[1], "count") : 0};
    if (p.b == 0) throw std::invalid_argument("sequence: primes needs b >= 1");
    return p;
  }
  if (kind == "cgcd") {
    if (parts.size() != 2 && parts.size() != 3 && parts.size() != 4)
      throw std::invalid_argument("sequence: cgcd needs x,b[,base][,count]");
    ConstantGcd c{parse_u64(parts[0], "x"), parse_u64(parts[1], "b"), false, 0};
    for (std::size_t i = 2; i < parts.size(); ++i) {
      if (parts[i] == "base")
        c.include_base = true;
      else
        c.count = parse_u64(parts[i], "count");
    }
    if (c.x == 0 || c.b == 0) throw std::invalid_argument("sequence: cgcd needs x, b >= 1");
    return c;
  }
  throw std::invalid_argument("sequence: unknown kind '" + std::string(kind) + "'");
}

std::string to_string(const SequenceSpec& s) {
  struct Printer {
    std::string operator()(const Progression& p) const {
      if (p.from_range) return "range:" + std::to_string(p.a) + ".." + std::to_string(p.a + p.n - 1);
      std::string out = "ap:" + std::to_string(p.a) + "," + std::to_string(p.b) + "," + std::to_string(p.e);
      if (p.n) out += "," + std::to_string(p.n);
      return out;
    }
    std::string operator()(const ExplicitList& l) const {
      std::string out = "list:";
      for (std::size_t i = 0; i < l.elements.size(); ++i) out += (i ? "," : "") + std::to_string(l.elements[i]);
      return out;
    }
    std::string operator()(const PrimesOneModB& p) const {
      return "primes:" + std::to_string(p.b) + (p.count ? "," + std::to_string(p.count) : "");
    }
    std::string operator()(const ConstantGcd& c) const {
      std::string out = "cgcd:" + std::to_string(c.x) + "," + std::to_string(c.b);
      if (c.include_base) out += ",base";
      if (c.count) out += "," + std::to_string(c.count);
      return out;
    }
  };
  return std::visit(Printer{}, s);
}

std::uint64_t max_length(const SequenceSpec& s) {
  struct Len {
    std::uint64_t operator()(const Progression& p) const { return p.n ? p.n : kUnbounded; }
    std::uint64_t operator()(const ExplicitList& l) const { return l.elements.size(); }
    std::uint64_t operator()(const PrimesOneModB& p) const { return p.count ? p.count : kUnbounded; }
    std::uint64_t operator()(const ConstantGcd& c) const { return c.count ? c.count : kUnbounded; }
  };
  return std::visit(Len{}, s);
}

matrix::IndexSet generate(const SequenceSpec& s, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sequence: length must be positive");
  if (n > max_length(s))
    throw std::invalid_argument("sequence " + to_string(s) + " has only " + std::to_string(max_length(s)) +
                                " terms, " + std::to_string(n) + " requested");
  struct Gen {
    std::size_t n;
    std::vector<std::uint64_t> operator()(const Progression& p) const {
      std::vector<std::uint64_t> out;
      out.reserve(n);
      for (std::size_t i = 0; i < n; ++i) out.push_back(checked_term(p.a, p.b, p.e + i));
      return out;
    }
    std::vector<std::uint64_t> operator()(const ExplicitList& l) const {
      return {l.elements.begin(), l.elements.begin() + static_cast<std::ptrdiff_t>(n)};
    }
    std::vector<std::uint64_t> operator()(const PrimesOneModB& p) const {
      return numtheory::primes_in_progression(p.b, n).primes;
    }
    std::vector<std::uint64_t> operator()(const ConstantGcd& c) const {
      std::vector<std::uint64_t> out;
      out.reserve(n);
      if (c.include_base) out.push_back(c.x);
      if (out.size() < n) {
        for (auto p : numtheory::primes_in_progression(c.b, n - out.size()).primes) {
          if (p > kUnbounded / c.x) throw std::overflow_error("sequence term overflows 64 bits");
          out.push_back(c.x * p);
        }
      }
      return out;
    }
  };
  return matrix::IndexSet(std::visit(Gen{n}, s));
}

matrix::IndexSet generate(const SequenceSpec& s) {
  const auto len = max_length(s);
  if (len == kUnbounded) throw std::invalid_argument("sequence " + to_string(s) + " is unbounded; give a length");
  return generate(s, static_cast<std::size_t>(len));
}

}  // namespace gcdeig::spectra
