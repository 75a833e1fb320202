#include "gcdeig/value.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <mpfr.h>

namespace gcdeig {

double to_double(const mpq_class& q) {
  mpfr_t tmp;
  mpfr_init2(tmp, 53);
  mpfr_set_q(tmp, q.get_mpq_t(), MPFR_RNDN);
  const double d = mpfr_get_d(tmp, MPFR_RNDN);
  mpfr_clear(tmp);
  return d;
}

std::string format_exact(const mpq_class& q) { return q.get_str(10); }

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, end);
}

mpq_class parse_exact(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  const auto slash = text.find('/');
  auto parse_int = [&](const std::string& s) {
    mpz_class z;
    std::size_t i = (s.size() > 1 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) throw std::invalid_argument("malformed number '" + text + "'");
    for (std::size_t k = i; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9') throw std::invalid_argument("malformed number '" + text + "'");
    if (z.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0)
      throw std::invalid_argument("malformed number '" + text + "'");
    return z;
  };
  if (slash != std::string::npos) {
    mpz_class num = parse_int(text.substr(0, slash));
    mpz_class den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }
  // Decimal: [sign] digits [. digits] [e [sign] digits]
  std::string mant = text;
  long exp10 = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    mant = text.substr(0, e);
    const std::string es = text.substr(e + 1);
    exp10 = parse_int(es).get_si();
  }
  std::string digits = mant;
  if (auto dot = mant.find('.'); dot != std::string::npos) {
    const std::string frac = mant.substr(dot + 1);
    digits = mant.substr(0, dot) + frac;
    exp10 -= static_cast<long>(frac.size());
    if (digits == "" || digits == "-" || digits == "+")
      throw std::invalid_argument("malformed number '" + text + "'");
  }
  mpq_class q(parse_int(digits));
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  if (exp10 >= 0)
    q *= scale;
  else
    q /= scale;
  q.canonicalize();
  return q;
}

FnValue::FnValue(const mpq_class& q) : exact_(q), approx_(to_double(q)) {}

FnValue FnValue::approximate(double v) {
  FnValue r;
  r.exact_.reset();
  r.approx_ = v;
  return r;
}

int FnValue::sign() const {
  if (exact_) return sgn(*exact_);
  return (approx_ > 0) - (approx_ < 0);
}

std::string FnValue::str() const { return exact_ ? format_exact(*exact_) : format_double(approx_); }

FnValue& FnValue::operator+=(const FnValue& o) {
  if (exact_ && o.exact_) {
    *exact_ += *o.exact_;
    approx_ = to_double(*exact_);
  } else {
    exact_.reset();
    approx_ += o.approx_;
  }
  return *this;
}

FnValue& FnValue::operator-=(const FnValue& o) {
  if (exact_ && o.exact_) {
    *exact_ -= *o.exact_;
    approx_ = to_double(*exact_);
  } else {
    exact_.reset();
    approx_ -= o.approx_;
  }
  return *this;
}

FnValue& FnValue::operator*=(const FnValue& o) {
  if (exact_ && o.exact_) {
    *exact_ *= *o.exact_;
    approx_ = to_double(*exact_);
  } else {
    exact_.reset();
    approx_ *= o.approx_;
  }
  return *this;
}

FnValue& FnValue::operator/=(const FnValue& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  if (exact_ && o.exact_) {
    *exact_ /= *o.exact_;
    approx_ = to_double(*exact_);
  } else {
    exact_.reset();
    approx_ /= o.approx_;
  }
  return *this;
}

FnValue FnValue::operator-() const {
  FnValue r = *this;
  if (r.exact_) *r.exact_ = -*r.exact_;
  r.approx_ = -r.approx_;
  return r;
}

std::partial_ordering operator<=>(const FnValue& a, const FnValue& b) {
  if (a.exact_ && b.exact_) {
    const int c = cmp(*a.exact_, *b.exact_);
    return c < 0 ? std::partial_ordering::less
                 : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
  }
  return a.approx_ <=> b.approx_;
}

}  // namespace gcdeig
