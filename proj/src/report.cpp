#include "gcdeig/report.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

namespace gcdeig::spectra {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

template <class T>
std::string num(const std::optional<T>& v) {
  return v ? num(*v) : "";
}

ordered_json value_json(const FnValue& v) {
  ordered_json j;
  j["exact"] = v.is_exact() ? format_exact(*v.exact()) : "";
  j["approx"] = num(v.approx());
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_json(const BoundReport& r) {
  ordered_json j;
  j["source"] = std::string(to_string(r.source));
  j["regime"] = r.regime;
  j["lower"] = value_json(r.lower);
  j["observed"] = value_json(r.observed);
  j["upper"] = value_json(r.upper);
  j["lower_strict"] = r.lower_strict;
  j["upper_strict"] = r.upper_strict;
  j["holds"] = r.holds;
  j["solver_residual"] = num(r.solver_residual);
  j["required_margin"] = num(r.required_margin);
  if (r.smallest_eigenvalue) j["smallest_eigenvalue"] = num(*r.smallest_eigenvalue);
  if (r.positive_semidefinite) j["positive_semidefinite"] = *r.positive_semidefinite;
  return j.dump(2);
}

std::string to_json(const ConvergenceReport& r) {
  ordered_json j;
  j["function"] = r.function;
  j["sequence"] = r.sequence;
  j["q"] = std::to_string(r.q);
  j["n_max"] = std::to_string(r.n_max);
  j["exploratory"] = r.exploratory;
  j["monotone_nonincreasing"] = r.monotone_nonincreasing;
  j["nonnegative"] = r.nonnegative;
  j["final_value"] = num(r.final_value);
  j["interlacing_violations"] = std::to_string(r.interlacing_violations);
  j["max_interlacing_violation"] = num(r.max_interlacing_violation);
  j["gaps"] = std::to_string(r.gaps);
  j["zero_prime"] = r.zero_prime ? std::to_string(*r.zero_prime) : "";
  j["zero_confirmed"] = r.zero_confirmed;
  j["exact_zero_rows"] = std::to_string(r.exact_zero_rows);
  auto series = ordered_json::array();
  for (const auto& p : r.series) {
    ordered_json e;
    e["n"] = std::to_string(p.n);
    e["value"] = num(p.value);
    e["residual"] = num(p.residual);
    if (!p.error.empty()) e["error"] = p.error;
    series.push_back(std::move(e));
  }
  j["series"] = std::move(series);
  return j.dump(2);
}

std::string to_json(const Spectrum& s) {
  ordered_json j;
  auto ev = ordered_json::array();
  for (double v : s.eigenvalues) ev.push_back(num(v));
  j["eigenvalues"] = std::move(ev);
  j["residual"] = num(s.residual);
  j["sweeps"] = std::to_string(s.sweeps);
  return j.dump(2);
}

std::string to_json(const DivergenceEvidence& e) {
  ordered_json j;
  j["function"] = e.function;
  j["b"] = std::to_string(e.b);
  j["prime_count"] = std::to_string(e.primes.size());
  j["label"] = e.label;
  j["strictly_increasing"] = e.strictly_increasing;
  j["best_c"] = num(e.best_c);
  j["c"] = num(e.c);
  j["linear_bound_holds"] = e.linear_bound_holds;
  j["growth_exponent"] = num(e.growth_exponent);
  j["superlinear"] = e.superlinear;
  j["zero_at_prime"] = e.zero_at_prime ? std::to_string(*e.zero_at_prime) : "";
  j["final_partial_sum"] = num(e.partial_sums.back());
  auto windows = ordered_json::array();
  for (const auto& w : e.windows) {
    ordered_json o;
    o["begin"] = std::to_string(w.begin);
    o["end"] = std::to_string(w.end);
    o["increment"] = num(w.increment);
    o["max_ratio"] = num(w.max_ratio);
    windows.push_back(std::move(o));
  }
  j["windows"] = std::move(windows);
  return j.dump(2);
}

void write_csv(std::ostream& os, const ConvergenceReport& r) {
  os << "n,value,residual,error\n";
  for (const auto& p : r.series)
    os << p.n << ',' << num(p.value) << ',' << num(p.residual) << ',' << csv_field(p.error) << '\n';
}

void write_csv(std::ostream& os, const BoundReport& r) {
  os << "key,value\n";
  os << "source," << to_string(r.source) << '\n';
  os << "regime," << csv_field(r.regime) << '\n';
  os << "lower," << r.lower.str() << '\n';
  os << "observed," << r.observed.str() << '\n';
  os << "upper," << r.upper.str() << '\n';
  os << "holds," << (r.holds ? "true" : "false") << '\n';
  if (r.smallest_eigenvalue) os << "smallest_eigenvalue," << num(*r.smallest_eigenvalue) << '\n';
  if (r.positive_semidefinite) os << "positive_semidefinite," << (*r.positive_semidefinite ? "true" : "false") << '\n';
}

void write_csv(std::ostream& os, const DivergenceEvidence& e) {
  os << "i,p,partial_sum\n";
  for (std::size_t i = 0; i < e.primes.size(); ++i)
    os << i + 1 << ',' << e.primes[i] << ',' << num(e.partial_sums[i]) << '\n';
}

}  // namespace gcdeig::spectra
