#include "gcdeig/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "gcdeig/errors.hpp"

namespace gcdeig::spectra {

namespace {

void check_hypotheses(std::span<const arith::Term> fs, unsigned d, const matrix::IndexSet& set,
                      arith::Evaluator& ev) {
  unsigned long total = 0;
  for (const auto& t : fs) total += t.multiplicity;
  if (total <= d)
    throw HypothesisError("sum of multiplicities " + std::to_string(total) + " must exceed the mu power " +
                          std::to_string(d));
  for (const auto& t : fs) {
    const auto verdict = arith::class_membership(t.fn, set.elements(), ev);
    if (!verdict.in_c())
      throw HypothesisError(t.fn.str() + " is not in C_S: (f*mu)(" + std::to_string(verdict.witness_divisor) +
                            ") = " + verdict.witness_value.str());
  }
}

std::string describe_function(std::span<const arith::Term> fs, unsigned d) {
  return arith::composite(fs, d).str();
}

}  // namespace

std::vector<ConvergenceReport> convergence_experiment(std::span<const arith::Term> fs, unsigned d,
                                                      const SequenceSpec& seq, std::span<const std::size_t> qs,
                                                      std::size_t n_max, const ExperimentOptions& opts) {
  if (qs.empty()) throw std::invalid_argument("convergence_experiment: no q given");
  for (auto q : qs) {
    if (q == 0) throw std::invalid_argument("convergence_experiment: q must be positive");
    if (q > n_max)
      throw std::invalid_argument("convergence_experiment: q = " + std::to_string(q) + " exceeds n_max = " +
                                  std::to_string(n_max));
  }
  const auto h = arith::composite(fs, d);
  arith::Evaluator ev;
  const auto set = generate(seq, n_max);
  if (!opts.exploratory) check_hypotheses(fs, d, set, ev);

  const auto full = matrix::build_gcd_matrix(h, set, ev);
  if (full.is_exact() && !matrix::is_symmetric(full.entries()))
    throw std::logic_error("gcd matrix is not symmetric");
  const auto dense = full.approx();

  std::vector<double> trace(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) trace[n] = trace[n - 1] + dense(n - 1, n - 1);

  // Each n is independent, so the result does not depend on the schedule.
  const std::size_t n_min = *std::min_element(qs.begin(), qs.end());
  std::vector<std::optional<Spectrum>> spectra(n_max + 1);
  std::vector<std::string> errors(n_max + 1);
  std::atomic<std::size_t> next{0};
  const std::size_t jobs = n_max - n_min + 1;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs;) {
      const std::size_t n = n_max - k;  // largest first for balance
      try {
        spectra[n] = eigenvalues_symmetric(matrix::leading(dense, n), opts.solver);
      } catch (const std::exception& e) {
        errors[n] = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(jobs)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::size_t violations = 0;
  double worst = 0.0;
  for (std::size_t n = n_min; n < n_max; ++n) {
    if (!spectra[n] || !spectra[n + 1]) continue;
    const auto r = interlacing_check(*spectra[n], *spectra[n + 1]);
    if (!r.ok) ++violations;
    worst = std::max(worst, r.max_violation);
  }

  std::optional<std::uint64_t> zero_prime;
  if (const auto* p = std::get_if<Progression>(&seq)) {
    try {
      for (auto prime : numtheory::primes_in_progression(p->b, opts.zero_probe_primes).primes)
        if (ev(h, prime).is_zero()) {
          zero_prime = prime;
          break;
        }
    } catch (const numtheory::SieveExhausted&) {
      // Probing is best effort; a short prime list just means no signal.
    }
  }
  std::size_t zero_rows = 0;
  for (std::size_t i = 0; i < n_max; ++i) {
    const auto row = full.entries().row(i);
    if (std::all_of(row.begin(), row.end(), [](const FnValue& v) { return v.is_exact() && v.is_zero(); }))
      ++zero_rows;
  }

  std::vector<ConvergenceReport> out;
  for (auto q : qs) {
    ConvergenceReport r;
    r.function = describe_function(fs, d);
    r.sequence = to_string(seq);
    r.q = q;
    r.n_max = n_max;
    r.exploratory = opts.exploratory;
    r.interlacing_violations = violations;
    r.max_interlacing_violation = worst;
    r.zero_prime = zero_prime;
    r.exact_zero_rows = zero_rows;

    const Spectrum* prev = nullptr;
    for (std::size_t n = q; n <= n_max; ++n) {
      SeriesPoint pt;
      pt.n = n;
      if (spectra[n]) {
        const auto& s = *spectra[n];
        const double v = s.eigenvalues[q - 1];
        pt.value = v;
        pt.residual = s.residual;
        if (v < -1e-8 * std::abs(trace[n])) r.nonnegative = false;
        if (prev) {
          const double tol = 1e-8 * std::max(prev->spectral_radius(), s.spectral_radius());
          if (v > prev->eigenvalues[q - 1] + tol) r.monotone_nonincreasing = false;
        }
        prev = &s;
      } else {
        pt.error = errors[n];
        ++r.gaps;
        prev = nullptr;
      }
      r.series.push_back(std::move(pt));
    }
    r.final_value = r.series.back().value;
    if (r.final_value) r.zero_confirmed = std::abs(*r.final_value) <= 1e-8 * std::abs(trace[n_max]);
    out.push_back(std::move(r));
  }
  return out;
}

ConvergenceReport convergence_experiment(std::span<const arith::Term> fs, unsigned d, const SequenceSpec& seq,
                                         std::size_t q, std::size_t n_max, const ExperimentOptions& opts) {
  const std::size_t qs[] = {q};
  return std::move(convergence_experiment(fs, d, seq, qs, n_max, opts).front());
}

DivergenceEvidence divergence_check(std::span<const arith::ArithFn> fs, const numtheory::ProgressionPrimes& primes,
                                    double c) {
  if (fs.empty()) throw std::invalid_argument("divergence_check: no functions given");
  if (primes.primes.empty()) throw std::invalid_argument("divergence_check: no primes given");
  arith::Evaluator ev;
  DivergenceEvidence out;
  out.b = primes.b;
  out.primes = primes.primes;
  out.c = c;
  for (std::size_t j = 0; j < fs.size(); ++j) out.function += (j ? " + " : "") + fs[j].str();

  const std::size_t n = primes.primes.size();
  std::vector<double> sums(n), ratio(n);
  long double running = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = primes.primes[i];
    FnValue s(0);
    double r = -std::numeric_limits<double>::infinity();
    for (const auto& f : fs) {
      const auto v = ev(f, p);
      s += v;
      r = std::max(r, v.approx() / static_cast<double>(p));
    }
    sums[i] = s.approx();
    ratio[i] = r;
    if (s.is_zero()) {
      if (!out.zero_at_prime) out.zero_at_prime = p;
    } else {
      running += 1.0L / static_cast<long double>(s.approx());
    }
    out.partial_sums.push_back(static_cast<double>(running));
  }

  out.best_c = *std::max_element(ratio.begin(), ratio.end());
  out.linear_bound_holds = out.best_c <= c;

  for (std::size_t begin = 0, width = 1; begin < n; begin += width, width *= 2) {
    DoublingWindow w;
    w.begin = begin;
    w.end = std::min(n, begin + width);
    w.increment = out.partial_sums[w.end - 1] - (begin ? out.partial_sums[begin - 1] : 0.0);
    w.max_ratio = *std::max_element(ratio.begin() + static_cast<std::ptrdiff_t>(w.begin),
                                    ratio.begin() + static_cast<std::ptrdiff_t>(w.end));
    out.windows.push_back(w);
  }
  out.strictly_increasing = !out.zero_at_prime && std::all_of(out.windows.begin(), out.windows.end(),
                                                              [](const DoublingWindow& w) { return w.increment > 0; });

  const std::size_t tail = n / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  bool positive = true;
  for (std::size_t i = tail; i < n; ++i) {
    if (sums[i] <= 0) {
      positive = false;
      break;
    }
    const double x = std::log(static_cast<double>(primes.primes[i]));
    const double y = std::log(sums[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++m;
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  out.growth_exponent = positive && m >= 2 && denom > 0 ? (static_cast<double>(m) * sxy - sx * sy) / denom
                                                        : std::numeric_limits<double>::quiet_NaN();
  bool rising = out.windows.size() >= 2;
  for (std::size_t i = 1; i < out.windows.size() && rising; ++i)
    rising = out.windows[i].max_ratio > out.windows[i - 1].max_ratio;
  out.superlinear = rising && out.growth_exponent > 1.05;
  return out;
}

DivergenceEvidence divergence_check(const arith::ArithFn& f, const numtheory::ProgressionPrimes& primes, double c) {
  return divergence_check(std::span<const arith::ArithFn>(&f, 1), primes, c);
}

}  // namespace gcdeig::spectra
