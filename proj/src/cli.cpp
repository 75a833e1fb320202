#include "gcdeig/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcdeig/errors.hpp"
#include "gcdeig/experiment.hpp"
#include "gcdeig/matrix.hpp"
#include "gcdeig/report.hpp"
#include "gcdeig/sequence.hpp"
#include "gcdeig/spectra.hpp"
#include "gcdeig/verify.hpp"

namespace gcdeig::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* const kConfigKeys[] = {"function", "sequence", "q",    "n_max",   "tol",  "out",
                                   "format",   "seed",     "exploratory", "threads", "divergence_primes"};

struct Globals {
  double tol = 1e-12;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;  // empty: human-readable summary on stdout
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::filesystem::path prepare_out(const std::string& dir) {
  std::filesystem::create_directories(dir);
  return dir;
}

std::string yes(bool b) { return b ? "true" : "false"; }

// Writes `name`.json / `name`.csv into --out, or the chosen format to stdout.
// Returns false when nothing was emitted (the caller prints a summary).
template <class Report>
bool emit(const Globals& g, const std::string& name, const Report& r, std::ostream& out) {
  if (!g.out.empty()) {
    const auto dir = prepare_out(g.out);
    if (g.format.empty() || g.format == "json") write_file(dir / (name + ".json"), spectra::to_json(r) + "\n");
    if (g.format.empty() || g.format == "csv") {
      std::ostringstream os;
      spectra::write_csv(os, r);
      write_file(dir / (name + ".csv"), os.str());
    }
    return false;
  }
  if (g.format == "json") {
    out << spectra::to_json(r) << '\n';
    return true;
  }
  if (g.format == "csv") {
    spectra::write_csv(out, r);
    return true;
  }
  return false;
}

void print_bounds(const spectra::BoundReport& r, std::ostream& out) {
  out << "source: " << spectra::to_string(r.source) << '\n'
      << "regime: " << r.regime << '\n'
      << "lower: " << r.lower.str() << '\n'
      << "observed: " << r.observed.str() << '\n'
      << "upper: " << r.upper.str() << '\n';
  if (r.positive_semidefinite)
    out << "psd: " << yes(*r.positive_semidefinite) << " (smallest eigenvalue "
        << format_double(*r.smallest_eigenvalue) << ")\n";
  out << "holds: " << yes(r.holds) << '\n';
}

int finish_bounds(const Globals& g, const std::string& name, const spectra::BoundReport& r, std::ostream& out) {
  if (!emit(g, name, r, out)) print_bounds(r, out);
  return r.holds ? kOk : kVerificationFailure;
}

matrix::IndexSet bounded_set(const std::string& text) { return spectra::generate(spectra::parse_sequence(text)); }

spectra::SolverOptions solver(const Globals& g) {
  spectra::SolverOptions o;
  o.tol = g.tol;
  return o;
}

std::optional<std::uint64_t> progression_modulus(const spectra::SequenceSpec& s) {
  if (const auto* p = std::get_if<spectra::Progression>(&s)) return p->b;
  if (const auto* p = std::get_if<spectra::PrimesOneModB>(&s)) return p->b;
  return std::nullopt;
}

int run_converge(ExperimentConfig cfg, const std::string& save_config, std::ostream& out) {
  if (cfg.function.empty()) throw std::invalid_argument("converge: no function given");
  if (cfg.sequence.empty()) throw std::invalid_argument("converge: no sequence given");
  if (cfg.format != "json" && cfg.format != "csv") throw std::invalid_argument("converge: format must be json or csv");
  const auto f = arith::parse_function(cfg.function);
  const auto seq = spectra::parse_sequence(cfg.sequence);
  if (cfg.n_max == 0) {
    const auto len = spectra::max_length(seq);
    if (len == std::numeric_limits<std::uint64_t>::max())
      throw std::invalid_argument("converge: unbounded sequence needs n_max");
    cfg.n_max = len;
  }
  if (cfg.q == 0 || cfg.q > cfg.n_max)
    throw std::invalid_argument("converge: q = " + std::to_string(cfg.q) + " must lie in 1..n_max = " +
                                std::to_string(cfg.n_max));
  const auto parts = decompose(f);
  unsigned long total = 0;
  for (const auto& t : parts.fs) total += t.multiplicity;
  if (!cfg.exploratory && total <= parts.d)
    throw HypothesisError("sum of multiplicities " + std::to_string(total) + " must exceed the mu power " +
                          std::to_string(parts.d));

  spectra::ExperimentOptions opts;
  opts.solver.tol = cfg.tol;
  opts.exploratory = cfg.exploratory;
  opts.threads = static_cast<unsigned>(std::max<std::uint64_t>(1, cfg.threads));
  const auto report = spectra::convergence_experiment(parts.fs, parts.d, seq, cfg.q, cfg.n_max, opts);

  std::optional<spectra::DivergenceEvidence> divergence;
  if (const auto b = progression_modulus(seq)) {
    const auto count = cfg.divergence_primes ? cfg.divergence_primes : cfg.n_max;
    std::vector<arith::ArithFn> operands;
    for (const auto& t : parts.fs) operands.push_back(t.fn);
    divergence = spectra::divergence_check(operands, numtheory::primes_in_progression(*b, count));
  }

  ordered_json doc;
  doc["config"] = ordered_json::parse(to_json(cfg));
  doc["convergence"] = ordered_json::parse(spectra::to_json(report));
  if (divergence) doc["divergence"] = ordered_json::parse(spectra::to_json(*divergence));

  if (!save_config.empty()) write_file(save_config, to_json(cfg) + "\n");
  if (!cfg.out.empty()) {
    const auto dir = prepare_out(cfg.out);
    write_file(dir / "config.json", to_json(cfg) + "\n");
    write_file(dir / "convergence.json", doc.dump(2) + "\n");
    std::ostringstream csv;
    spectra::write_csv(csv, report);
    write_file(dir / "convergence.csv", csv.str());
    if (divergence) {
      std::ostringstream dcsv;
      spectra::write_csv(dcsv, *divergence);
      write_file(dir / "divergence.csv", dcsv.str());
    }
  }

  const bool ok = report.monotone_nonincreasing && report.nonnegative && report.interlacing_violations == 0 &&
                  report.gaps == 0;
  out << "q=" << report.q << " n=" << report.q << ".." << report.n_max
      << " final=" << (report.final_value ? format_double(*report.final_value) : "none")
      << " monotone=" << yes(report.monotone_nonincreasing) << " nonnegative=" << yes(report.nonnegative)
      << " interlacing_violations=" << report.interlacing_violations << " gaps=" << report.gaps;
  if (report.zero_prime) out << " zero_prime=" << *report.zero_prime << " zero_confirmed=" << yes(report.zero_confirmed);
  if (divergence)
    out << " divergence_increasing=" << yes(divergence->strictly_increasing)
        << " best_c=" << format_double(divergence->best_c);
  out << '\n';
  if (cfg.out.empty()) out << doc.dump(2) << '\n';
  return ok || cfg.exploratory ? kOk : kVerificationFailure;
}

}  // namespace

std::string to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["function"] = c.function;
  j["sequence"] = c.sequence;
  j["q"] = c.q;
  j["n_max"] = c.n_max;
  j["tol"] = format_double(c.tol);
  j["out"] = c.out;
  j["format"] = c.format;
  j["seed"] = c.seed;
  j["exploratory"] = c.exploratory;
  j["threads"] = c.threads;
  j["divergence_primes"] = c.divergence_primes;
  return j.dump(2);
}

ExperimentConfig config_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) == std::end(kConfigKeys))
      throw std::invalid_argument("config: unknown key '" + key + "'");

  ExperimentConfig c;
  auto get_string = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) throw std::invalid_argument(std::string("config: '") + key + "' must be a string");
    dst = j[key].get<std::string>();
  };
  auto get_uint = [&](const char* key, std::uint64_t& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_unsigned())
      throw std::invalid_argument(std::string("config: '") + key + "' must be a nonnegative integer");
    dst = j[key].get<std::uint64_t>();
  };
  get_string("function", c.function);
  get_string("sequence", c.sequence);
  get_uint("q", c.q);
  get_uint("n_max", c.n_max);
  if (j.contains("tol")) {
    const auto& t = j["tol"];
    if (t.is_string()) {
      try {
        std::size_t used = 0;
        c.tol = std::stod(t.get<std::string>(), &used);
        if (used != t.get<std::string>().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::invalid_argument("config: 'tol' is not a number");
      }
    } else if (t.is_number()) {
      c.tol = t.get<double>();
    } else {
      throw std::invalid_argument("config: 'tol' must be a number");
    }
    if (!(c.tol > 0)) throw std::invalid_argument("config: 'tol' must be positive");
  }
  get_string("out", c.out);
  get_string("format", c.format);
  get_uint("seed", c.seed);
  if (j.contains("exploratory")) {
    if (!j["exploratory"].is_boolean()) throw std::invalid_argument("config: 'exploratory' must be a boolean");
    c.exploratory = j["exploratory"].get<bool>();
  }
  get_uint("threads", c.threads);
  get_uint("divergence_primes", c.divergence_primes);
  return c;
}

Decomposition decompose(const arith::ArithFn& f) {
  Decomposition out;
  if (f.is_atom()) {
    out.fs.push_back({f, 1});
    return out;
  }
  for (const auto& t : f.terms()) {
    if (t.fn.is_atom() && t.fn.atom() == arith::Atom::mobius)
      out.d = t.multiplicity;
    else
      out.fs.push_back(t);
  }
  if (out.fs.empty()) {
    out.fs.push_back({f, 1});
    out.d = 0;
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GCD matrices of arithmetical functions: determinants, spectra and bounds", "gcdeig"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--tol", g.tol, "Relative eigensolver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for randomized suites");
  app.add_option("--out", g.out, "Directory for report files");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  std::string fn_text, set_text;
  std::vector<std::uint64_t> args_m;

  auto* eval = app.add_subcommand("eval", "Evaluate a function at one or more arguments");
  eval->add_option("function", fn_text, "Function in textual syntax")->required();
  eval->add_option("m", args_m, "Positive integer arguments")->required();

  auto* det = app.add_subcommand("det", "Exact determinant with its divisor-sum and diagonal-product bounds");
  det->add_option("function", fn_text)->required();
  det->add_option("set", set_text, "Index set, e.g. range:1..10 or list:2,3,5")->required();

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of a GCD matrix");
  spectrum->add_option("function", fn_text)->required();
  spectrum->add_option("set", set_text)->required();

  auto* bounds = app.add_subcommand("bounds", "Check one bound family on an instance");
  bounds->require_subcommand(1);
  auto* b_sandwich = bounds->add_subcommand("sandwich", "Determinant sandwich and positive semi-definiteness");
  b_sandwich->add_option("function", fn_text)->required();
  b_sandwich->add_option("set", set_text)->required();
  auto* b_divisor = bounds->add_subcommand("divisor-sum", "Divisor-sum lower bound for f in C~_S");
  b_divisor->add_option("function", fn_text)->required();
  b_divisor->add_option("set", set_text)->required();
  std::vector<std::string> r_text;
  auto* b_rank = bounds->add_subcommand("rank-one", "Smallest eigenvalue of E_n + diag(r - 1)");
  b_rank->add_option("r", r_text, "Ascending entries with r_1 >= 1, exact rationals")->required();
  std::uint64_t x = 0;
  auto* b_cgcd = bounds->add_subcommand("constant-gcd", "Smallest eigenvalue when all pairwise gcds equal x");
  b_cgcd->add_option("function", fn_text)->required();
  b_cgcd->add_option("x", x)->required();
  b_cgcd->add_option("set", set_text)->required();

  std::string config_path, save_config;
  ExperimentConfig flags;
  auto* converge = app.add_subcommand("converge", "Track the q-th smallest eigenvalue as n grows");
  converge->add_option("--config", config_path, "ExperimentConfig JSON file")->check(CLI::ExistingFile);
  auto* o_fn = converge->add_option("--function", flags.function);
  auto* o_seq = converge->add_option("--sequence", flags.sequence);
  auto* o_q = converge->add_option("--q", flags.q);
  auto* o_n = converge->add_option("--n-max", flags.n_max);
  auto* o_threads = converge->add_option("--threads", flags.threads);
  auto* o_div = converge->add_option("--divergence-primes", flags.divergence_primes);
  auto* o_expl = converge->add_flag("--exploratory", flags.exploratory);
  converge->add_option("--save-config", save_config, "Write the effective config here");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run an invariant suite");
  verify->add_option("suite", suite, "Suite name or 'all'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsageError;
  }

  try {
    const spectra::SolverOptions so = solver(g);
    if (eval->parsed()) {
      const auto f = arith::parse_function(fn_text);
      arith::Evaluator ev;
      if (g.format == "json") {
        auto arr = ordered_json::array();
        for (auto m : args_m) {
          const auto v = ev(f, m);
          ordered_json e;
          e["function"] = f.str();
          e["m"] = std::to_string(m);
          e["exact"] = v.is_exact() ? format_exact(*v.exact()) : "";
          e["approx"] = format_double(v.approx());
          arr.push_back(std::move(e));
        }
        out << arr.dump(2) << '\n';
      } else if (g.format == "csv") {
        out << "function,m,exact,approx\n";
        for (auto m : args_m) {
          const auto v = ev(f, m);
          out << '"' << f.str() << "\"," << m << ',' << (v.is_exact() ? format_exact(*v.exact()) : "") << ','
              << format_double(v.approx()) << '\n';
        }
      } else {
        for (auto m : args_m) {
          const auto v = ev(f, m);
          if (v.is_exact())
            out << f.str() << "(" << m << ") = " << v.str() << " (approx " << format_double(v.approx()) << ")\n";
          else
            out << f.str() << "(" << m << ") ~ " << format_double(v.approx()) << '\n';
        }
      }
      return kOk;
    }
    if (det->parsed() || b_sandwich->parsed()) {
      const auto f = arith::parse_function(fn_text);
      const auto set = bounded_set(set_text);
      const auto parts = decompose(f);
      const auto r = spectra::sandwich_bounds(parts.fs, parts.d, set, so);
      if (det->parsed() && g.format.empty() && g.out.empty()) {
        out << "function: " << f.str() << '\n' << "set: " << set_text << '\n' << "det: " << r.observed.str() << '\n';
        print_bounds(r, out);
        return r.holds ? kOk : kVerificationFailure;
      }
      return finish_bounds(g, det->parsed() ? "det" : "bounds", r, out);
    }
    if (spectrum->parsed()) {
      const auto f = arith::parse_function(fn_text);
      const auto m = matrix::build_gcd_matrix(f, bounded_set(set_text));
      const auto s = spectra::eigenvalues_symmetric(m, so);
      if (!g.out.empty() || !g.format.empty()) {
        if (g.format == "csv" && g.out.empty()) {
          out << "k,eigenvalue\n";
          for (std::size_t k = 0; k < s.size(); ++k) out << k + 1 << ',' << format_double(s.eigenvalues[k]) << '\n';
        } else if (g.out.empty()) {
          out << spectra::to_json(s) << '\n';
        } else {
          const auto dir = prepare_out(g.out);
          write_file(dir / "spectrum.json", spectra::to_json(s) + "\n");
          write_file(dir / "matrix.json", matrix::to_json(m) + "\n");
        }
        return kOk;
      }
      out << "eigenvalues:";
      for (double v : s.eigenvalues) out << ' ' << format_double(v);
      out << "\nresidual: " << format_double(s.residual) << "\nsweeps: " << s.sweeps << '\n';
      return kOk;
    }
    if (b_divisor->parsed()) {
      arith::Evaluator ev;
      const auto r = spectra::divisor_sum_bound(arith::parse_function(fn_text), bounded_set(set_text), ev);
      return finish_bounds(g, "bounds", r, out);
    }
    if (b_rank->parsed()) {
      std::vector<FnValue> r;
      for (const auto& t : r_text) r.emplace_back(parse_exact(t));
      return finish_bounds(g, "bounds", spectra::rank_one_diag_bounds(r, so), out);
    }
    if (b_cgcd->parsed()) {
      const auto r = spectra::constant_gcd_bounds(arith::parse_function(fn_text), x, bounded_set(set_text), so);
      return finish_bounds(g, "bounds", r, out);
    }
    if (converge->parsed()) {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = config_from_json(buf.str());
      }
      if (o_fn->count()) cfg.function = flags.function;
      if (o_seq->count()) cfg.sequence = flags.sequence;
      if (o_q->count()) cfg.q = flags.q;
      if (o_n->count()) cfg.n_max = flags.n_max;
      if (o_threads->count()) cfg.threads = flags.threads;
      if (o_div->count()) cfg.divergence_primes = flags.divergence_primes;
      if (o_expl->count()) cfg.exploratory = flags.exploratory;
      if (app.get_option("--tol")->count()) cfg.tol = g.tol;
      if (app.get_option("--seed")->count()) cfg.seed = g.seed;
      if (app.get_option("--out")->count()) cfg.out = g.out;
      if (app.get_option("--format")->count()) cfg.format = g.format;
      return run_converge(cfg, save_config, out);
    }
    if (verify->parsed()) {
      const auto reports = run_suite(suite, g.seed);
      bool ok = true;
      for (const auto& r : reports) {
        out << "suite " << r.name << ": " << r.checks << " checks, " << r.failures.size() << " failures\n";
        for (const auto& f : r.failures) out << "  reproducer: " << f << '\n';
        ok = ok && r.ok();
      }
      out << (ok ? "PASS" : "FAIL") << '\n';
      return ok ? kOk : kVerificationFailure;
    }
  } catch (const HypothesisError& e) {
    err << "hypothesis violated: " << e.what() << '\n';
    return kHypothesisViolation;
  } catch (const arith::ParseError& e) {
    err << "parse error at position " << e.position() << ": " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailure;
  }
  return kUsageError;
}

}  // namespace gcdeig::cli
