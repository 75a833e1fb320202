#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>
#include <sys/wait.h>

#include "gcdeig/cli.hpp"

using namespace gcdeig;
using namespace gcdeig::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gcdeig");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("gcdeig_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Eval, Examples) {
  auto r = run_cli({"eval", "conv(phi^1, mu^2)", "2"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("= -1"), std::string::npos) << r.out;
  r = run_cli({"eval", "delta", "1"});
  EXPECT_NE(r.out.find("delta(1) = 1"), std::string::npos) << r.out;
  r = run_cli({"eval", "sigma{1}", "6"});
  EXPECT_NE(r.out.find("= 12"), std::string::npos) << r.out;
  r = run_cli({"--format", "json", "eval", "phi", "1", "10"});
  EXPECT_EQ(r.code, kOk);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 2u);
}

TEST(Eval, UsageErrors) {
  EXPECT_EQ(run_cli({"eval", "conv(phi, foo)", "2"}).code, kUsageError);
  EXPECT_EQ(run_cli({"eval", "phi", "0"}).code, kUsageError);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUsageError);
  EXPECT_EQ(run_cli({"--help"}).code, kOk);
}

TEST(Det, IdentityOnRange) {
  const auto r = run_cli({"det", "I", "range:1..4"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("det: 4"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("upper: 24"), std::string::npos) << r.out;
  EXPECT_NE(run_cli({"det", "phi", "list:2"}).out.find("det: 1"), std::string::npos);
}

TEST(Det, HypothesisViolation) {
  const auto r = run_cli({"det", "mu", "range:1..3"});
  EXPECT_EQ(r.code, kHypothesisViolation);
  EXPECT_NE(r.err.find("(f*mu)(2) = -2"), std::string::npos) << r.err;
}

TEST(Bounds, Subcommands) {
  auto r = run_cli({"--format", "json", "bounds", "rank-one", "1", "2", "4"});
  ASSERT_EQ(r.code, kOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["upper"]["exact"], "3/7");
  EXPECT_EQ(j["regime"], "strict");
  EXPECT_EQ(run_cli({"bounds", "rank-one", "2", "1"}).code, kUsageError);
  EXPECT_EQ(run_cli({"bounds", "rank-one", "1/2", "2"}).code, kHypothesisViolation);
  EXPECT_EQ(run_cli({"bounds", "constant-gcd", "I", "6", "list:6,30,42"}).code, kOk);
  EXPECT_EQ(run_cli({"bounds", "constant-gcd", "I", "1", "list:2,4"}).code, kHypothesisViolation);
  EXPECT_EQ(run_cli({"bounds", "sandwich", "conv(phi^2, mu)", "range:1..12"}).code, kOk);
  EXPECT_EQ(run_cli({"bounds", "sandwich", "conv(phi, mu)", "list:2"}).code, kHypothesisViolation);
  EXPECT_EQ(run_cli({"bounds", "divisor-sum", "sigma{1}", "list:2,3,4,6"}).code, kOk);
}

TEST(Spectrum, TextAndCsv) {
  auto r = run_cli({"spectrum", "phi", "list:2,3,5"});
  ASSERT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("eigenvalues: 0.3445576184501"), std::string::npos) << r.out;
  r = run_cli({"--format", "csv", "spectrum", "phi", "list:2,3,5"});
  EXPECT_EQ(r.out.substr(0, 13), "k,eigenvalue\n");
}

TEST(Verify, Suites) {
  const auto r = run_cli({"verify", "en-plus-diag"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_EQ(run_cli({"verify", "no-such-suite"}).code, kUsageError);
}

TEST(Config, RoundTrip) {
  ExperimentConfig c;
  c.function = "conv(phi^2, mu^1)";
  c.sequence = "ap:1,2,0";
  c.q = 2;
  c.n_max = 30;
  c.tol = 1e-13;
  c.out = "somewhere";
  c.format = "csv";
  c.seed = 99;
  c.exploratory = true;
  c.threads = 3;
  c.divergence_primes = 17;
  EXPECT_EQ(config_from_json(to_json(c)), c);
  EXPECT_EQ(to_json(config_from_json(to_json(c))), to_json(c));
  EXPECT_THROW(config_from_json(R"({"bogus": 1})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"q": "two"})"), std::invalid_argument);
}

TEST(Decompose, SplitsMobiusPower) {
  const auto d = decompose(arith::parse_function("conv(phi^2, sigma{1}, mu^3)"));
  ASSERT_EQ(d.fs.size(), 2u);
  EXPECT_EQ(d.d, 3u);
  const auto bare = decompose(arith::parse_function("mu"));
  ASSERT_EQ(bare.fs.size(), 1u);
  EXPECT_EQ(bare.d, 0u);
}

TEST(Converge, WritesReproducibleReports) {
  const auto a = scratch("a"), b = scratch("b");
  const auto ra = run_cli({"--out", a.string(), "converge", "--function", "conv(phi^2, mu)", "--sequence",
                           "ap:1,2,0", "--q", "1", "--n-max", "40"});
  ASSERT_EQ(ra.code, kOk) << ra.err;
  for (const char* f : {"config.json", "convergence.json", "convergence.csv", "divergence.csv"})
    EXPECT_TRUE(fs::exists(a / f)) << f;
  // Re-running from the written config reproduces the reports.
  const auto rb = run_cli({"--out", b.string(), "converge", "--config", (a / "config.json").string()});
  ASSERT_EQ(rb.code, kOk) << rb.err;
  // The config block records --out, which differs between the two runs.
  auto ja = nlohmann::ordered_json::parse(slurp(a / "convergence.json"));
  auto jb = nlohmann::ordered_json::parse(slurp(b / "convergence.json"));
  EXPECT_EQ(ja["convergence"].dump(), jb["convergence"].dump());
  EXPECT_EQ(ja["divergence"].dump(), jb["divergence"].dump());
  ja["config"].erase("out");
  jb["config"].erase("out");
  EXPECT_EQ(ja.dump(), jb.dump());
  for (const char* f : {"convergence.csv", "divergence.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  const auto doc = nlohmann::json::parse(slurp(a / "convergence.json"));
  EXPECT_TRUE(doc.contains("divergence"));
  EXPECT_EQ(doc["convergence"]["monotone_nonincreasing"], true);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Converge, ErrorsAndExploratory) {
  EXPECT_EQ(run_cli({"converge", "--function", "phi", "--sequence", "range:1..5", "--q", "6"}).code, kUsageError);
  EXPECT_EQ(run_cli({"converge", "--function", "phi", "--sequence", "ap:1,2,0"}).code, kUsageError);
  EXPECT_EQ(run_cli({"converge", "--function", "conv(phi, mu)", "--sequence", "range:1..5"}).code,
            kHypothesisViolation);
  const auto r = run_cli({"converge", "--function", "conv(phi, mu)", "--sequence", "range:1..5", "--exploratory"});
  EXPECT_EQ(r.code, kOk) << r.err;
  const auto ok = run_cli({"converge", "--function", "xi{1}", "--sequence", "range:1..20", "--q", "2"});
  EXPECT_EQ(ok.code, kOk);
  EXPECT_EQ(ok.out.rfind("q=2 n=2..20", 0), 0u) << ok.out;
  EXPECT_NE(ok.out.find("divergence_increasing"), std::string::npos);
  const auto listed = run_cli({"converge", "--function", "xi{1}", "--sequence", "list:1,2,3,4,5"});
  EXPECT_EQ(listed.code, kOk);
  EXPECT_EQ(listed.out.find("divergence_increasing"), std::string::npos);
}

TEST(Binary, ExitCodesPropagate) {
  const std::string bin = GCDEIG_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("eval phi 10"), kOk);
  EXPECT_EQ(status("det mu range:1..3"), kHypothesisViolation);
  EXPECT_EQ(status("verify nope"), kUsageError);
}
