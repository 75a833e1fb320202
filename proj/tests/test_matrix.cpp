#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "gcdeig/matrix.hpp"
#include "gcdeig/numtheory.hpp"
#include "oracles.hpp"

using namespace gcdeig;
using namespace gcdeig::matrix;
using arith::ArithFn;
using arith::Term;

namespace {

IndexSet set_of(std::initializer_list<std::uint64_t> xs) { return IndexSet(std::vector<std::uint64_t>(xs)); }

Matrix<FnValue> from_rows(const std::vector<std::vector<long>>& rows) {
  Matrix<FnValue> m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = FnValue(rows[i][j]);
  return m;
}

}  // namespace

TEST(IndexSet, Validation) {
  EXPECT_THROW(IndexSet({}), std::invalid_argument);
  EXPECT_THROW(set_of({0, 1}), std::invalid_argument);
  EXPECT_THROW(set_of({2, 2}), std::invalid_argument);
  EXPECT_THROW(set_of({3, 2}), std::invalid_argument);
  const auto s = set_of({1, 4, 9});
  EXPECT_EQ(s.prefix(2), set_of({1, 4}));
  EXPECT_THROW(s.prefix(0), std::out_of_range);
  EXPECT_THROW(s.prefix(4), std::out_of_range);
}

TEST(Build, IdentityOnFirstFour) {
  const auto m = build_gcd_matrix(ArithFn::identity(), set_of({1, 2, 3, 4}));
  EXPECT_EQ(m.entries(), from_rows({{1, 1, 1, 1}, {1, 2, 1, 2}, {1, 1, 3, 1}, {1, 2, 1, 4}}));
  EXPECT_TRUE(m.is_exact());
  EXPECT_TRUE(is_symmetric(m.entries()));
}

TEST(Build, TotientOnPrimes) {
  const auto m = build_gcd_matrix(ArithFn::phi(), set_of({2, 3, 5}));
  EXPECT_EQ(m.entries(), from_rows({{1, 1, 1}, {1, 2, 1}, {1, 1, 4}}));
}

TEST(Build, CompositeMatchesOracle) {
  const Term fs[] = {{ArithFn::phi(), 1}};
  const auto m = build_composite_matrix(fs, 2, set_of({1, 2}));
  EXPECT_EQ(m.entries(), from_rows({{1, 1}, {1, -1}}));
  EXPECT_EQ(m.fn().str(), "conv(phi^1, mu^2)");
}

TEST(Build, SingleElement) {
  const auto m = build_gcd_matrix(ArithFn::sigma(1), set_of({6}));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.entries()(0, 0), FnValue(12));
}

TEST(Build, RandomSetsMatchDefinition) {
  std::mt19937 rng(41);
  arith::Evaluator ev;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::uint64_t> xs;
    for (std::uint64_t x = 1; x <= 50; ++x)
      if (rng() % 4 == 0) xs.push_back(x);
    if (xs.empty()) xs.push_back(7);
    const auto m = build_gcd_matrix(ArithFn::phi(), IndexSet(xs), ev);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < xs.size(); ++j)
        ASSERT_EQ(*m.entries()(i, j).exact(), oracle::totient(oracle::gcd_subtract(xs[i], xs[j])));
    ASSERT_TRUE(is_symmetric(m.entries()));
  }
}

TEST(Build, InexactEntries) {
  const auto m = build_gcd_matrix(ArithFn::xi(0.5), set_of({1, 2, 4}));
  EXPECT_FALSE(m.is_exact());
  EXPECT_THROW(m.exact(), std::domain_error);
  EXPECT_NEAR(m.approx()(2, 2), 2.0, 1e-15);
  EXPECT_NEAR(m.approx()(1, 2), std::sqrt(2.0), 1e-15);
}

TEST(TensorProduct, Examples) {
  const auto t = tensor_product_set(set_of({1, 2}), set_of({3, 5}));
  EXPECT_EQ(t.set, set_of({3, 5, 6, 10}));
  EXPECT_EQ(t.position, (std::vector<std::size_t>{0, 1, 2, 3}));
  const auto u = tensor_product_set(set_of({1, 5, 7}), set_of({2, 3}));
  // x-major products 2, 3, 10, 15, 14, 21 sorted to 2, 3, 10, 14, 15, 21
  EXPECT_EQ(u.set, set_of({2, 3, 10, 14, 15, 21}));
  EXPECT_EQ(u.position, (std::vector<std::size_t>{0, 1, 2, 4, 3, 5}));
  const auto v = tensor_product_set(set_of({1, 7}), set_of({3, 5}));
  EXPECT_EQ(v.set, set_of({3, 5, 21, 35}));
}

TEST(TensorProduct, Errors) {
  EXPECT_THROW(tensor_product_set(set_of({2, 4}), set_of({3})), HypothesisError);
  EXPECT_THROW(tensor_product_set(set_of({2}), set_of({3, 9})), HypothesisError);
  EXPECT_THROW(tensor_product_set(set_of({2, 3}), set_of({3, 5})), HypothesisError);
}

TEST(Kronecker, MultiplicativeFactorization) {
  const std::vector<ArithFn> fns = {ArithFn::phi(), ArithFn::identity(), ArithFn::sigma(1), ArithFn::psi(1),
                                    ArithFn::jordan(2)};
  const auto primes = numtheory::primes_below(60);
  std::mt19937 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    // Disjoint prime pools keep X and Y coprime; distinct primes inside each
    // keep them pairwise coprime.
    std::vector<std::uint64_t> pool(primes.begin(), primes.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    auto draw = [&](std::size_t k, std::size_t off) {
      std::vector<std::uint64_t> xs;
      if (rng() % 2) xs.push_back(1);
      for (std::size_t i = 0; i < k; ++i) xs.push_back(pool[off + i] * (rng() % 3 == 0 ? pool[off + i] : 1));
      std::sort(xs.begin(), xs.end());
      return IndexSet(xs);
    };
    const auto x = draw(1 + rng() % 3, 0);
    const auto y = draw(1 + rng() % 3, 5);
    const auto& f = fns[trial % fns.size()];
    const auto t = tensor_product_set(x, y);
    const auto lhs = permute_to_product_order(build_gcd_matrix(f, t.set).entries(), t);
    const auto rhs = kronecker(build_gcd_matrix(f, x).entries(), build_gcd_matrix(f, y).entries());
    ASSERT_EQ(lhs, rhs) << f.str();
  }
}

TEST(Kronecker, FailsForNonMultiplicative) {
  const auto f = ArithFn::patched(ArithFn::identity(), {{10, mpq_class(9)}});
  const auto t = tensor_product_set(set_of({1, 2}), set_of({3, 5}));
  const auto lhs = permute_to_product_order(build_gcd_matrix(f, t.set).entries(), t);
  const auto rhs = kronecker(build_gcd_matrix(f, set_of({1, 2})).entries(), build_gcd_matrix(f, set_of({3, 5})).entries());
  EXPECT_NE(lhs, rhs);
  EXPECT_EQ(lhs(3, 3), FnValue(9));
  EXPECT_EQ(rhs(3, 3), FnValue(10));
}

TEST(OneRankPlusDiag, TotientOnPrimes) {
  const auto m = build_gcd_matrix(ArithFn::phi(), set_of({2, 3, 5}));
  const auto d = as_one_rank_plus_diag(m, 1);
  EXPECT_EQ(d.r, (std::vector<FnValue>{1, 2, 4}));
  EXPECT_EQ(d.scale, FnValue(1));
}

TEST(OneRankPlusDiag, ScaledRoundTrip) {
  const auto m = build_gcd_matrix(ArithFn::xi(1), set_of({6, 30, 42}));
  const auto d = as_one_rank_plus_diag(m, 6);
  EXPECT_EQ(d.r, (std::vector<FnValue>{1, 5, 7}));
  EXPECT_EQ(d.scale, FnValue(6));
  auto back = d.materialize();
  for (std::size_t i = 0; i < back.rows(); ++i)
    for (std::size_t j = 0; j < back.cols(); ++j) back(i, j) *= d.scale;
  EXPECT_EQ(back, m.entries());
}

TEST(OneRankPlusDiag, Errors) {
  const auto m = build_gcd_matrix(ArithFn::phi(), set_of({2, 3, 4}));
  EXPECT_THROW(as_one_rank_plus_diag(m, 1), HypothesisError);
  const auto z = ArithFn::patched(ArithFn::identity(), {{2, mpq_class(0)}});
  const auto mz = build_gcd_matrix(z, set_of({4, 6, 10}));
  EXPECT_THROW(as_one_rank_plus_diag(mz, 2), DiagonalMatrixCase);
}

TEST(Export, CsvAndJson) {
  const auto m = build_gcd_matrix(ArithFn::xi(-1), set_of({1, 2}));
  std::ostringstream os;
  write_csv(os, m);
  EXPECT_EQ(os.str(), "1,1\n1,1/2\n");
  const auto j = nlohmann::json::parse(to_json(m));
  EXPECT_EQ(j["function"], "xi{-1}");
  EXPECT_EQ(j["index_set"], nlohmann::json::array({1, 2}));
  EXPECT_EQ(j["exact"], true);
  EXPECT_EQ(j["entries"][1][1], "1/2");
  EXPECT_EQ(to_json(m), to_json(build_gcd_matrix(ArithFn::xi(-1), set_of({1, 2}))));
}
