#include "gcdeig/matrix.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "gcdeig/numtheory.hpp"

namespace gcdeig::matrix {

Matrix<double> approx(const Matrix<FnValue>& m) {
  Matrix<double> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).approx();
  return out;
}

Matrix<mpq_class> exact(const Matrix<FnValue>& m) {
  Matrix<mpq_class> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!m(i, j).is_exact()) throw std::domain_error("matrix has inexact entries");
      out(i, j) = *m(i, j).exact();
    }
  return out;
}

IndexSet::IndexSet(std::vector<std::uint64_t> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("index set must be nonempty");
  if (elements_.front() == 0) throw std::invalid_argument("index set elements must be positive");
  for (std::size_t i = 1; i < elements_.size(); ++i)
    if (elements_[i] <= elements_[i - 1])
      throw std::invalid_argument("index set must be strictly increasing (at position " + std::to_string(i) + ")");
}

IndexSet IndexSet::prefix(std::size_t n) const {
  if (n == 0 || n > size()) throw std::out_of_range("prefix length out of range");
  return IndexSet({elements_.begin(), elements_.begin() + static_cast<std::ptrdiff_t>(n)});
}

GcdMatrix::GcdMatrix(IndexSet set, arith::ArithFn fn, Matrix<FnValue> entries)
    : set_(std::move(set)), fn_(std::move(fn)), entries_(std::move(entries)) {
  if (entries_.rows() != set_.size() || entries_.cols() != set_.size())
    throw std::invalid_argument("gcd matrix dimension does not match its index set");
}

bool GcdMatrix::is_exact() const {
  for (std::size_t i = 0; i < size(); ++i)
    for (auto& v : entries_.row(i))
      if (!v.is_exact()) return false;
  return true;
}

GcdMatrix build_gcd_matrix(const arith::ArithFn& f, const IndexSet& set, arith::Evaluator& ev) {
  const std::size_t n = set.size();
  Matrix<FnValue> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = ev(f, set[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = ev(f, std::gcd(set[i], set[j]));
      m(j, i) = m(i, j);
    }
  }
  return GcdMatrix(set, f, std::move(m));
}

GcdMatrix build_gcd_matrix(const arith::ArithFn& f, const IndexSet& set) {
  arith::Evaluator ev;
  return build_gcd_matrix(f, set, ev);
}

GcdMatrix build_composite_matrix(std::span<const arith::Term> fs, unsigned d, const IndexSet& set,
                                 arith::Evaluator& ev) {
  return build_gcd_matrix(arith::composite(fs, d), set, ev);
}

GcdMatrix build_composite_matrix(std::span<const arith::Term> fs, unsigned d, const IndexSet& set) {
  arith::Evaluator ev;
  return build_composite_matrix(fs, d, set, ev);
}

TensorProductSet tensor_product_set(const IndexSet& x, const IndexSet& y) {
  auto check_pairwise = [](const IndexSet& s, const char* name) {
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j)
        if (std::gcd(s[i], s[j]) != 1)
          throw HypothesisError(std::string(name) + " is not pairwise coprime: gcd(" + std::to_string(s[i]) + ", " +
                                std::to_string(s[j]) + ") != 1");
  };
  check_pairwise(x, "X");
  check_pairwise(y, "Y");
  std::vector<std::uint64_t> products;
  products.reserve(x.size() * y.size());
  for (auto a : x.elements())
    for (auto b : y.elements()) {
      if (std::gcd(a, b) != 1)
        throw HypothesisError("gcd(" + std::to_string(a) + ", " + std::to_string(b) + ") != 1 across X and Y");
      if (b != 0 && a > UINT64_MAX / b) throw std::overflow_error("tensor product element overflows 64 bits");
      products.push_back(a * b);
    }
  std::vector<std::uint64_t> sorted = products;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw HypothesisError("tensor product contains a duplicate element");
  TensorProductSet t{IndexSet(sorted), {}};
  t.position.reserve(products.size());
  for (auto p : products)
    t.position.push_back(static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), p) - sorted.begin()));
  return t;
}

Matrix<FnValue> OneRankPlusDiag::materialize() const {
  const std::size_t n = r.size();
  Matrix<FnValue> m(n, n, FnValue(1));
  for (std::size_t i = 0; i < n; ++i) m(i, i) = r[i];
  return m;
}

OneRankPlusDiag as_one_rank_plus_diag(const GcdMatrix& m, std::uint64_t x, arith::Evaluator& ev) {
  const auto& s = m.set();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (std::gcd(s[i], s[j]) != x)
        throw HypothesisError("gcd(" + std::to_string(s[i]) + ", " + std::to_string(s[j]) + ") = " +
                              std::to_string(std::gcd(s[i], s[j])) + ", expected " + std::to_string(x));
  const FnValue fx = ev(m.fn(), x);
  if (fx.is_zero()) throw DiagonalMatrixCase("f(" + std::to_string(x) + ") = 0: the matrix is diagonal");
  if (fx.sign() < 0) throw HypothesisError("f(" + std::to_string(x) + ") = " + fx.str() + " is negative");
  OneRankPlusDiag out;
  out.scale = fx;
  out.r.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out.r.push_back(m.entries()(i, i) / fx);
  return out;
}

OneRankPlusDiag as_one_rank_plus_diag(const GcdMatrix& m, std::uint64_t x) {
  arith::Evaluator ev;
  return as_one_rank_plus_diag(m, x, ev);
}

void write_csv(std::ostream& os, const GcdMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto row = m.entries().row(i);
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j].str();
    os << '\n';
  }
}

std::string to_json(const GcdMatrix& m) {
  nlohmann::ordered_json j;
  j["function"] = m.fn().str();
  j["index_set"] = m.set().elements();
  j["exact"] = m.is_exact();
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto row = nlohmann::json::array();
    for (const auto& v : m.entries().row(i)) row.push_back(v.str());
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j.dump(2);
}

}  // namespace gcdeig::matrix
