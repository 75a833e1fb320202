#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcdeig/arith.hpp"
#include "gcdeig/errors.hpp"
#include "gcdeig/value.hpp"

namespace gcdeig::matrix {

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
bool is_symmetric(const Matrix<T>& m) {
  if (m.rows() != m.cols()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (!(m(i, j) == m(j, i))) return false;
  return true;
}

template <class T>
Matrix<T> kronecker(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Principal submatrix on the leading n rows and columns.
template <class T>
Matrix<T> leading(const Matrix<T>& m, std::size_t n) {
  Matrix<T> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = m(i, j);
  return out;
}

Matrix<double> approx(const Matrix<FnValue>& m);
// Throws std::domain_error if some entry is not exact.
Matrix<mpq_class> exact(const Matrix<FnValue>& m);

/// Strictly increasing list of positive integers x_1 < ... < x_n, n >= 1.
class IndexSet {
 public:
  explicit IndexSet(std::vector<std::uint64_t> elements);

  std::size_t size() const { return elements_.size(); }
  std::uint64_t operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<std::uint64_t>& elements() const { return elements_; }
  IndexSet prefix(std::size_t n) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::uint64_t> elements_;
};

/// The matrix of f at pairwise gcds of an index set.
class GcdMatrix {
 public:
  GcdMatrix(IndexSet set, arith::ArithFn fn, Matrix<FnValue> entries);

  const IndexSet& set() const { return set_; }
  const arith::ArithFn& fn() const { return fn_; }
  const Matrix<FnValue>& entries() const { return entries_; }
  std::size_t size() const { return set_.size(); }
  bool is_exact() const;

  Matrix<double> approx() const { return matrix::approx(entries_); }
  Matrix<mpq_class> exact() const { return matrix::exact(entries_); }

 private:
  IndexSet set_;
  arith::ArithFn fn_;
  Matrix<FnValue> entries_;
};

GcdMatrix build_gcd_matrix(const arith::ArithFn& f, const IndexSet& set, arith::Evaluator& ev);
GcdMatrix build_gcd_matrix(const arith::ArithFn& f, const IndexSet& set);

GcdMatrix build_composite_matrix(std::span<const arith::Term> fs, unsigned d, const IndexSet& set,
                                 arith::Evaluator& ev);
GcdMatrix build_composite_matrix(std::span<const arith::Term> fs, unsigned d, const IndexSet& set);

/// Sorted product set X ⊙ Y with the permutation from x-major product order
/// (x_1 y_1, ..., x_1 y_r, x_2 y_1, ...) to positions in the sorted set.
struct TensorProductSet {
  IndexSet set;
  std::vector<std::size_t> position;  // position[k] = sorted index of k-th product
};

// Requires X pairwise coprime, Y pairwise coprime and gcd(x, y) = 1 across.
TensorProductSet tensor_product_set(const IndexSet& x, const IndexSet& y);

// Reorders a sorted-set matrix into x-major product order.
template <class T>
Matrix<T> permute_to_product_order(const Matrix<T>& sorted, const TensorProductSet& t) {
  const std::size_t n = t.position.size();
  Matrix<T> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = sorted(t.position[i], t.position[j]);
  return out;
}

/// E_n + diag(r_1 - 1, ..., r_n - 1), stored by its diagonal data only.
/// `scale` is f(x) when obtained from a constant-gcd matrix, so that
/// scale * materialize() reproduces the original matrix.
struct OneRankPlusDiag {
  std::vector<FnValue> r;
  FnValue scale{1};

  std::size_t size() const { return r.size(); }
  Matrix<FnValue> materialize() const;
};

// Signalled when f(x) = 0: the constant-gcd matrix is then diagonal.
class DiagonalMatrixCase : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Rewrites M / f(x) as E_n + diag(r - 1) with r_i = f(x_i) / f(x). Every
/// pairwise gcd of the index set must equal x.
OneRankPlusDiag as_one_rank_plus_diag(const GcdMatrix& m, std::uint64_t x, arith::Evaluator& ev);
OneRankPlusDiag as_one_rank_plus_diag(const GcdMatrix& m, std::uint64_t x);

// Row-major CSV; exact entries as integer/rational strings.
void write_csv(std::ostream& os, const GcdMatrix& m);
// {"function", "index_set", "exact", "entries"}; entries as strings.
std::string to_json(const GcdMatrix& m);

}  // namespace gcdeig::matrix
