#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "nchodge/scalar.hpp"

namespace nchodge {

/// Sorted (index, value) pairs with no zero values.
using SparseVector = std::vector<std::pair<std::size_t, Scalar>>;

/// y += a * x
void axpy(SparseVector& y, const Scalar& a, const SparseVector& x);
SparseVector scaled(const SparseVector& x, const Scalar& a);

/// Column-major sparse matrix; each column is a SparseVector of row entries.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(std::vector<SparseVector>(cols)) {}

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_.size(); }
  const SparseVector& column(std::size_t c) const { return cols_[c]; }

  /// Adds v to entry (r, c).
  void add(std::size_t r, std::size_t c, const Scalar& v);
  Scalar at(std::size_t r, std::size_t c) const;
  bool is_zero() const;
  std::size_t nnz() const;

  SparseVector apply(const SparseVector& x) const;
  SparseMatrix& operator+=(const SparseMatrix& o);
  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
  bool operator==(const SparseMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  std::size_t rows_ = 0;
  std::vector<SparseVector> cols_;
};

/// Row-echelon basis of a subspace; the pivot of a stored vector is its smallest index.
/// Coordinates with smaller indices are eliminated first.
class EchelonBasis {
 public:
  /// Reduces v until its leading index has no pivot (or v is zero).
  SparseVector reduce(SparseVector v) const;
  /// Returns true if v was independent and has been added.
  bool insert(SparseVector v);
  bool contains(const SparseVector& v) const { return reduce(v).empty(); }
  std::size_t dim() const { return rows_.size(); }
  std::vector<SparseVector> vectors() const;

 private:
  std::map<std::size_t, SparseVector> rows_;
};

/// Basis of ker(A), deterministic for fixed input.
std::vector<SparseVector> kernel(const SparseMatrix& a);
std::size_t rank(const SparseMatrix& a);

}  // namespace nchodge
