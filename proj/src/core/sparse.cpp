#include "nchodge/sparse.hpp"

#include <algorithm>

namespace nchodge {

void axpy(SparseVector& y, const Scalar& a, const SparseVector& x) {
  if (a == 0 || x.empty()) return;
  SparseVector out;
  out.reserve(y.size() + x.size());
  auto iy = y.begin();
  auto ix = x.begin();
  while (iy != y.end() || ix != x.end()) {
    if (ix == x.end() || (iy != y.end() && iy->first < ix->first)) {
      out.push_back(std::move(*iy++));
    } else if (iy == y.end() || ix->first < iy->first) {
      Scalar v = a * ix->second;
      if (v != 0) out.emplace_back(ix->first, std::move(v));
      ++ix;
    } else {
      Scalar v = iy->second + a * ix->second;
      if (v != 0) out.emplace_back(iy->first, std::move(v));
      ++iy;
      ++ix;
    }
  }
  y = std::move(out);
}

SparseVector scaled(const SparseVector& x, const Scalar& a) {
  if (a == 0) return {};
  SparseVector out(x);
  for (auto& [i, v] : out) v *= a;
  return out;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.cols_[i].emplace_back(i, Scalar(1));
  return m;
}

void SparseMatrix::add(std::size_t r, std::size_t c, const Scalar& v) {
  if (r >= rows_ || c >= cols_.size()) throw std::out_of_range("SparseMatrix::add");
  if (v == 0) return;
  axpy(cols_[c], 1, SparseVector{{r, v}});
}

Scalar SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto& col = cols_.at(c);
  auto it = std::lower_bound(col.begin(), col.end(), r, [](const auto& e, std::size_t k) { return e.first < k; });
  return (it != col.end() && it->first == r) ? it->second : Scalar(0);
}

bool SparseMatrix::is_zero() const {
  return std::all_of(cols_.begin(), cols_.end(), [](const auto& c) { return c.empty(); });
}

std::size_t SparseMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto& c : cols_) n += c.size();
  return n;
}

SparseVector SparseMatrix::apply(const SparseVector& x) const {
  SparseVector y;
  for (const auto& [i, v] : x) axpy(y, v, cols_.at(i));
  return y;
}

SparseMatrix& SparseMatrix::operator+=(const SparseMatrix& o) {
  if (rows_ != o.rows_ || cols_.size() != o.cols_.size()) throw std::invalid_argument("SparseMatrix += shape");
  for (std::size_t c = 0; c < cols_.size(); ++c) axpy(cols_[c], 1, o.cols_[c]);
  return *this;
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("SparseMatrix * shape");
  SparseMatrix out(a.rows(), b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) out.cols_[c] = a.apply(b.cols_[c]);
  return out;
}

SparseVector EchelonBasis::reduce(SparseVector v) const {
  while (!v.empty()) {
    auto it = rows_.find(v.front().first);
    if (it == rows_.end()) break;
    const Scalar f = -v.front().second / it->second.front().second;
    axpy(v, f, it->second);
  }
  return v;
}

bool EchelonBasis::insert(SparseVector v) {
  v = reduce(std::move(v));
  if (v.empty()) return false;
  const std::size_t pivot = v.front().first;
  rows_.emplace(pivot, std::move(v));
  return true;
}

std::vector<SparseVector> EchelonBasis::vectors() const {
  std::vector<SparseVector> out;
  out.reserve(rows_.size());
  for (const auto& [p, v] : rows_) out.push_back(v);
  return out;
}

std::vector<SparseVector> kernel(const SparseMatrix& a) {
  // Pivot rows carry the source combination that produced them.
  struct Row {
    SparseVector image;
    SparseVector combo;
  };
  std::map<std::size_t, Row> rows;
  std::vector<SparseVector> out;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    SparseVector img = a.column(j);
    SparseVector combo{{j, Scalar(1)}};
    while (!img.empty()) {
      auto it = rows.find(img.front().first);
      if (it == rows.end()) break;
      const Scalar f = -img.front().second / it->second.image.front().second;
      axpy(img, f, it->second.image);
      axpy(combo, f, it->second.combo);
    }
    if (img.empty()) {
      out.push_back(std::move(combo));
    } else {
      const std::size_t p = img.front().first;
      rows.emplace(p, Row{std::move(img), std::move(combo)});
    }
  }
  return out;
}

std::size_t rank(const SparseMatrix& a) {
  EchelonBasis e;
  for (std::size_t j = 0; j < a.cols(); ++j) e.insert(a.column(j));
  return e.dim();
}

}  // namespace nchodge
