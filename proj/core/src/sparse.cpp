#include "projflow/sparse.hpp"

#include "projflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace projflow {

double SparseMatrix::coeff(int i, int j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values_[it - col_idx_.begin()] : 0.0;
}

Vector SparseMatrix::multiply(const Vector& x) const {
  if (x.size() != cols_) throw Error("SparseMatrix::multiply: dimension mismatch");
  Vector y(rows_);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
  return y;
}

Vector SparseMatrix::transpose_multiply(const Vector& x) const {
  if (x.size() != rows_) throw Error("SparseMatrix::transpose_multiply: dimension mismatch");
  Vector y = Vector::Zero(cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += values_[k] * x[i];
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  std::vector<int> count(cols_ + 1, 0);
  for (int c : col_idx_) ++count[c + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  t.row_ptr_ = count;
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<int> next(count.begin(), count.end() - 1);
  for (int i = 0; i < rows_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const int slot = next[col_idx_[k]]++;
      t.col_idx_[slot] = i;
      t.values_[slot] = values_[k];
    }
  }
  return t;
}

Vector SparseMatrix::diagonal() const {
  Vector d = Vector::Zero(std::min(rows_, cols_));
  for (int i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

SparseMatrix SparseMatrix::linear_combination(double a, const SparseMatrix& x, double b,
                                              const SparseMatrix& y) {
  if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw Error("linear_combination: shape mismatch");
  SparseMatrix out(x.rows_, x.cols_);
  out.col_idx_.reserve(std::max(x.nnz(), y.nnz()));
  out.values_.reserve(std::max(x.nnz(), y.nnz()));
  for (int i = 0; i < x.rows_; ++i) {
    int p = x.row_ptr_[i], q = y.row_ptr_[i];
    const int pe = x.row_ptr_[i + 1], qe = y.row_ptr_[i + 1];
    while (p < pe || q < qe) {
      const int cp = p < pe ? x.col_idx_[p] : x.cols_;
      const int cq = q < qe ? y.col_idx_[q] : y.cols_;
      if (cp == cq) {
        out.col_idx_.push_back(cp);
        out.values_.push_back(a * x.values_[p++] + b * y.values_[q++]);
      } else if (cp < cq) {
        out.col_idx_.push_back(cp);
        out.values_.push_back(a * x.values_[p++]);
      } else {
        out.col_idx_.push_back(cq);
        out.values_.push_back(b * y.values_[q++]);
      }
    }
    out.row_ptr_[i + 1] = static_cast<int>(out.col_idx_.size());
  }
  return out;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = values_[k];
  }
  return d;
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

SparseMatrix TripletBuilder::build() const {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable sort keeps the summation order of duplicates fixed.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = entries_[a];
    const auto& eb = entries_[b];
    return ea.row != eb.row ? ea.row < eb.row : ea.col < eb.col;
  });
  SparseMatrix m(rows_, cols_);
  m.col_idx_.reserve(entries_.size());
  m.values_.reserve(entries_.size());
  int current_row = 0;
  for (std::size_t k : order) {
    const auto& e = entries_[k];
    if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_) {
      throw Error("TripletBuilder: entry out of range");
    }
    while (current_row < e.row) m.row_ptr_[++current_row] = static_cast<int>(m.col_idx_.size());
    if (!m.col_idx_.empty() && static_cast<int>(m.col_idx_.size()) > m.row_ptr_[e.row] &&
        m.col_idx_.back() == e.col) {
      m.values_.back() += e.value;
    } else {
      m.col_idx_.push_back(e.col);
      m.values_.push_back(e.value);
    }
  }
  while (current_row < rows_) m.row_ptr_[++current_row] = static_cast<int>(m.col_idx_.size());
  return m;
}

}  // namespace projflow
