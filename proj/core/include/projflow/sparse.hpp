#pragma once

#include "projflow/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace projflow {

/// Compressed-row sparse matrix. Column indices are strictly increasing
/// within each row.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<int>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<int>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Entry (i, j); zero when not stored.
  double coeff(int i, int j) const;

  Vector multiply(const Vector& x) const;
  Vector transpose_multiply(const Vector& x) const;
  SparseMatrix transpose() const;
  /// Diagonal entries.
  Vector diagonal() const;

  /// this * a + other * b on the union pattern; shapes must match.
  static SparseMatrix linear_combination(double a, const SparseMatrix& x, double b, const SparseMatrix& y);

  Eigen::MatrixXd to_dense() const;
  double frobenius_norm() const;

  friend class TripletBuilder;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// Accumulates (row, col, value) contributions; duplicates are summed on
/// `build`, in deterministic order.
class TripletBuilder {
public:
  TripletBuilder(int rows, int cols) : rows_(rows), cols_(cols) {}
  void reserve(std::size_t n) { entries_.reserve(n); }
  void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
  SparseMatrix build() const;

private:
  struct Entry {
    int row;
    int col;
    double value;
  };
  int rows_;
  int cols_;
  std::vector<Entry> entries_;
};

}  // namespace projflow
