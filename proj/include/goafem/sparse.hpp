#pragma once

#include <goafem/types.hpp>

#include <span>
#include <vector>

namespace goafem {

/// Compressed row storage with sorted, unique column indices per row.
class SparseMatrix
{
public:
  SparseMatrix() = default;
  SparseMatrix(Index n_rows, Index n_cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
               std::vector<double> values);

  /// Zero matrix with the given per-row column sets (need not be sorted).
  static SparseMatrix from_pattern(Index n_rows, Index n_cols, std::vector<std::vector<Index>> rows);

  Index n_rows() const noexcept { return n_rows_; }
  Index n_cols() const noexcept { return n_cols_; }
  Index nnz() const noexcept { return col_idx_.size(); }

  const std::vector<Index> &row_ptr() const noexcept { return row_ptr_; }
  const std::vector<Index> &col_idx() const noexcept { return col_idx_; }
  const std::vector<double> &values() const noexcept { return values_; }

  /// Entry (i, j), zero if outside the pattern.
  double at(Index i, Index j) const;
  /// Adds v to entry (i, j); the entry must be in the pattern.
  void add(Index i, Index j, double v);

  std::vector<double> multiply(std::span<const double> x) const;

  /// Principal submatrix on the given (ascending) indices.
  SparseMatrix restrict_to(std::span<const Index> keep) const;

  /// Entrywise sum of two matrices with identical patterns.
  SparseMatrix plus(const SparseMatrix &other) const;

  double max_abs() const;
  bool structurally_symmetric() const;
  double symmetry_defect() const; // max |a_ij - a_ji|

private:
  Index find(Index i, Index j) const;

  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

double norm2(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

} // namespace goafem
