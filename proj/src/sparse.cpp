#include <goafem/sparse.hpp>

#include <algorithm>
#include <cmath>

namespace goafem {

SparseMatrix::SparseMatrix(Index n_rows, Index n_cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                           std::vector<double> values)
  : n_rows_(n_rows)
  , n_cols_(n_cols)
  , row_ptr_(std::move(row_ptr))
  , col_idx_(std::move(col_idx))
  , values_(std::move(values))
{
  if (row_ptr_.size() != n_rows_ + 1 || col_idx_.size() != values_.size() || row_ptr_.back() != col_idx_.size())
    throw DimensionMismatch("inconsistent CSR arrays");
  for (Index i = 0; i < n_rows_; ++i)
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    {
      if (col_idx_[k] >= n_cols_)
        throw DimensionMismatch("CSR column index out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
        throw InvalidArgument("CSR column indices must be sorted and unique");
    }
}

SparseMatrix SparseMatrix::from_pattern(Index n_rows, Index n_cols, std::vector<std::vector<Index>> rows)
{
  std::vector<Index> row_ptr{0};
  std::vector<Index> col_idx;
  for (auto &r : rows)
  {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    col_idx.insert(col_idx.end(), r.begin(), r.end());
    row_ptr.push_back(col_idx.size());
  }
  std::vector<double> values(col_idx.size(), 0.0);
  return SparseMatrix(n_rows, n_cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

Index SparseMatrix::find(Index i, Index j) const
{
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j)
    return invalid_index;
  return static_cast<Index>(it - col_idx_.begin());
}

double SparseMatrix::at(Index i, Index j) const
{
  if (i >= n_rows_ || j >= n_cols_)
    throw InvalidArgument("matrix index out of range");
  const Index k = find(i, j);
  return k == invalid_index ? 0.0 : values_[k];
}

void SparseMatrix::add(Index i, Index j, double v)
{
  const Index k = find(i, j);
  if (k == invalid_index)
    throw InvalidArgument("entry outside the sparsity pattern");
  values_[k] += v;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const
{
  if (x.size() != n_cols_)
    throw DimensionMismatch("matrix-vector size mismatch");
  std::vector<double> y(n_rows_, 0.0);
  for (Index i = 0; i < n_rows_; ++i)
  {
    double s = 0.0;
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
  return y;
}

SparseMatrix SparseMatrix::restrict_to(std::span<const Index> keep) const
{
  std::vector<Index> new_index(std::max(n_rows_, n_cols_), invalid_index);
  for (Index k = 0; k < keep.size(); ++k)
    new_index[keep[k]] = k;
  std::vector<Index> row_ptr{0};
  std::vector<Index> col_idx;
  std::vector<double> values;
  for (Index i : keep)
  {
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    {
      const Index j = new_index[col_idx_[k]];
      if (j == invalid_index)
        continue;
      col_idx.push_back(j);
      values.push_back(values_[k]);
    }
    row_ptr.push_back(col_idx.size());
  }
  return SparseMatrix(keep.size(), keep.size(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::plus(const SparseMatrix &other) const
{
  if (other.row_ptr_ != row_ptr_ || other.col_idx_ != col_idx_)
    throw DimensionMismatch("matrix patterns differ");
  SparseMatrix out = *this;
  for (Index k = 0; k < values_.size(); ++k)
    out.values_[k] += other.values_[k];
  return out;
}

double SparseMatrix::max_abs() const
{
  double m = 0.0;
  for (double v : values_)
    m = std::max(m, std::abs(v));
  return m;
}

bool SparseMatrix::structurally_symmetric() const
{
  if (n_rows_ != n_cols_)
    return false;
  for (Index i = 0; i < n_rows_; ++i)
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      if (find(col_idx_[k], i) == invalid_index)
        return false;
  return true;
}

double SparseMatrix::symmetry_defect() const
{
  double m = 0.0;
  for (Index i = 0; i < n_rows_; ++i)
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      m = std::max(m, std::abs(values_[k] - at(col_idx_[k], i)));
  return m;
}

double norm2(std::span<const double> v)
{
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size())
    throw DimensionMismatch("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

} // namespace goafem
