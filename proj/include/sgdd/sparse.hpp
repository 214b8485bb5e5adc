// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace sgdd
{

using Vector = std::vector<double>;

struct Triplet
{
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix. Column indices are sorted within each row
/// and never duplicated; explicit zeros are allowed.
class CsrMatrix
{
public:
  CsrMatrix() = default;
  CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
            std::vector<double> values);

  static CsrMatrix identity(int n);
  /// Duplicate (row, col) pairs are summed.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return col_idx_.size(); }
  bool square() const { return rows_ == cols_; }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Entry (i, j), zero when not stored.
  double at(int i, int j) const;
  /// Storage position of (i, j) or -1.
  std::ptrdiff_t find(int i, int j) const;

  std::vector<double> diagonal() const;
  CsrMatrix transpose() const;

  /// y = A x. Rows are processed in parallel; each row sum is serial.
  void multiply(std::span<const double> x, std::span<double> y) const;

  /// Dense row-major copy, for tests and small oracles.
  std::vector<double> to_dense() const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

Vector spmv(const CsrMatrix &a, std::span<const double> x);

/// C = A B.
CsrMatrix multiply(const CsrMatrix &a, const CsrMatrix &b);

/// R A P, evaluated as R (A P).
CsrMatrix triple_product(const CsrMatrix &r, const CsrMatrix &a, const CsrMatrix &p);

/// Principal submatrix on the sorted index set `idx`.
CsrMatrix submatrix(const CsrMatrix &a, std::span<const int> idx);

/// Abstract linear map x -> y of fixed dimension.
class LinearOperator
{
public:
  virtual ~LinearOperator() = default;
  virtual int size() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
};

class MatrixOperator : public LinearOperator
{
public:
  explicit MatrixOperator(const CsrMatrix &a) : a_(a) {}
  int size() const override { return a_.rows(); }
  void apply(std::span<const double> x, std::span<double> y) const override
  {
    a_.multiply(x, y);
  }

private:
  const CsrMatrix &a_;
};

class IdentityOperator : public LinearOperator
{
public:
  explicit IdentityOperator(int n) : n_(n) {}
  int size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

private:
  int n_;
};

void write_matrix_market(const CsrMatrix &a, const std::filesystem::path &path);
CsrMatrix read_matrix_market(const std::filesystem::path &path);

}  // namespace sgdd
