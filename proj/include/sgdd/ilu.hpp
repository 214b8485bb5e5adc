// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sgdd/sparse.hpp"

namespace sgdd
{

/// Incomplete LU factorization with zero fill: L (unit lower) and U share
/// the sparsity pattern of A. Throws ZeroPivotError naming the failing row.
class Ilu0 : public LinearOperator
{
public:
  explicit Ilu0(const CsrMatrix &a);

  int size() const override { return n_; }
  /// y = (LU)^{-1} x.
  void apply(std::span<const double> x, std::span<double> y) const override;

private:
  int n_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<int> diag_pos_;
  std::vector<double> lu_;
};

}  // namespace sgdd
