// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "sgdd/sparse.hpp"

namespace sgdd
{

/// Exact sparse LU with a fill-reducing column ordering. Throws
/// SingularMatrixError when the matrix is numerically singular.
class SparseLu : public LinearOperator
{
public:
  explicit SparseLu(const CsrMatrix &a);
  ~SparseLu() override;
  SparseLu(SparseLu &&) noexcept;
  SparseLu &operator=(SparseLu &&) noexcept;

  int size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;
  Vector solve(std::span<const double> b) const;

private:
  struct Impl;
  int n_ = 0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sgdd
