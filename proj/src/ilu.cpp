// SPDX-License-Identifier: Apache-2.0

#include "sgdd/ilu.hpp"

#include <cmath>
#include <stdexcept>

#include "sgdd/errors.hpp"

namespace sgdd
{

Ilu0::Ilu0(const CsrMatrix &a)
  : n_(a.rows()), row_ptr_(a.row_ptr().begin(), a.row_ptr().end()),
    col_idx_(a.col_idx().begin(), a.col_idx().end()), diag_pos_(a.rows(), -1),
    lu_(a.values().begin(), a.values().end())
{
  if (!a.square())
  {
    throw std::invalid_argument("Ilu0: matrix must be square");
  }
  for (int i = 0; i < n_; ++i)
  {
    const auto p = a.find(i, i);
    if (p < 0)
    {
      throw ZeroPivotError(i);
    }
    diag_pos_[i] = static_cast<int>(p);
  }

  std::vector<int> pos(n_, -1);
  for (int i = 0; i < n_; ++i)
  {
    const int begin = row_ptr_[i], end = row_ptr_[i + 1];
    for (int p = begin; p < end; ++p)
    {
      pos[col_idx_[p]] = p;
    }
    for (int p = begin; p < end && col_idx_[p] < i; ++p)
    {
      const int k = col_idx_[p];
      const double lik = lu_[p] / lu_[diag_pos_[k]];
      lu_[p] = lik;
      for (int q = diag_pos_[k] + 1; q < row_ptr_[k + 1]; ++q)
      {
        const int target = pos[col_idx_[q]];
        if (target >= 0)
        {
          lu_[target] -= lik * lu_[q];
        }
      }
    }
    const double d = lu_[diag_pos_[i]];
    if (d == 0.0 || !std::isfinite(d))
    {
      throw ZeroPivotError(i);
    }
    for (int p = begin; p < end; ++p)
    {
      pos[col_idx_[p]] = -1;
    }
  }
}

void Ilu0::apply(std::span<const double> x, std::span<double> y) const
{
  for (int i = 0; i < n_; ++i)
  {
    double s = x[i];
    for (int p = row_ptr_[i]; p < diag_pos_[i]; ++p)
    {
      s -= lu_[p] * y[col_idx_[p]];
    }
    y[i] = s;
  }
  for (int i = n_ - 1; i >= 0; --i)
  {
    double s = y[i];
    for (int p = diag_pos_[i] + 1; p < row_ptr_[i + 1]; ++p)
    {
      s -= lu_[p] * y[col_idx_[p]];
    }
    y[i] = s / lu_[diag_pos_[i]];
  }
}

}  // namespace sgdd
