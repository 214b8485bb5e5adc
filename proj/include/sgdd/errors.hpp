// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sgdd
{

// Numerical failure inside a factorization or solve (as opposed to bad input,
// which is reported with std::invalid_argument).
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ZeroPivotError : public NumericalError
{
public:
  ZeroPivotError(int row)
    : NumericalError("zero pivot in row " + std::to_string(row)), row_(row)
  {
  }
  int row() const { return row_; }

private:
  int row_;
};

class SingularMatrixError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

}  // namespace sgdd
