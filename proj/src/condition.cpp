// SPDX-License-Identifier: Apache-2.0

#include "sgdd/condition.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sgdd
{

std::vector<double> singular_values(const CsrMatrix &a)
{
  if (a.rows() > kMaxDenseDimension || a.cols() > kMaxDenseDimension)
  {
    throw std::invalid_argument("singular_values: dimension " + std::to_string(a.rows()) +
                                " exceeds the dense limit " +
                                std::to_string(kMaxDenseDimension));
  }
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (int i = 0; i < a.rows(); ++i)
  {
    for (int p = rp[i]; p < rp[i + 1]; ++p)
    {
      dense(i, ci[p]) = v[p];
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
  const auto &s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double condition_number(const CsrMatrix &a)
{
  if (!a.square() || a.rows() == 0)
  {
    throw std::invalid_argument("condition_number: matrix must be square and non-empty");
  }
  const auto s = singular_values(a);
  if (s.back() == 0.0)
  {
    return std::numeric_limits<double>::infinity();
  }
  return s.front() / s.back();
}

}  // namespace sgdd
