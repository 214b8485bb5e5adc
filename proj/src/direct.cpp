// SPDX-License-Identifier: Apache-2.0

#include "sgdd/direct.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "sgdd/errors.hpp"

namespace sgdd
{

struct SparseLu::Impl
{
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> matrix;
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>, Eigen::COLAMDOrdering<int>>
      lu;
};

SparseLu::SparseLu(const CsrMatrix &a) : n_(a.rows()), impl_(std::make_unique<Impl>())
{
  if (!a.square())
  {
    throw std::invalid_argument("SparseLu: matrix must be square");
  }
  using RowMajor = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
  const Eigen::Map<const RowMajor> view(a.rows(), a.cols(), static_cast<int>(a.nnz()),
                                        a.row_ptr().data(), a.col_idx().data(),
                                        a.values().data());
  impl_->matrix = view;
  impl_->matrix.makeCompressed();
  impl_->lu.analyzePattern(impl_->matrix);
  impl_->lu.factorize(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success)
  {
    throw SingularMatrixError("SparseLu: factorization failed: " + impl_->lu.lastErrorMessage());
  }
  // SparseLU reports exact zero pivots only; catch numerically singular ones too.
  const double log_det = impl_->lu.logAbsDeterminant();
  if (!std::isfinite(log_det))
  {
    throw SingularMatrixError("SparseLu: matrix is singular");
  }
}

SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu &&) noexcept = default;
SparseLu &SparseLu::operator=(SparseLu &&) noexcept = default;

void SparseLu::apply(std::span<const double> x, std::span<double> y) const
{
  const Eigen::Map<const Eigen::VectorXd> rhs(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXd> out(y.data(), static_cast<Eigen::Index>(y.size()));
  out = impl_->lu.solve(rhs);
}

Vector SparseLu::solve(std::span<const double> b) const
{
  Vector x(n_);
  apply(b, x);
  return x;
}

}  // namespace sgdd
