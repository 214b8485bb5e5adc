// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sgdd/sparse.hpp"

namespace sgdd
{

struct KrylovConfig
{
  /// Stop when ||b - A x|| / ||b|| <= rel_tol.
  double rel_tol = 1e-5;
  int max_iters = 1000;
  int restart = 200;

  void validate() const;
};

struct KrylovResult
{
  int iterations = 0;
  bool converged = false;
  /// Arnoldi breakdown before reaching the tolerance.
  bool breakdown = false;
  /// True relative residual at exit.
  double rel_residual = 0.0;
  /// Relative residual estimate after each iteration; entry 0 is the initial residual.
  std::vector<double> residual_history;
};

/// Right-preconditioned restarted GMRES. `x` holds the initial guess on entry
/// and the iterate on exit. `precond` may be null (identity) and must be a
/// fixed linear operator.
KrylovResult gmres(const LinearOperator &a, std::span<const double> b, std::span<double> x,
                   const LinearOperator *precond, const KrylovConfig &cfg);

/// Flexible GMRES: stores the preconditioned basis so the preconditioner may
/// change between iterations (e.g. inner iterative solves).
KrylovResult fgmres(const LinearOperator &a, std::span<const double> b, std::span<double> x,
                    const LinearOperator *precond, const KrylovConfig &cfg);

}  // namespace sgdd
