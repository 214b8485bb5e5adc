// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "sgdd/direct.hpp"
#include "sgdd/sparse.hpp"

namespace sgdd
{

struct AmgOptions
{
  /// Strength threshold on sign-filtered couplings.
  double theta = 0.25;
  /// Levels at or below this size are factored directly.
  int coarse_cutoff = 200;
  int max_levels = 25;
  /// Jacobi weight for operators whose Gershgorin bound on rho(D^-1 A) is at
  /// most 2. Larger bounds g scale it by 2 / g.
  double jacobi_omega = 2.0 / 3.0;
};

/// Classical Ruge-Stueben hierarchy applied as one V(1,1) cycle with damped
/// Jacobi smoothing and a zero initial guess.
class AmgHierarchy : public LinearOperator
{
public:
  explicit AmgHierarchy(const CsrMatrix &a, const AmgOptions &opts = {});

  int size() const override { return levels_.front().a.rows(); }
  void apply(std::span<const double> r, std::span<double> z) const override;

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const CsrMatrix &level_matrix(int l) const { return levels_[l].a; }
  /// Interpolation from level l + 1 to level l.
  const CsrMatrix &interpolation(int l) const { return levels_[l].p; }
  std::vector<int> level_sizes() const;
  /// Sum of nnz over levels divided by nnz of the finest operator.
  double operator_complexity() const;
  double grid_complexity() const;
  /// True when coarsening stopped because a level failed to shrink.
  bool stalled() const { return stalled_; }
  /// Jacobi weight used on level l.
  double smoothing_weight(int l) const { return levels_[l].omega; }

private:
  struct Level
  {
    CsrMatrix a;
    CsrMatrix p;
    CsrMatrix r;
    Vector inv_diag;
    double omega = 0.0;
  };

  void cycle(int l, std::span<const double> b, std::span<double> x) const;

  AmgOptions opts_;
  std::vector<Level> levels_;
  std::unique_ptr<SparseLu> coarse_;
  bool stalled_ = false;
};

/// C/F splitting (true = coarse) and interpolation for one level; exposed for tests.
struct AmgCoarsening
{
  std::vector<char> is_coarse;
  CsrMatrix p;
};

AmgCoarsening rs_coarsen(const CsrMatrix &a, double theta);

}  // namespace sgdd
