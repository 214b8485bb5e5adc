// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "sgdd/amg.hpp"
#include "sgdd/direct.hpp"
#include "sgdd/krylov.hpp"
#include "sgdd/mesh.hpp"
#include "sgdd/sparse.hpp"

namespace sgdd
{

enum class LocalSolver
{
  Ilu0,
  Lu
};

struct Subdomain
{
  /// Sorted mesh vertices, overlap included.
  std::vector<int> nodes;
  /// Sorted dof indices; every chaos coefficient of a node is included.
  std::vector<int> dofs;
  /// Ownership weight per local dof (0 or 1).
  std::vector<char> owned;
};

/// Overlapping node-blocked partition of a structured mesh. Each node is
/// owned by the subdomain whose core block contains it.
class Partition
{
public:
  Partition(int nblocks, int overlap, int grid_rows, int grid_cols, std::vector<int> owner,
            std::vector<Subdomain> subs);

  int nsub() const { return static_cast<int>(subs_.size()); }
  int overlap() const { return overlap_; }
  int nblocks() const { return nblocks_; }
  int grid_rows() const { return grid_rows_; }
  int grid_cols() const { return grid_cols_; }
  int num_nodes() const { return static_cast<int>(owner_.size()); }
  int num_dofs() const { return num_nodes() * nblocks_; }
  const Subdomain &operator[](int i) const { return subs_[i]; }
  const std::vector<Subdomain> &subdomains() const { return subs_; }
  int owner(int node) const { return owner_[node]; }

  /// CSV with columns dof, node, owner, count (subdomains containing the dof).
  void write_csv(const std::filesystem::path &path) const;

private:
  int nblocks_;
  int overlap_;
  int grid_rows_;
  int grid_cols_;
  std::vector<int> owner_;
  std::vector<Subdomain> subs_;
};

/// r x c block layout of the vertex grid with r the largest divisor of nsub
/// not exceeding sqrt(nsub), grown by `overlap` element layers.
Partition partition_overlap(const TriMesh &mesh, int nblocks, int nsub, int overlap);

/// One-level restricted additive Schwarz: z = sum_i R_i^T D_i A_i^{-1} R_i r.
class RasPreconditioner : public LinearOperator
{
public:
  RasPreconditioner(const CsrMatrix &a, Partition partition,
                    LocalSolver local = LocalSolver::Ilu0);
  ~RasPreconditioner() override;
  RasPreconditioner(RasPreconditioner &&) noexcept;

  int size() const override { return n_; }
  void apply(std::span<const double> r, std::span<double> z) const override;
  const Partition &partition() const { return partition_; }

private:
  int n_;
  Partition partition_;
  std::vector<std::unique_ptr<LinearOperator>> local_;
};

enum class CoarseVariant
{
  /// Exact sparse LU.
  Lu,
  /// Inner GMRES with a one-level RAS (ILU(0)) preconditioner.
  GmresRas,
  /// Inner GMRES with an AMG V-cycle preconditioner.
  GmresAmg
};

double default_coarse_tol(CoarseVariant v);

struct TwoGridOptions
{
  CoarseVariant variant = CoarseVariant::GmresAmg;
  LocalSolver local = LocalSolver::Ilu0;
  std::optional<double> coarse_tol;
  int coarse_max_iters = 100;
  AmgOptions amg;
};

struct CoarseStats
{
  long solves = 0;
  long iterations = 0;
  long failures = 0;

  double mean_iterations() const
  {
    return solves == 0 ? 0.0 : static_cast<double>(iterations) / static_cast<double>(solves);
  }
};

/// Block-extended restriction (coarse x fine) from a scalar fine x coarse
/// interpolation matrix.
CsrMatrix block_restriction(const CsrMatrix &interp, int nblocks);

/// Two-grid Schwarz preconditioner: RAS pre-smoothing, Galerkin coarse
/// correction, RAS post-smoothing. Holds a reference to `a`, which must
/// outlive the preconditioner.
class TwoGridPreconditioner : public LinearOperator
{
public:
  TwoGridPreconditioner(const CsrMatrix &a, const NestedPair &pair, int nblocks, int nsub,
                        int overlap, const TwoGridOptions &opts = {});
  ~TwoGridPreconditioner() override;

  int size() const override { return a_.rows(); }
  void apply(std::span<const double> r, std::span<double> z) const override;

  const RasPreconditioner &smoother() const { return *smoother_; }
  const CsrMatrix &restriction() const { return r0_; }
  const CsrMatrix &coarse_matrix() const { return ac_; }
  const AmgHierarchy *amg() const { return amg_.get(); }
  CoarseVariant variant() const { return opts_.variant; }
  double coarse_tol() const { return coarse_tol_; }

  CoarseStats stats() const { return stats_; }
  void reset_stats() const { stats_ = {}; }

  /// Coarse solve used inside apply, exposed for tests.
  void coarse_solve(std::span<const double> rc, std::span<double> ec) const;

private:
  const CsrMatrix &a_;
  TwoGridOptions opts_;
  double coarse_tol_;
  std::unique_ptr<RasPreconditioner> smoother_;
  CsrMatrix r0_;
  CsrMatrix p0_;
  CsrMatrix ac_;
  std::unique_ptr<SparseLu> lu_;
  std::unique_ptr<RasPreconditioner> coarse_ras_;
  std::unique_ptr<AmgHierarchy> amg_;
  mutable CoarseStats stats_;
};

}  // namespace sgdd
