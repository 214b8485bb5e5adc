// SPDX-License-Identifier: Apache-2.0

#include "sgdd/dd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "sgdd/ilu.hpp"
#include "sgdd/parallel.hpp"

namespace sgdd
{

Partition::Partition(int nblocks, int overlap, int grid_rows, int grid_cols,
                     std::vector<int> owner, std::vector<Subdomain> subs)
  : nblocks_(nblocks), overlap_(overlap), grid_rows_(grid_rows), grid_cols_(grid_cols),
    owner_(std::move(owner)), subs_(std::move(subs))
{
}

void Partition::write_csv(const std::filesystem::path &path) const
{
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<int> count(num_dofs(), 0);
  for (const auto &s : subs_)
  {
    for (int d : s.dofs)
    {
      ++count[d];
    }
  }
  out << "dof,node,owner,count\n";
  for (int d = 0; d < num_dofs(); ++d)
  {
    out << d << ',' << d / nblocks_ << ',' << owner_[d / nblocks_] << ',' << count[d] << '\n';
  }
}

Partition partition_overlap(const TriMesh &mesh, int nblocks, int nsub, int overlap)
{
  if (nsub < 1)
  {
    throw std::invalid_argument("partition_overlap: nsub must be >= 1");
  }
  if (overlap < 0)
  {
    throw std::invalid_argument("partition_overlap: overlap must be >= 0");
  }
  if (nblocks < 1)
  {
    throw std::invalid_argument("partition_overlap: nblocks must be >= 1");
  }
  int r = 1;
  for (int d = 1; d * d <= nsub; ++d)
  {
    if (nsub % d == 0)
    {
      r = d;
    }
  }
  const int c = nsub / r;
  const int nvert = mesh.resolution() + 1;
  if (c > nvert || r > nvert)
  {
    throw std::invalid_argument("partition_overlap: " + std::to_string(nsub) +
                                " subdomains need a " + std::to_string(r) + "x" +
                                std::to_string(c) + " layout but the mesh has only " +
                                std::to_string(nvert) + " vertex rows");
  }

  const int nv = mesh.num_vertices();
  std::vector<int> owner(nv);
  for (int j = 0; j < nvert; ++j)
  {
    const int by = static_cast<int>(static_cast<long>(j) * r / nvert);
    for (int i = 0; i < nvert; ++i)
    {
      const int bx = static_cast<int>(static_cast<long>(i) * c / nvert);
      owner[mesh.vertex_index(i, j)] = by * c + bx;
    }
  }

  std::vector<Subdomain> subs(nsub);
  std::vector<int> stamp(nv, -1);
  for (int s = 0; s < nsub; ++s)
  {
    std::vector<int> nodes;
    for (int v = 0; v < nv; ++v)
    {
      if (owner[v] == s)
      {
        nodes.push_back(v);
        stamp[v] = s;
      }
    }
    for (int layer = 0; layer < overlap; ++layer)
    {
      const std::size_t count = nodes.size();
      for (std::size_t q = 0; q < count; ++q)
      {
        for (int w : mesh.neighbours(nodes[q]))
        {
          if (stamp[w] != s)
          {
            stamp[w] = s;
            nodes.push_back(w);
          }
        }
      }
    }
    std::sort(nodes.begin(), nodes.end());
    Subdomain &sd = subs[s];
    sd.dofs.reserve(nodes.size() * nblocks);
    sd.owned.reserve(nodes.size() * nblocks);
    for (int v : nodes)
    {
      for (int k = 0; k < nblocks; ++k)
      {
        sd.dofs.push_back(v * nblocks + k);
        sd.owned.push_back(owner[v] == s ? 1 : 0);
      }
    }
    sd.nodes = std::move(nodes);
  }
  return Partition(nblocks, overlap, r, c, std::move(owner), std::move(subs));
}

RasPreconditioner::RasPreconditioner(const CsrMatrix &a, Partition partition, LocalSolver local)
  : n_(a.rows()), partition_(std::move(partition))
{
  if (!a.square() || partition_.num_dofs() != n_)
  {
    throw std::invalid_argument("RasPreconditioner: partition has " +
                                std::to_string(partition_.num_dofs()) + " dofs, matrix has " +
                                std::to_string(n_));
  }
  local_.resize(partition_.nsub());
  for (int s = 0; s < partition_.nsub(); ++s)
  {
    const CsrMatrix as = submatrix(a, partition_[s].dofs);
    if (local == LocalSolver::Lu)
    {
      local_[s] = std::make_unique<SparseLu>(as);
    }
    else
    {
      local_[s] = std::make_unique<Ilu0>(as);
    }
  }
}

RasPreconditioner::~RasPreconditioner() = default;
RasPreconditioner::RasPreconditioner(RasPreconditioner &&) noexcept = default;

void RasPreconditioner::apply(std::span<const double> r, std::span<double> z) const
{
  if (static_cast<int>(r.size()) != n_ || static_cast<int>(z.size()) != n_)
  {
    throw std::invalid_argument("RasPreconditioner::apply: dimension mismatch");
  }
  const int ns = partition_.nsub();
  std::vector<Vector> out(ns);
#pragma omp parallel for schedule(dynamic, 1) if (ns > 1)
  for (int s = 0; s < ns; ++s)
  {
    const auto &dofs = partition_[s].dofs;
    Vector rl(dofs.size());
    for (std::size_t q = 0; q < dofs.size(); ++q)
    {
      rl[q] = r[dofs[q]];
    }
    out[s].resize(dofs.size());
    local_[s]->apply(rl, out[s]);
  }
  std::fill(z.begin(), z.end(), 0.0);
  for (int s = 0; s < ns; ++s)
  {
    const auto &sd = partition_[s];
    for (std::size_t q = 0; q < sd.dofs.size(); ++q)
    {
      if (sd.owned[q])
      {
        z[sd.dofs[q]] += out[s][q];
      }
    }
  }
}

double default_coarse_tol(CoarseVariant v)
{
  switch (v)
  {
    case CoarseVariant::GmresRas:
      return 1e-2;
    case CoarseVariant::GmresAmg:
      return 1e-5;
    default:
      return 0.0;
  }
}

CsrMatrix block_restriction(const CsrMatrix &interp, int nblocks)
{
  std::vector<Triplet> trip;
  trip.reserve(interp.nnz() * nblocks);
  const auto rp = interp.row_ptr();
  const auto ci = interp.col_idx();
  const auto v = interp.values();
  for (int f = 0; f < interp.rows(); ++f)
  {
    for (int p = rp[f]; p < rp[f + 1]; ++p)
    {
      for (int k = 0; k < nblocks; ++k)
      {
        trip.push_back({ci[p] * nblocks + k, f * nblocks + k, v[p]});
      }
    }
  }
  return CsrMatrix::from_triplets(interp.cols() * nblocks, interp.rows() * nblocks,
                                  std::move(trip));
}

TwoGridPreconditioner::TwoGridPreconditioner(const CsrMatrix &a, const NestedPair &pair,
                                             int nblocks, int nsub, int overlap,
                                             const TwoGridOptions &opts)
  : a_(a), opts_(opts), coarse_tol_(opts.coarse_tol.value_or(default_coarse_tol(opts.variant)))
{
  if (a.rows() != pair.fine.num_vertices() * nblocks)
  {
    throw std::invalid_argument("TwoGridPreconditioner: matrix size " + std::to_string(a.rows()) +
                                " does not match the fine mesh");
  }
  if (opts_.variant != CoarseVariant::Lu && !(coarse_tol_ > 0.0 && coarse_tol_ < 1.0))
  {
    throw std::invalid_argument("TwoGridPreconditioner: coarse tolerance must lie in (0, 1)");
  }
  smoother_ = std::make_unique<RasPreconditioner>(
      a, partition_overlap(pair.fine, nblocks, nsub, overlap), opts_.local);
  r0_ = block_restriction(interpolation_matrix(pair), nblocks);
  p0_ = r0_.transpose();
  ac_ = triple_product(r0_, a, p0_);
  switch (opts_.variant)
  {
    case CoarseVariant::Lu:
      lu_ = std::make_unique<SparseLu>(ac_);
      break;
    case CoarseVariant::GmresRas:
      coarse_ras_ = std::make_unique<RasPreconditioner>(
          ac_, partition_overlap(pair.coarse, nblocks, nsub, overlap), LocalSolver::Ilu0);
      break;
    case CoarseVariant::GmresAmg:
      amg_ = std::make_unique<AmgHierarchy>(ac_, opts_.amg);
      break;
  }
}

TwoGridPreconditioner::~TwoGridPreconditioner() = default;

void TwoGridPreconditioner::coarse_solve(std::span<const double> rc, std::span<double> ec) const
{
  if (lu_)
  {
    lu_->apply(rc, ec);
    ++stats_.solves;
    return;
  }
  std::fill(ec.begin(), ec.end(), 0.0);
  KrylovConfig cfg;
  cfg.rel_tol = coarse_tol_;
  cfg.max_iters = opts_.coarse_max_iters;
  MatrixOperator op(ac_);
  const LinearOperator *pc =
      coarse_ras_ ? static_cast<const LinearOperator *>(coarse_ras_.get()) : amg_.get();
  const auto res = gmres(op, rc, ec, pc, cfg);
  ++stats_.solves;
  stats_.iterations += res.iterations;
  if (!res.converged)
  {
    ++stats_.failures;
  }
}

void TwoGridPreconditioner::apply(std::span<const double> r, std::span<double> z) const
{
  const int n = size();
  if (static_cast<int>(r.size()) != n || static_cast<int>(z.size()) != n)
  {
    throw std::invalid_argument("TwoGridPreconditioner::apply: dimension mismatch");
  }
  Vector res(n), corr(n);
  smoother_->apply(r, z);

  a_.multiply(z, res);
  for (int i = 0; i < n; ++i)
  {
    res[i] = r[i] - res[i];
  }
  Vector rc(r0_.rows()), ec(r0_.rows());
  r0_.multiply(res, rc);
  coarse_solve(rc, ec);
  p0_.multiply(ec, corr);
  axpy(1.0, corr, z);

  a_.multiply(z, res);
  for (int i = 0; i < n; ++i)
  {
    res[i] = r[i] - res[i];
  }
  smoother_->apply(res, corr);
  axpy(1.0, corr, z);
}

}  // namespace sgdd
