// SPDX-License-Identifier: Apache-2.0

#include "sgdd/amg.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "sgdd/errors.hpp"

namespace sgdd
{

namespace
{

enum : char
{
  kUndecided = 0,
  kCoarse = 1,
  kFine = 2
};

struct Strength
{
  std::vector<std::vector<int>> s;   // j in s[i]: i strongly depends on j
  std::vector<std::vector<int>> st;  // j in st[i]: j strongly depends on i
};

Strength strength(const CsrMatrix &a, std::span<const double> diag, double theta)
{
  const int n = a.rows();
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  Strength g{std::vector<std::vector<int>>(n), std::vector<std::vector<int>>(n)};
  for (int i = 0; i < n; ++i)
  {
    const double sgn = diag[i] >= 0.0 ? 1.0 : -1.0;
    double mx = 0.0;
    for (int p = rp[i]; p < rp[i + 1]; ++p)
    {
      if (ci[p] != i)
      {
        mx = std::max(mx, -sgn * v[p]);
      }
    }
    if (mx <= 0.0)
    {
      continue;
    }
    for (int p = rp[i]; p < rp[i + 1]; ++p)
    {
      if (ci[p] != i && -sgn * v[p] >= theta * mx)
      {
        g.s[i].push_back(ci[p]);
        g.st[ci[p]].push_back(i);
      }
    }
  }
  return g;
}

}  // namespace

AmgCoarsening rs_coarsen(const CsrMatrix &a, double theta)
{
  const int n = a.rows();
  const auto diag = a.diagonal();
  const auto g = strength(a, diag, theta);

  std::vector<char> state(n, kUndecided);
  std::vector<int> lambda(n);
  std::set<std::pair<int, int>> queue;
  for (int i = 0; i < n; ++i)
  {
    if (g.s[i].empty() && g.st[i].empty())
    {
      state[i] = kFine;
      continue;
    }
    lambda[i] = static_cast<int>(g.st[i].size());
    queue.insert({-lambda[i], i});
  }
  auto bump = [&](int k, int delta)
  {
    queue.erase({-lambda[k], k});
    lambda[k] += delta;
    queue.insert({-lambda[k], k});
  };

  while (!queue.empty())
  {
    const int i = queue.begin()->second;
    queue.erase(queue.begin());
    state[i] = kCoarse;
    for (int j : g.st[i])
    {
      if (state[j] != kUndecided)
      {
        continue;
      }
      state[j] = kFine;
      queue.erase({-lambda[j], j});
      for (int k : g.s[j])
      {
        if (state[k] == kUndecided)
        {
          bump(k, 1);
        }
      }
    }
    for (int k : g.s[i])
    {
      if (state[k] == kUndecided)
      {
        bump(k, -1);
      }
    }
  }

  // Second pass: strongly connected F points must share a C point.
  std::vector<int> mark(n, -1);
  for (int i = 0; i < n; ++i)
  {
    if (state[i] != kFine)
    {
      continue;
    }
    for (int k : g.s[i])
    {
      if (state[k] == kCoarse)
      {
        mark[k] = i;
      }
    }
    for (int j : g.s[i])
    {
      if (state[j] != kFine)
      {
        continue;
      }
      bool shared = false;
      for (int k : g.s[j])
      {
        if (state[k] == kCoarse && mark[k] == i)
        {
          shared = true;
          break;
        }
      }
      if (!shared)
      {
        state[j] = kCoarse;
        mark[j] = i;
      }
    }
  }

  std::vector<int> cindex(n, -1);
  int nc = 0;
  for (int i = 0; i < n; ++i)
  {
    if (state[i] == kCoarse)
    {
      cindex[i] = nc++;
    }
  }

  // Direct interpolation; same-sign couplings are lumped into the diagonal.
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  std::vector<Triplet> trip;
  std::vector<char> strong_c(n, 0);
  for (int i = 0; i < n; ++i)
  {
    if (state[i] == kCoarse)
    {
      trip.push_back({i, cindex[i], 1.0});
      continue;
    }
    for (int k : g.s[i])
    {
      if (state[k] == kCoarse)
      {
        strong_c[k] = 1;
      }
    }
    const double sgn = diag[i] >= 0.0 ? 1.0 : -1.0;
    double d = 0.0, neg_all = 0.0, neg_c = 0.0;
    for (int p = rp[i]; p < rp[i + 1]; ++p)
    {
      const int k = ci[p];
      if (k == i)
      {
        d += v[p];
      }
      else if (sgn * v[p] > 0.0)
      {
        d += v[p];
      }
      else
      {
        neg_all += v[p];
        if (strong_c[k])
        {
          neg_c += v[p];
        }
      }
    }
    if (neg_c != 0.0 && d != 0.0)
    {
      const double alpha = neg_all / neg_c;
      for (int p = rp[i]; p < rp[i + 1]; ++p)
      {
        const int k = ci[p];
        if (k != i && strong_c[k] && sgn * v[p] <= 0.0)
        {
          trip.push_back({i, cindex[k], -alpha * v[p] / d});
        }
      }
    }
    for (int k : g.s[i])
    {
      strong_c[k] = 0;
    }
  }
  AmgCoarsening out;
  out.is_coarse.resize(n);
  for (int i = 0; i < n; ++i)
  {
    out.is_coarse[i] = state[i] == kCoarse;
  }
  out.p = CsrMatrix::from_triplets(n, nc, std::move(trip));
  return out;
}

AmgHierarchy::AmgHierarchy(const CsrMatrix &a, const AmgOptions &opts) : opts_(opts)
{
  if (!a.square())
  {
    throw std::invalid_argument("AmgHierarchy: matrix must be square");
  }
  if (!(opts.theta > 0.0 && opts.theta < 1.0) || opts.coarse_cutoff < 1 || opts.max_levels < 1)
  {
    throw std::invalid_argument("AmgHierarchy: invalid options");
  }
  levels_.push_back({a, {}, {}, {}});
  while (levels_.back().a.rows() > opts.coarse_cutoff &&
         static_cast<int>(levels_.size()) < opts.max_levels)
  {
    Level &fine = levels_.back();
    auto cs = rs_coarsen(fine.a, opts.theta);
    const int n = fine.a.rows(), nc = cs.p.cols();
    if (nc == 0 || nc > 0.95 * n)
    {
      stalled_ = true;
      break;
    }
    fine.p = std::move(cs.p);
    fine.r = fine.p.transpose();
    CsrMatrix ac = triple_product(fine.r, fine.a, fine.p);
    levels_.push_back({std::move(ac), {}, {}, {}});
  }
  for (std::size_t l = 0; l + 1 < levels_.size(); ++l)
  {
    const auto d = levels_[l].a.diagonal();
    levels_[l].inv_diag.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
    {
      if (d[i] == 0.0)
      {
        throw ZeroPivotError(static_cast<int>(i));
      }
      levels_[l].inv_diag[i] = 1.0 / d[i];
    }
    const auto rp = levels_[l].a.row_ptr();
    const auto v = levels_[l].a.values();
    double bound = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
    {
      double s = 0.0;
      for (int p = rp[i]; p < rp[i + 1]; ++p)
      {
        s += std::abs(v[p]);
      }
      bound = std::max(bound, s / std::abs(d[i]));
    }
    levels_[l].omega = opts_.jacobi_omega * 2.0 / std::max(2.0, bound);
  }
  coarse_ = std::make_unique<SparseLu>(levels_.back().a);
}

std::vector<int> AmgHierarchy::level_sizes() const
{
  std::vector<int> s;
  for (const auto &l : levels_)
  {
    s.push_back(l.a.rows());
  }
  return s;
}

double AmgHierarchy::operator_complexity() const
{
  double total = 0.0;
  for (const auto &l : levels_)
  {
    total += static_cast<double>(l.a.nnz());
  }
  return total / static_cast<double>(levels_.front().a.nnz());
}

double AmgHierarchy::grid_complexity() const
{
  double total = 0.0;
  for (const auto &l : levels_)
  {
    total += l.a.rows();
  }
  return total / levels_.front().a.rows();
}

void AmgHierarchy::apply(std::span<const double> r, std::span<double> z) const
{
  if (static_cast<int>(r.size()) != size() || static_cast<int>(z.size()) != size())
  {
    throw std::invalid_argument("AmgHierarchy::apply: dimension mismatch");
  }
  cycle(0, r, z);
}

void AmgHierarchy::cycle(int l, std::span<const double> b, std::span<double> x) const
{
  if (l + 1 == num_levels())
  {
    coarse_->apply(b, x);
    return;
  }
  const Level &lv = levels_[l];
  const int n = lv.a.rows();
  const double w = lv.omega;
  for (int i = 0; i < n; ++i)
  {
    x[i] = w * lv.inv_diag[i] * b[i];
  }
  Vector res(n);
  lv.a.multiply(x, res);
  for (int i = 0; i < n; ++i)
  {
    res[i] = b[i] - res[i];
  }
  Vector bc(lv.r.rows()), xc(lv.r.rows());
  lv.r.multiply(res, bc);
  cycle(l + 1, bc, xc);
  lv.p.multiply(xc, res);
  for (int i = 0; i < n; ++i)
  {
    x[i] += res[i];
  }
  lv.a.multiply(x, res);
  for (int i = 0; i < n; ++i)
  {
    x[i] += w * lv.inv_diag[i] * (b[i] - res[i]);
  }
}

}  // namespace sgdd
