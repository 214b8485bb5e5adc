// SPDX-License-Identifier: Apache-2.0

#include "sgdd/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgdd/parallel.hpp"

namespace sgdd
{

void KrylovConfig::validate() const
{
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
  {
    throw std::invalid_argument("KrylovConfig: rel_tol must lie in (0, 1)");
  }
  if (restart < 1)
  {
    throw std::invalid_argument("KrylovConfig: restart must be >= 1");
  }
  if (max_iters < 0)
  {
    throw std::invalid_argument("KrylovConfig: max_iters must be >= 0");
  }
}

namespace
{

void givens(double a, double b, double &c, double &s)
{
  if (b == 0.0)
  {
    c = 1.0;
    s = 0.0;
  }
  else if (std::abs(b) > std::abs(a))
  {
    const double t = a / b;
    s = 1.0 / std::sqrt(1.0 + t * t);
    c = s * t;
  }
  else
  {
    const double t = b / a;
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = c * t;
  }
}

void residual(const LinearOperator &a, std::span<const double> b, std::span<const double> x,
              std::span<double> r)
{
  a.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i)
  {
    r[i] = b[i] - r[i];
  }
}

KrylovResult gmres_impl(const LinearOperator &a, std::span<const double> b, std::span<double> x,
                        const LinearOperator *precond, const KrylovConfig &cfg, bool flexible)
{
  cfg.validate();
  const int n = a.size();
  if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
  {
    throw std::invalid_argument("gmres: dimension mismatch");
  }
  if (precond && precond->size() != n)
  {
    throw std::invalid_argument("gmres: preconditioner dimension mismatch");
  }

  KrylovResult res;
  const double bnorm = norm2(b);
  if (bnorm == 0.0)
  {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    res.residual_history.push_back(0.0);
    return res;
  }

  const int m = cfg.restart;
  Vector r(n), w(n), z(n);
  std::vector<Vector> v;
  std::vector<Vector> zs;
  std::vector<double> h(static_cast<std::size_t>(m + 1) * m, 0.0);
  std::vector<double> cs(m), sn(m), g(m + 1), y(m);
  auto H = [&](int i, int j) -> double & { return h[static_cast<std::size_t>(j) * (m + 1) + i]; };

  residual(a, b, x, r);
  double beta = norm2(r);
  res.rel_residual = beta / bnorm;
  res.residual_history.push_back(res.rel_residual);
  if (res.rel_residual <= cfg.rel_tol)
  {
    res.converged = true;
    return res;
  }

  while (res.iterations < cfg.max_iters)
  {
    v.assign(1, r);
    scale(1.0 / beta, v[0]);
    if (flexible)
    {
      zs.clear();
    }
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int k = 0;
    bool stop = false;
    for (int j = 0; j < m; ++j)
    {
      if (precond)
      {
        precond->apply(v[j], z);
      }
      else
      {
        z = v[j];
      }
      a.apply(z, w);
      if (flexible)
      {
        zs.push_back(z);
      }
      const double wnorm0 = norm2(w);
      for (int i = 0; i <= j; ++i)
      {
        H(i, j) = dot(w, v[i]);
        axpy(-H(i, j), v[i], w);
      }
      const double hnext = norm2(w);
      H(j + 1, j) = hnext;
      for (int i = 0; i < j; ++i)
      {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      givens(H(j, j), H(j + 1, j), cs[j], sn[j]);
      H(j, j) = cs[j] * H(j, j) + sn[j] * H(j + 1, j);
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      ++res.iterations;
      k = j + 1;
      const double est = std::abs(g[j + 1]) / bnorm;
      res.residual_history.push_back(est);

      const bool broke = hnext <= 1e-14 * std::max(wnorm0, std::numeric_limits<double>::min());
      if (broke)
      {
        res.breakdown = true;
      }
      if (broke || est <= cfg.rel_tol || res.iterations >= cfg.max_iters)
      {
        stop = true;
        break;
      }
      v.push_back(w);
      scale(1.0 / hnext, v.back());
    }

    // Back substitution for the least-squares coefficients.
    for (int i = k - 1; i >= 0; --i)
    {
      double s = g[i];
      for (int j = i + 1; j < k; ++j)
      {
        s -= H(i, j) * y[j];
      }
      y[i] = s / H(i, i);
    }
    if (flexible)
    {
      for (int j = 0; j < k; ++j)
      {
        axpy(y[j], zs[j], x);
      }
    }
    else
    {
      std::fill(w.begin(), w.end(), 0.0);
      for (int j = 0; j < k; ++j)
      {
        axpy(y[j], v[j], w);
      }
      if (precond)
      {
        precond->apply(w, z);
      }
      else
      {
        z = w;
      }
      axpy(1.0, z, x);
    }

    residual(a, b, x, r);
    beta = norm2(r);
    res.rel_residual = beta / bnorm;
    if (res.rel_residual <= cfg.rel_tol)
    {
      res.converged = true;
      res.breakdown = false;
      break;
    }
    if (res.breakdown)
    {
      break;
    }
    if (stop && res.iterations >= cfg.max_iters)
    {
      break;
    }
  }
  return res;
}

}  // namespace

KrylovResult gmres(const LinearOperator &a, std::span<const double> b, std::span<double> x,
                   const LinearOperator *precond, const KrylovConfig &cfg)
{
  return gmres_impl(a, b, x, precond, cfg, false);
}

KrylovResult fgmres(const LinearOperator &a, std::span<const double> b, std::span<double> x,
                    const LinearOperator *precond, const KrylovConfig &cfg)
{
  return gmres_impl(a, b, x, precond, cfg, true);
}

}  // namespace sgdd
