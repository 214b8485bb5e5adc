// SPDX-License-Identifier: Apache-2.0

#include "sgdd/mcs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>

#include "sgdd/amg.hpp"
#include "sgdd/assembly.hpp"
#include "sgdd/errors.hpp"
#include "sgdd/krylov.hpp"
#include "sgdd/parallel.hpp"
#include "sgdd/randomfield.hpp"

namespace sgdd
{

namespace
{

struct SampleOutcome
{
  Vector u;
  int linear_iterations = 0;
  int picard_iterations = 0;
};

struct SampleContext
{
  const TriMesh &mesh;
  const BCSpec &bc;
  const Vector &f;
  const RunConfig &cfg;
  double rel_tol;
  int max_picard;
};

int gmres_solve(const SampleContext &ctx, const CsrMatrix &a, const Vector &b, Vector &x,
                const LinearOperator *pc)
{
  KrylovConfig kc;
  kc.rel_tol = ctx.rel_tol;
  kc.max_iters = 2000;
  MatrixOperator op(a);
  const auto res = gmres(op, b, x, pc, kc);
  if (!res.converged)
  {
    throw NumericalError("GMRES stopped at relative residual " + std::to_string(res.rel_residual));
  }
  return res.iterations;
}

// Linear: one solve from zero. Nonlinear: Picard on q = c (1 + u) from u_start.
SampleOutcome solve_sample(const SampleContext &ctx, const Vector &c, const LinearOperator *pc,
                           bool nonlinear, const Vector *u_start)
{
  SampleOutcome out;
  const int n = ctx.mesh.num_vertices();
  if (!nonlinear)
  {
    const auto sys = assemble_deterministic(ctx.mesh, c, ctx.f, ctx.bc);
    out.u.assign(n, 0.0);
    out.linear_iterations = gmres_solve(ctx, sys.matrix, sys.rhs, out.u, pc);
    return out;
  }
  Vector u = u_start ? *u_start : Vector(n, 0.0);
  for (int it = 1; it <= ctx.max_picard; ++it)
  {
    const auto sys = assemble_deterministic(ctx.mesh, picard_coefficient(c, u, 1), ctx.f, ctx.bc);
    Vector x = u;
    out.linear_iterations += gmres_solve(ctx, sys.matrix, sys.rhs, x, pc);
    double diff = 0.0;
    for (int i = 0; i < n; ++i)
    {
      diff += (x[i] - u[i]) * (x[i] - u[i]);
    }
    diff = std::sqrt(diff);
    const double base = norm2(u);
    u = std::move(x);
    out.picard_iterations = it;
    if (diff == 0.0 || (base > 0.0 && diff / base <= ctx.cfg.picard_tol))
    {
      out.u = std::move(u);
      return out;
    }
  }
  throw NumericalError("Picard iteration did not converge in " + std::to_string(ctx.max_picard) +
                       " iterations");
}

}  // namespace

void Welford::add(std::span<const double> x)
{
  if (x.size() != mean_.size())
  {
    throw std::invalid_argument("Welford::add: dimension mismatch");
  }
  ++n_;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double d = x[i] - mean_[i];
    mean_[i] += d / static_cast<double>(n_);
    m2_[i] += d * (x[i] - mean_[i]);
  }
}

std::vector<double> Welford::variance() const
{
  std::vector<double> v(mean_.size(), 0.0);
  if (n_ < 2)
  {
    return v;
  }
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    v[i] = std::max(0.0, m2_[i] / static_cast<double>(n_ - 1));
  }
  return v;
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index)
{
  // splitmix64 of the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<double> draw_germ(std::uint64_t seed, std::uint64_t index, int M)
{
  std::mt19937_64 rng(sample_seed(seed, index));
  std::normal_distribution<double> normal;
  std::vector<double> xi(M);
  for (auto &x : xi)
  {
    x = normal(rng);
  }
  return xi;
}

std::vector<Point> default_probes()
{
  return {{0.5, 0.5}, {0.3, 0.7}, {0.25, 0.25}, {0.75, 0.25}, {0.7, 0.8}};
}

McsResult run_mcs(const RunConfig &cfg, int nsamples, std::uint64_t seed,
                  std::span<const Point> probes, const McsOptions &opts)
{
  cfg.validate();
  if (nsamples < 1)
  {
    throw std::invalid_argument("run_mcs: nsamples must be >= 1");
  }
  if (opts.batch < 1 || !(opts.rel_tol > 0.0 && opts.rel_tol < 1.0))
  {
    throw std::invalid_argument("run_mcs: invalid options");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const TriMesh mesh(cfg.mesh_n);
  const int nv = mesh.num_vertices();
  const auto kle = kle_2d({cfg.sigma, cfg.bx, cfg.by}, cfg.M, cfg.g0);
  const FieldSampler sampler(kle, mesh);
  const BCSpec bc = opts.pipeline.bc.value_or(default_bc());
  Vector f(nv, 0.0);
  if (opts.pipeline.source)
  {
    for (int v = 0; v < nv; ++v)
    {
      f[v] = opts.pipeline.source(mesh.vertices()[v]);
    }
  }
  const bool nonlinear = cfg.nonlinear();
  const SampleContext ctx{mesh, bc, f, cfg, opts.rel_tol, opts.pipeline.max_picard_iters};

  McsResult res;
  res.nsamples = nsamples;
  res.seed = seed;
  res.probes.assign(probes.begin(), probes.end());
  res.probe_samples.assign(probes.size(), std::vector<double>(nsamples));

  // Mean-field preconditioner and Picard starting point.
  std::unique_ptr<AmgHierarchy> amg;
  Vector u_mean;
  if (opts.solver == McsSolver::MeanFieldAmg)
  {
    Vector c0(nv);
    for (int v = 0; v < nv; ++v)
    {
      double s2 = 0.0;
      for (int k = 0; k < kle.size(); ++k)
      {
        const double g = kle.g(k, mesh.vertices()[v]);
        s2 += g * g;
      }
      c0[v] = std::exp(cfg.g0 + 0.5 * s2);
    }
    amg = std::make_unique<AmgHierarchy>(assemble_deterministic(mesh, c0, f, bc).matrix);
    if (nonlinear)
    {
      u_mean = solve_sample(ctx, c0, amg.get(), true, nullptr).u;
      amg = std::make_unique<AmgHierarchy>(
          assemble_deterministic(mesh, picard_coefficient(c0, u_mean, 1), f, bc).matrix);
    }
  }

  RunConfig sample_cfg = cfg;
  sample_cfg.problem =
      nonlinear ? ProblemKind::NonlinearDeterministic : ProblemKind::LinearDeterministic;

  Welford acc(nv);
  std::vector<SampleOutcome> batch(opts.batch);
  std::vector<std::exception_ptr> errors(opts.batch);
  for (int start = 0; start < nsamples; start += opts.batch)
  {
    const int count = std::min(opts.batch, nsamples - start);
#pragma omp parallel for schedule(dynamic, 1)
    for (int b = 0; b < count; ++b)
    {
      errors[b] = nullptr;
      try
      {
        const auto xi = draw_germ(seed, static_cast<std::uint64_t>(start + b), cfg.M);
        const Vector c = sampler.sample(xi);
        if (opts.solver == McsSolver::MeanFieldAmg)
        {
          batch[b] = solve_sample(ctx, c, amg.get(), nonlinear, nonlinear ? &u_mean : nullptr);
        }
        else
        {
          auto d = solve_deterministic(sample_cfg, c, nonlinear ? 1 : 0, opts.pipeline);
          if (!d.report.converged)
          {
            throw NumericalError(d.report.message.empty() ? "solve did not converge"
                                                          : d.report.message);
          }
          batch[b].u = std::move(d.u);
          batch[b].linear_iterations = d.report.outer_iterations;
          batch[b].picard_iterations = d.report.picard_iterations;
        }
      }
      catch (...)
      {
        errors[b] = std::current_exception();
      }
    }
    for (int b = 0; b < count; ++b)
    {
      if (errors[b])
      {
        try
        {
          std::rethrow_exception(errors[b]);
        }
        catch (const std::exception &e)
        {
          throw NumericalError("Monte Carlo sample " + std::to_string(start + b) + " (seed " +
                               std::to_string(seed) + ") failed: " + e.what());
        }
      }
      acc.add(batch[b].u);
      for (std::size_t p = 0; p < probes.size(); ++p)
      {
        res.probe_samples[p][start + b] = mesh.interpolate(batch[b].u, probes[p]);
      }
      res.linear_iterations += batch[b].linear_iterations;
      res.picard_iterations += batch[b].picard_iterations;
    }
  }
  res.mean = acc.mean();
  const auto var = acc.variance();
  res.std.resize(nv);
  for (int v = 0; v < nv; ++v)
  {
    res.std[v] = std::sqrt(var[v]);
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

double ks_distance(std::vector<double> a, std::vector<double> b)
{
  if (a.empty() || b.empty())
  {
    throw std::invalid_argument("ks_distance: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size())
  {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x)
    {
      ++i;
    }
    while (j < b.size() && b[j] <= x)
    {
      ++j;
    }
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

}  // namespace sgdd
