// SPDX-License-Identifier: Apache-2.0

#include "sgdd/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "sgdd/errors.hpp"
#include "sgdd/parallel.hpp"
#include "sgdd/randomfield.hpp"

namespace sgdd
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void pin_identity_rows(const CsrMatrix &a, std::span<const double> b, std::span<double> x)
{
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (int i = 0; i < a.rows(); ++i)
  {
    if (rp[i + 1] - rp[i] == 1 && ci[rp[i]] == i && v[rp[i]] == 1.0)
    {
      x[i] = b[i];
    }
  }
}

CoarseVariant coarse_variant(PreconditionerKind k)
{
  switch (k)
  {
    case PreconditionerKind::TwoGridLu:
      return CoarseVariant::Lu;
    case PreconditionerKind::TwoGridV2:
      return CoarseVariant::GmresRas;
    default:
      return CoarseVariant::GmresAmg;
  }
}

Vector nodal_source(const TriMesh &mesh, const SolverOptions &opts)
{
  Vector f(mesh.num_vertices(), 0.0);
  if (opts.source)
  {
    for (int v = 0; v < mesh.num_vertices(); ++v)
    {
      f[v] = opts.source(mesh.vertices()[v]);
    }
  }
  return f;
}

struct AssembledSystem
{
  CsrMatrix matrix;
  Vector rhs;
};

// Picard loop from u = 0; each linear solve starts from a zero guess.
Vector picard(const std::function<AssembledSystem(const Vector &)> &assemble, int n,
              const TriMesh &mesh, int nblocks, const RunConfig &cfg, const SolverOptions &opts,
              SolveReport &report)
{
  Vector u(n, 0.0), x(n);
  double prev_diff = std::numeric_limits<double>::infinity();
  int increases = 0;
  report.converged = false;
  for (int it = 1; it <= opts.max_picard_iters; ++it)
  {
    const AssembledSystem sys = assemble(u);
    std::fill(x.begin(), x.end(), 0.0);
    const auto kr = solve_linear_system(sys.matrix, sys.rhs, x, mesh, nblocks, cfg, opts, report);
    report.picard_iterations = it;
    double diff_sq = 0.0;
    for (int i = 0; i < n; ++i)
    {
      diff_sq += (x[i] - u[i]) * (x[i] - u[i]);
    }
    const double diff = std::sqrt(diff_sq);
    const double base = norm2(u);
    const double rel =
        base > 0.0 ? diff / base : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    report.picard_updates.push_back(diff);
    report.picard_rel_update = rel;
    u = x;
    if (!kr.converged)
    {
      report.message = "linear solve did not converge in Picard iteration " + std::to_string(it);
      return u;
    }
    if (rel <= cfg.picard_tol)
    {
      report.converged = true;
      return u;
    }
    increases = (it > 1 && diff > prev_diff) ? increases + 1 : 0;
    prev_diff = diff;
    if (increases >= 5)
    {
      report.stagnated = true;
      report.message = "Picard update norm increased 5 times in a row";
      return u;
    }
  }
  report.message = "Picard iteration limit reached";
  return u;
}

}  // namespace

double SolveReport::mean_outer_iterations() const
{
  if (outer_per_solve.empty())
  {
    return 0.0;
  }
  return static_cast<double>(outer_iterations) / static_cast<double>(outer_per_solve.size());
}

Vector SolutionPCE::mode(int j) const
{
  Vector m(num_nodes);
  for (int v = 0; v < num_nodes; ++v)
  {
    m[v] = at(v, j);
  }
  return m;
}

BCSpec default_bc() { return BCSpec::left_right(0.0, 1.0); }

std::unique_ptr<LinearOperator> make_preconditioner(const CsrMatrix &a, const TriMesh &mesh,
                                                    int nblocks, const RunConfig &cfg,
                                                    const SolverOptions &opts)
{
  if (cfg.preconditioner == PreconditionerKind::Ras1)
  {
    return std::make_unique<RasPreconditioner>(
        a, partition_overlap(mesh, nblocks, cfg.nsub, cfg.overlap), opts.local);
  }
  TwoGridOptions tg;
  tg.variant = coarse_variant(cfg.preconditioner);
  tg.local = opts.local;
  tg.coarse_tol = cfg.coarse_tol;
  const NestedPair pair = nested_pair_for_ratio(mesh.resolution(), cfg.coarse_ratio);
  return std::make_unique<TwoGridPreconditioner>(a, pair, nblocks, cfg.nsub, cfg.overlap, tg);
}

KrylovResult solve_linear_system(const CsrMatrix &a, std::span<const double> b,
                                 std::span<double> x, const TriMesh &mesh, int nblocks,
                                 const RunConfig &cfg, const SolverOptions &opts,
                                 SolveReport &report)
{
  auto t0 = Clock::now();
  const auto pc = make_preconditioner(a, mesh, nblocks, cfg, opts);
  report.pc_setup_seconds += seconds_since(t0);

  KrylovConfig kc;
  kc.rel_tol = cfg.outer_tol;
  kc.max_iters = opts.max_outer_iters;
  MatrixOperator op(a);
  t0 = Clock::now();
  const auto res = fgmres(op, b, x, pc.get(), kc);
  report.solve_seconds += seconds_since(t0);
  pin_identity_rows(a, b, x);

  report.outer_iterations += res.iterations;
  report.outer_per_solve.push_back(res.iterations);
  report.residual_history = res.residual_history;
  report.final_rel_residual = res.rel_residual;
  if (const auto *tg = dynamic_cast<const TwoGridPreconditioner *>(pc.get()))
  {
    const auto st = tg->stats();
    report.coarse_solves += st.solves;
    report.coarse_iterations += st.iterations;
    report.coarse_failures += st.failures;
    report.mean_coarse_iterations =
        report.coarse_solves == 0
            ? 0.0
            : static_cast<double>(report.coarse_iterations) / static_cast<double>(report.coarse_solves);
    if (tg->amg())
    {
      report.amg_level_sizes = tg->amg()->level_sizes();
    }
  }
  return res;
}

StochasticResult solve_linear_stochastic(const RunConfig &cfg, const SolverOptions &opts)
{
  cfg.validate();
  StochasticResult out{TriMesh(cfg.mesh_n), SolutionPCE{ChaosBasis(cfg.M, cfg.p_out), 0, {}}, {}};
  const TriMesh &mesh = out.mesh;
  const ChaosBasis in(cfg.M, cfg.p_in);
  const ChaosBasis &ob = out.solution.basis;
  const auto kle = kle_2d({cfg.sigma, cfg.bx, cfg.by}, cfg.M, cfg.g0);
  const auto pce = lognormal_pce(kle, in, mesh);
  const auto m = triple_tensor(in, ob);
  const BCSpec bc = opts.bc.value_or(default_bc());
  const Vector f = nodal_source(mesh, opts);
  const auto sys = assemble_stochastic_linear(mesh, pce, m, ob, f, bc);

  out.solution.num_nodes = mesh.num_vertices();
  out.solution.coeffs.assign(sys.size(), 0.0);
  const auto kr = solve_linear_system(sys.matrix, sys.rhs, out.solution.coeffs, mesh, ob.size(),
                                      cfg, opts, out.report);
  out.report.converged = kr.converged;
  if (!kr.converged)
  {
    out.report.message = "FGMRES did not reach the outer tolerance";
  }
  return out;
}

StochasticResult solve_nonlinear_stochastic(const RunConfig &cfg, const SolverOptions &opts)
{
  cfg.validate();
  StochasticResult out{TriMesh(cfg.mesh_n), SolutionPCE{ChaosBasis(cfg.M, cfg.p_out), 0, {}}, {}};
  const TriMesh &mesh = out.mesh;
  const ChaosBasis in(cfg.M, cfg.p_in);
  const ChaosBasis &ob = out.solution.basis;
  const auto kle = kle_2d({cfg.sigma, cfg.bx, cfg.by}, cfg.M, cfg.g0);
  const auto pce = lognormal_pce(kle, in, mesh);
  const auto m = triple_tensor(in, ob);
  const auto t = quad_tensor(in, ob);
  const BCSpec bc = opts.bc.value_or(default_bc());
  const Vector f = nodal_source(mesh, opts);

  const int n = mesh.num_vertices() * ob.size();
  auto assemble = [&](const Vector &u)
  {
    auto sys = assemble_stochastic_picard(mesh, pce, u, m, t, ob, f, bc);
    return AssembledSystem{std::move(sys.matrix), std::move(sys.rhs)};
  };
  out.solution.num_nodes = mesh.num_vertices();
  out.solution.coeffs = picard(assemble, n, mesh, ob.size(), cfg, opts, out.report);
  return out;
}

DeterministicResult solve_deterministic(const RunConfig &cfg, const Vector &coeff, int m_nonlin,
                                        const SolverOptions &opts)
{
  cfg.validate();
  if (m_nonlin < 0)
  {
    throw std::invalid_argument("solve_deterministic: exponent m must be >= 0");
  }
  DeterministicResult out{TriMesh(cfg.mesh_n), {}, {}};
  const TriMesh &mesh = out.mesh;
  if (static_cast<int>(coeff.size()) != mesh.num_vertices())
  {
    throw std::invalid_argument("solve_deterministic: coefficient size mismatch");
  }
  const BCSpec bc = opts.bc.value_or(default_bc());
  const Vector f = nodal_source(mesh, opts);
  const int n = mesh.num_vertices();
  if (m_nonlin == 0)
  {
    const auto sys = assemble_deterministic(mesh, coeff, f, bc);
    out.u.assign(n, 0.0);
    const auto kr = solve_linear_system(sys.matrix, sys.rhs, out.u, mesh, 1, cfg, opts, out.report);
    out.report.converged = kr.converged;
    if (!kr.converged)
    {
      out.report.message = "FGMRES did not reach the outer tolerance";
    }
    return out;
  }
  auto assemble = [&](const Vector &u)
  {
    auto sys = assemble_deterministic(mesh, picard_coefficient(coeff, u, m_nonlin), f, bc);
    return AssembledSystem{std::move(sys.matrix), std::move(sys.rhs)};
  };
  out.u = picard(assemble, n, mesh, 1, cfg, opts, out.report);
  return out;
}

DeterministicResult solve_deterministic(const RunConfig &cfg, int m_nonlin,
                                        const SolverOptions &opts)
{
  const Vector coeff((cfg.mesh_n + 1) * (cfg.mesh_n + 1), std::exp(cfg.g0));
  return solve_deterministic(cfg, coeff, m_nonlin, opts);
}

double analytic_solution(int m, double x)
{
  const double k = m + 1.0;
  return std::pow((std::pow(2.0, k) - 1.0) * x + 1.0, 1.0 / k) - 1.0;
}

double relative_error(std::span<const double> u_num, std::span<const double> u_truth)
{
  if (u_num.size() != u_truth.size())
  {
    throw std::invalid_argument("relative_error: size mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u_num.size(); ++i)
  {
    num += (u_truth[i] - u_num[i]) * (u_truth[i] - u_num[i]);
    den += u_truth[i] * u_truth[i];
  }
  if (den == 0.0)
  {
    throw std::invalid_argument("relative_error: reference solution has zero norm");
  }
  return std::sqrt(num / den);
}

double relative_error(const TriMesh &mesh, std::span<const double> u_num,
                      const std::function<double(Point)> &u_truth)
{
  Vector t(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    t[v] = u_truth(mesh.vertices()[v]);
  }
  return relative_error(u_num, t);
}

Moments moments(const SolutionPCE &sol)
{
  const int nb = sol.basis.size();
  Moments mo{Vector(sol.num_nodes), Vector(sol.num_nodes)};
  for (int v = 0; v < sol.num_nodes; ++v)
  {
    mo.mean[v] = sol.at(v, 0);
    double var = 0.0;
    for (int j = 1; j < nb; ++j)
    {
      const double c = sol.at(v, j);
      var += c * c * sol.basis.norm_sq(j);
    }
    mo.std[v] = std::sqrt(var);
  }
  return mo;
}

std::vector<double> surrogate_samples(const SolutionPCE &sol, const TriMesh &mesh, Point p,
                                      int ndraws, std::uint64_t seed)
{
  if (ndraws < 1)
  {
    throw std::invalid_argument("surrogate_samples: ndraws must be >= 1");
  }
  const int nb = sol.basis.size();
  const auto [tri, w] = mesh.locate(p);
  const auto &verts = mesh.triangles()[tri];
  std::vector<double> coef(nb, 0.0);
  for (int j = 0; j < nb; ++j)
  {
    for (int a = 0; a < 3; ++a)
    {
      coef[j] += w[a] * sol.at(verts[a], j);
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> xi(sol.basis.num_vars());
  std::vector<double> out(ndraws);
  for (int d = 0; d < ndraws; ++d)
  {
    for (auto &x : xi)
    {
      x = normal(rng);
    }
    const auto psi = sol.basis.eval_all(xi);
    double s = 0.0;
    for (int j = 0; j < nb; ++j)
    {
      s += coef[j] * psi[j];
    }
    out[d] = s;
  }
  return out;
}

double silverman_bandwidth(std::vector<double> s)
{
  const std::size_t n = s.size();
  if (n < 2)
  {
    return 0.0;
  }
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
  double var = 0.0;
  for (double x : s)
  {
    var += (x - mean) * (x - mean);
  }
  const double sd = std::sqrt(var / (n - 1));
  std::sort(s.begin(), s.end());
  if (s.front() == s.back())
  {
    return 0.0;
  }
  auto quantile = [&](double q)
  {
    const double pos = q * (n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    return s[lo] + (pos - lo) * (s[hi] - s[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double a = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * a * std::pow(static_cast<double>(n), -0.2);
}

double kde(std::span<const double> samples, double h, double x)
{
  if (!(h > 0.0) || samples.empty())
  {
    throw std::invalid_argument("kde: bandwidth must be > 0 and samples non-empty");
  }
  const double c = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h * samples.size());
  double s = 0.0;
  for (double xi : samples)
  {
    const double z = (x - xi) / h;
    s += std::exp(-0.5 * z * z);
  }
  return c * s;
}

PdfEstimate pdf_at_point(const SolutionPCE &sol, const TriMesh &mesh, Point p, int ndraws,
                         std::uint64_t seed, int ngrid)
{
  PdfEstimate est;
  est.samples = surrogate_samples(sol, mesh, p, ndraws, seed);
  est.bandwidth = silverman_bandwidth(est.samples);
  if (est.bandwidth == 0.0 || ngrid < 2)
  {
    return est;
  }
  const auto [lo, hi] = std::minmax_element(est.samples.begin(), est.samples.end());
  const double a = *lo - 3.0 * est.bandwidth, b = *hi + 3.0 * est.bandwidth;
  est.grid.resize(ngrid);
  est.density.resize(ngrid);
  for (int g = 0; g < ngrid; ++g)
  {
    est.grid[g] = a + (b - a) * g / (ngrid - 1);
    est.density[g] = kde(est.samples, est.bandwidth, est.grid[g]);
  }
  return est;
}

}  // namespace sgdd
