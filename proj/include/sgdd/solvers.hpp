// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sgdd/assembly.hpp"
#include "sgdd/chaos.hpp"
#include "sgdd/config.hpp"
#include "sgdd/dd.hpp"
#include "sgdd/krylov.hpp"
#include "sgdd/mesh.hpp"

namespace sgdd
{

struct SolveReport
{
  /// Outer FGMRES iterations summed over all linear solves.
  int outer_iterations = 0;
  std::vector<int> outer_per_solve;
  double mean_coarse_iterations = 0.0;
  long coarse_iterations = 0;
  long coarse_solves = 0;
  long coarse_failures = 0;
  int picard_iterations = 0;
  /// Picard update norms ||u^{k+1} - u^k||, one per iteration.
  std::vector<double> picard_updates;
  /// Relative update of the last Picard iteration.
  double picard_rel_update = 0.0;
  double pc_setup_seconds = 0.0;
  double solve_seconds = 0.0;
  /// Residual history of the last linear solve.
  std::vector<double> residual_history;
  double final_rel_residual = 0.0;
  std::vector<int> amg_level_sizes;
  bool converged = false;
  bool stagnated = false;
  std::string message;

  double mean_outer_iterations() const;
};

/// Solution coefficients u_j at every node, stored node-major like the
/// block system (node * nblocks + j).
struct SolutionPCE
{
  ChaosBasis basis;
  int num_nodes = 0;
  Vector coeffs;

  double at(int node, int j) const { return coeffs[static_cast<std::size_t>(node) * basis.size() + j]; }
  Vector mode(int j) const;
};

struct Moments
{
  Vector mean;
  Vector std;
};

struct StochasticResult
{
  TriMesh mesh;
  SolutionPCE solution;
  SolveReport report;
};

struct DeterministicResult
{
  TriMesh mesh;
  Vector u;
  SolveReport report;
};

/// Overrides of the default problem data: u = 0 on x = 0, u = 1 on x = 1,
/// zero flux on the horizontal edges and f = 0.
struct SolverOptions
{
  LocalSolver local = LocalSolver::Ilu0;
  std::optional<BCSpec> bc;
  std::function<double(Point)> source;
  int max_outer_iters = 1000;
  int max_picard_iters = 50;
};

BCSpec default_bc();

/// Builds the configured preconditioner for `a` (dimension nv * nblocks).
std::unique_ptr<LinearOperator> make_preconditioner(const CsrMatrix &a, const TriMesh &mesh,
                                                    int nblocks, const RunConfig &cfg,
                                                    const SolverOptions &opts);

/// Preconditioner setup plus FGMRES from the initial guess in x. Timings,
/// iteration counts and coarse statistics are accumulated into `report`.
KrylovResult solve_linear_system(const CsrMatrix &a, std::span<const double> b,
                                 std::span<double> x, const TriMesh &mesh, int nblocks,
                                 const RunConfig &cfg, const SolverOptions &opts,
                                 SolveReport &report);

StochasticResult solve_linear_stochastic(const RunConfig &cfg, const SolverOptions &opts = {});
StochasticResult solve_nonlinear_stochastic(const RunConfig &cfg, const SolverOptions &opts = {});

/// -div(q(u) grad u) = f with q = exp(g0) (1 + u)^m; m = 0 is a single linear solve.
DeterministicResult solve_deterministic(const RunConfig &cfg, int m_nonlin,
                                        const SolverOptions &opts = {});

/// Deterministic solve with a prescribed nodal coefficient field.
DeterministicResult solve_deterministic(const RunConfig &cfg, const Vector &coeff, int m_nonlin,
                                        const SolverOptions &opts = {});

/// ((2^{m+1} - 1) x + 1)^{1/(m+1)} - 1.
double analytic_solution(int m, double x);

/// ||u_truth - u_num|| / ||u_truth|| over nodal values.
double relative_error(std::span<const double> u_num, std::span<const double> u_truth);
double relative_error(const TriMesh &mesh, std::span<const double> u_num,
                      const std::function<double(Point)> &u_truth);

Moments moments(const SolutionPCE &sol);

/// Values of the surrogate sum_j u_j(p) Psi_j(xi) for ndraws Gaussian germs.
std::vector<double> surrogate_samples(const SolutionPCE &sol, const TriMesh &mesh, Point p,
                                      int ndraws, std::uint64_t seed);

struct PdfEstimate
{
  std::vector<double> samples;
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> density;
};

/// Silverman bandwidth 0.9 min(sd, IQR / 1.34) n^{-1/5}.
double silverman_bandwidth(std::vector<double> samples);
/// Gaussian kernel density estimate at x.
double kde(std::span<const double> samples, double bandwidth, double x);

/// Surrogate draws at p and their kernel density on `ngrid` points spanning
/// the sample range. A zero bandwidth leaves grid and density empty.
PdfEstimate pdf_at_point(const SolutionPCE &sol, const TriMesh &mesh, Point p, int ndraws,
                         std::uint64_t seed, int ngrid = 200);

}  // namespace sgdd
