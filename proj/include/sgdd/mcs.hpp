// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sgdd/config.hpp"
#include "sgdd/mesh.hpp"
#include "sgdd/solvers.hpp"

namespace sgdd
{

/// Streaming mean and variance (Welford).
class Welford
{
public:
  explicit Welford(std::size_t dim = 1) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  void add(std::span<const double> x);
  long count() const { return n_; }
  const std::vector<double> &mean() const { return mean_; }
  /// Unbiased sample variance; zero for fewer than two samples.
  std::vector<double> variance() const;

private:
  long n_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Seed of the independent stream for sample `index`.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

/// Standard Gaussian germ of sample `index`; identical for any schedule.
std::vector<double> draw_germ(std::uint64_t seed, std::uint64_t index, int M);

enum class McsSolver
{
  /// GMRES with a fixed AMG preconditioner built from the mean coefficient.
  MeanFieldAmg,
  /// The configured FGMRES + Schwarz pipeline for every sample.
  Pipeline
};

struct McsOptions
{
  McsSolver solver = McsSolver::MeanFieldAmg;
  /// Relative residual tolerance of the per-sample solves (MeanFieldAmg).
  double rel_tol = 1e-9;
  int batch = 64;
  SolverOptions pipeline;
};

struct McsResult
{
  int nsamples = 0;
  std::uint64_t seed = 0;
  Vector mean;
  Vector std;
  std::vector<Point> probes;
  /// probe_samples[p][s] = u(probe p) for sample s.
  std::vector<std::vector<double>> probe_samples;
  long linear_iterations = 0;
  long picard_iterations = 0;
  double seconds = 0.0;
};

/// Monte Carlo reference: each sample solves the deterministic problem for
/// c = exp(g0 + sum_k g_k xi_k). Nonlinear problems use q = c (1 + u).
McsResult run_mcs(const RunConfig &cfg, int nsamples, std::uint64_t seed,
                  std::span<const Point> probes, const McsOptions &opts = {});

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Interior probe points used by verification.
std::vector<Point> default_probes();

}  // namespace sgdd
