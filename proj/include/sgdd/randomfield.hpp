// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "sgdd/chaos.hpp"
#include "sgdd/mesh.hpp"

namespace sgdd
{

/// Covariance sigma^2 exp(-|x1 - x2| / bx - |y1 - y2| / by).
struct ExpKernel
{
  double sigma = 0.3;
  double bx = 1.0;
  double by = 1.0;

  void validate() const;
};

/// Eigenpair of exp(-|s - t| / b) on [0, length].
struct Kle1dMode
{
  double lambda;
  double omega;
  bool even;
  double half_length;
  double scale;

  double eval(double t) const;
};

/// First M1 eigenpairs, eigenvalues in decreasing order.
std::vector<Kle1dMode> kle_1d(double b, double length, int M1);

struct Kle2dMode
{
  double lambda;
  Kle1dMode x;
  Kle1dMode y;

  double eval(double px, double py) const { return x.eval(px) * y.eval(py); }
};

/// Truncated KL expansion g(x) = g0 + sum_k sqrt(lambda_k) phi_k(x) xi_k on
/// the unit square.
class KLExpansion
{
public:
  KLExpansion(double g0, double sigma, std::vector<Kle2dMode> modes);

  int size() const { return static_cast<int>(modes_.size()); }
  double g0() const { return g0_; }
  double sigma() const { return sigma_; }
  const std::vector<Kle2dMode> &modes() const { return modes_; }
  double lambda(int k) const { return modes_[k].lambda; }
  double phi(int k, Point p) const { return modes_[k].eval(p.x, p.y); }
  /// g_k(x) = sqrt(lambda_k) phi_k(x).
  double g(int k, Point p) const;

  /// Fraction of sigma^2 captured by the first k modes.
  double variance_fraction(int k) const;

  /// CSV with columns index, lambda, capture.
  void write_csv(const std::filesystem::path &path) const;

private:
  double g0_;
  double sigma_;
  std::vector<Kle2dMode> modes_;
};

KLExpansion kle_2d(const ExpKernel &kernel, int M, double g0 = 0.0);

/// Nodal PCE coefficients of c = exp(g) on a mesh.
struct LognormalPCE
{
  ChaosBasis basis;
  /// coeffs[i][v] is the coefficient of Psi_i at vertex v.
  std::vector<Vector> coeffs;

  int num_terms() const { return basis.size(); }
  int num_nodes() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs[0].size()); }
};

LognormalPCE lognormal_pce(const KLExpansion &kle, const ChaosBasis &input_basis,
                           const TriMesh &mesh);

/// exp(g0 + sum_k g_k(x) xi_k) at the mesh vertices.
Vector sample_field(const KLExpansion &kle, std::span<const double> xi, const TriMesh &mesh);

/// Nodal g_k values cached for repeated sampling.
class FieldSampler
{
public:
  FieldSampler(const KLExpansion &kle, const TriMesh &mesh);

  int num_vars() const { return M_; }
  int num_nodes() const { return nv_; }
  void sample(std::span<const double> xi, std::span<double> out) const;
  Vector sample(std::span<const double> xi) const;

private:
  int M_;
  int nv_;
  double g0_;
  std::vector<double> g_;
};

}  // namespace sgdd
