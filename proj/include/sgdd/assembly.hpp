// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>

#include "sgdd/chaos.hpp"
#include "sgdd/mesh.hpp"
#include "sgdd/randomfield.hpp"
#include "sgdd/sparse.hpp"

namespace sgdd
{

/// Boundary conditions per edge, indexed left, right, bottom, top. Edges
/// without a Dirichlet value carry the Neumann flux `neumann[e]`. Corner
/// vertices take the first Dirichlet value in edge order.
struct BCSpec
{
  enum class Mode
  {
    Eliminate,
    Penalty
  };

  Mode mode = Mode::Eliminate;
  double penalty = 1e7;
  std::array<std::optional<double>, 4> dirichlet{};
  std::array<double, 4> neumann{};

  void validate() const;

  /// u = left on x = 0, u = right on x = 1, zero flux on y = 0 and y = 1.
  static BCSpec left_right(double left, double right);
  /// u = value on the whole boundary.
  static BCSpec all_dirichlet(double value);

  /// Dirichlet value at a vertex with the given flags, if any.
  std::optional<double> dirichlet_value(unsigned flags) const;
};

struct LinearSystem
{
  CsrMatrix matrix;
  Vector rhs;
};

/// Coupled stochastic Galerkin system. Unknown (node v, chaos index k) is
/// stored at v * nblocks + k.
struct BlockCsrSystem
{
  int nblocks = 1;
  int block_dim = 0;
  CsrMatrix matrix;
  Vector rhs;

  int dof(int node, int block) const { return node * nblocks + block; }
  int size() const { return nblocks * block_dim; }
  /// Dense copy of block (k, j) as a block_dim x block_dim CSR matrix.
  CsrMatrix block(int k, int j) const;
};

/// P1 stiffness system for -div(c grad u) = f with element coefficient equal
/// to the vertex average of c.
LinearSystem assemble_deterministic(const TriMesh &mesh, std::span<const double> coeff,
                                    std::span<const double> f, const BCSpec &bc);

/// Picard frozen coefficient q = c (1 + u)^m at the vertices.
Vector picard_coefficient(std::span<const double> c, std::span<const double> u, int m);

BlockCsrSystem assemble_stochastic_linear(const TriMesh &mesh, const LognormalPCE &c_pce,
                                          const TripleTensor &m, const ChaosBasis &output_basis,
                                          std::span<const double> f, const BCSpec &bc);

/// Block (l, k) has coefficient sum_i m_ikl c_i + sum_ij t_ijkl c_i u_j.
BlockCsrSystem assemble_stochastic_picard(const TriMesh &mesh, const LognormalPCE &c_pce,
                                          std::span<const double> u_prev, const TripleTensor &m,
                                          const QuadTensor &t, const ChaosBasis &output_basis,
                                          std::span<const double> f, const BCSpec &bc);

/// Consistent P1 load vector int f v plus Neumann edge contributions.
Vector load_vector(const TriMesh &mesh, std::span<const double> f, const BCSpec &bc);

}  // namespace sgdd
