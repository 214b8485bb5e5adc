// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace sgdd
{

/// Per-variable Hermite degrees of one chaos polynomial.
using MultiIndex = std::vector<int>;

/// Probabilists' Hermite polynomial He_k(x).
double hermite_eval(int k, double x);

/// Psi_alpha(xi) = prod_k He_{alpha_k}(xi_k).
double basis_eval(const MultiIndex &alpha, std::span<const double> xi);

/// E[Psi_alpha^2] = prod_k alpha_k!.
double norm_sq(const MultiIndex &alpha);

/// E[He_a He_b He_c] for a standard Gaussian.
double hermite_triple(int a, int b, int c);

/// E[He_a He_b He_c He_d] for a standard Gaussian.
double hermite_quad(int a, int b, int c, int d);

/// Total-degree Hermite chaos basis in M variables. Indices are graded by
/// total degree; within a degree they are in descending lexicographic order,
/// so index k in 1..M is the first-order polynomial of variable k.
class ChaosBasis
{
public:
  ChaosBasis(int M, int p);

  int num_vars() const { return M_; }
  int order() const { return p_; }
  int size() const { return static_cast<int>(indices_.size()); }

  const MultiIndex &operator[](int i) const { return indices_[i]; }
  const std::vector<MultiIndex> &indices() const { return indices_; }
  int total_degree(int i) const;

  /// Position of alpha in the basis, or -1.
  int find(const MultiIndex &alpha) const;

  double norm_sq(int i) const { return norm_sq_[i]; }
  double eval(int i, std::span<const double> xi) const;
  /// Values of all basis polynomials at xi.
  std::vector<double> eval_all(std::span<const double> xi) const;

private:
  int M_;
  int p_;
  std::vector<MultiIndex> indices_;
  std::vector<double> norm_sq_;
};

ChaosBasis enumerate_basis(int M, int p);

/// (M + p)! / (M! p!).
long basis_size(int M, int p);

struct TripleEntry
{
  int i;
  int j;
  int k;
  double value;
};

/// Nonzero m_ijk = E[Psi_i Psi_j Psi_k], i over the input basis, j and k
/// over the output basis. Entries sorted by (i, j, k).
class TripleTensor
{
public:
  TripleTensor(int n_in, int n_out, std::vector<TripleEntry> entries);

  int input_size() const { return n_in_; }
  int output_size() const { return n_out_; }
  const std::vector<TripleEntry> &entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  double value(int i, int j, int k) const;

  void write_csv(const std::filesystem::path &path) const;

private:
  int n_in_;
  int n_out_;
  std::vector<TripleEntry> entries_;
};

struct QuadEntry
{
  int i;
  int j;
  int k;
  int l;
  double value;
};

/// Nonzero t_ijkl = E[Psi_i Psi_j Psi_k Psi_l], i over the input basis,
/// j, k, l over the output basis. Entries sorted by (i, j, k, l).
class QuadTensor
{
public:
  QuadTensor(int n_in, int n_out, std::vector<QuadEntry> entries);

  int input_size() const { return n_in_; }
  int output_size() const { return n_out_; }
  const std::vector<QuadEntry> &entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  double value(int i, int j, int k, int l) const;

  void write_csv(const std::filesystem::path &path) const;

private:
  int n_in_;
  int n_out_;
  std::vector<QuadEntry> entries_;
};

TripleTensor triple_tensor(const ChaosBasis &input, const ChaosBasis &output);
QuadTensor quad_tensor(const ChaosBasis &input, const ChaosBasis &output);

}  // namespace sgdd
