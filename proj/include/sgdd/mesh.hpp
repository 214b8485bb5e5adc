// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <vector>

#include "sgdd/sparse.hpp"

namespace sgdd
{

struct Point
{
  double x;
  double y;
};

/// Boundary edge flags; corner vertices carry two flags.
enum BoundaryFlag : unsigned
{
  kInterior = 0,
  kLeft = 1,
  kRight = 2,
  kBottom = 4,
  kTop = 8,
};

/// Structured triangulation of [0,1]^2 with n cells per side. Vertex (i, j)
/// has index j (n + 1) + i; cell (i, j) is split along its lower-left to
/// upper-right diagonal into triangles 2 (j n + i) and 2 (j n + i) + 1.
class TriMesh
{
public:
  explicit TriMesh(int n);

  int resolution() const { return n_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  const std::vector<Point> &vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>> &triangles() const { return triangles_; }
  unsigned boundary_flags(int v) const { return flags_[v]; }
  int vertex_index(int i, int j) const { return j * (n_ + 1) + i; }

  double area(int t) const;
  /// Sorted vertex neighbours (sharing a triangle), including v itself.
  const std::vector<int> &neighbours(int v) const { return nbrs_[v]; }

  /// Triangle containing p and the barycentric weights of its vertices.
  /// Points on shared edges resolve to the lowest triangle index.
  std::pair<int, std::array<double, 3>> locate(Point p) const;

  /// P1 interpolant of a nodal field at p.
  double interpolate(std::span<const double> field, Point p) const;

private:
  int n_;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<unsigned> flags_;
  std::vector<std::vector<int>> nbrs_;
};

TriMesh unit_square(int n);

struct NestedPair
{
  TriMesh coarse;
  TriMesh fine;
  int refinement_factor;
};

/// Coarse mesh with n_coarse cells per side and its uniform refinement.
NestedPair nested_pair(int n_coarse, int factor);

/// Pair whose fine mesh has n_fine cells per side and vertex ratio close to
/// `ratio` (refinement factor round(sqrt(ratio))).
NestedPair nested_pair_for_ratio(int n_fine, double ratio);

/// Fine x coarse matrix whose row f holds the coarse P1 basis functions
/// evaluated at fine vertex f.
CsrMatrix interpolation_matrix(const TriMesh &coarse, const TriMesh &fine);
CsrMatrix interpolation_matrix(const NestedPair &pair);

}  // namespace sgdd
