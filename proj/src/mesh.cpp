// SPDX-License-Identifier: Apache-2.0

#include "sgdd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sgdd
{

namespace
{

// Lower triangle (v00, v10, v11) for s >= t, upper (v00, v11, v01) otherwise.
std::array<double, 3> cell_weights(double s, double t, bool lower)
{
  if (lower)
  {
    return {1.0 - s, s - t, t};
  }
  return {1.0 - t, s, t - s};
}

}  // namespace

TriMesh::TriMesh(int n) : n_(n)
{
  if (n < 1)
  {
    throw std::invalid_argument("TriMesh: n must be >= 1");
  }
  const int nv = (n + 1) * (n + 1);
  vertices_.reserve(nv);
  flags_.reserve(nv);
  for (int j = 0; j <= n; ++j)
  {
    for (int i = 0; i <= n; ++i)
    {
      vertices_.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
      unsigned f = kInterior;
      f |= (i == 0) ? kLeft : 0u;
      f |= (i == n) ? kRight : 0u;
      f |= (j == 0) ? kBottom : 0u;
      f |= (j == n) ? kTop : 0u;
      flags_.push_back(f);
    }
  }
  triangles_.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      const int v00 = vertex_index(i, j), v10 = vertex_index(i + 1, j);
      const int v01 = vertex_index(i, j + 1), v11 = vertex_index(i + 1, j + 1);
      triangles_.push_back({v00, v10, v11});
      triangles_.push_back({v00, v11, v01});
    }
  }
  nbrs_.assign(nv, {});
  for (const auto &t : triangles_)
  {
    for (int a : t)
    {
      for (int b : t)
      {
        nbrs_[a].push_back(b);
      }
    }
  }
  for (auto &nb : nbrs_)
  {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

double TriMesh::area(int t) const
{
  const auto &tri = triangles_[t];
  const Point &a = vertices_[tri[0]], &b = vertices_[tri[1]], &c = vertices_[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::pair<int, std::array<double, 3>> TriMesh::locate(Point p) const
{
  if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0))
  {
    throw std::invalid_argument("TriMesh::locate: point outside the unit square");
  }
  const double X = p.x * n_, Y = p.y * n_;
  // Prefer the lower cell row, then the lower cell column, on shared lines.
  int j = std::clamp(static_cast<int>(std::ceil(Y)) - 1, 0, n_ - 1);
  int i = std::clamp(static_cast<int>(std::ceil(X)) - 1, 0, n_ - 1);
  const double s = std::clamp(X - i, 0.0, 1.0), t = std::clamp(Y - j, 0.0, 1.0);
  const bool lower = s >= t;
  const int tri = 2 * (j * n_ + i) + (lower ? 0 : 1);
  return {tri, cell_weights(s, t, lower)};
}

double TriMesh::interpolate(std::span<const double> field, Point p) const
{
  if (static_cast<int>(field.size()) != num_vertices())
  {
    throw std::invalid_argument("TriMesh::interpolate: field size mismatch");
  }
  const auto [t, w] = locate(p);
  const auto &tri = triangles_[t];
  return w[0] * field[tri[0]] + w[1] * field[tri[1]] + w[2] * field[tri[2]];
}

TriMesh unit_square(int n) { return TriMesh(n); }

NestedPair nested_pair(int n_coarse, int factor)
{
  if (factor < 1)
  {
    throw std::invalid_argument("nested_pair: refinement factor must be >= 1");
  }
  return NestedPair{TriMesh(n_coarse), TriMesh(n_coarse * factor), factor};
}

NestedPair nested_pair_for_ratio(int n_fine, double ratio)
{
  if (!(ratio >= 1.0))
  {
    throw std::invalid_argument("nested_pair_for_ratio: ratio must be >= 1");
  }
  const int factor = static_cast<int>(std::lround(std::sqrt(ratio)));
  if (n_fine % factor != 0)
  {
    throw std::invalid_argument("nested_pair_for_ratio: fine resolution " +
                                std::to_string(n_fine) + " is not divisible by the refinement factor " +
                                std::to_string(factor));
  }
  return nested_pair(n_fine / factor, factor);
}

CsrMatrix interpolation_matrix(const TriMesh &coarse, const TriMesh &fine)
{
  const int nc = coarse.resolution(), nf = fine.resolution();
  if (nf % nc != 0)
  {
    throw std::invalid_argument("interpolation_matrix: meshes are not nested (" +
                                std::to_string(nf) + " cells is not a multiple of " +
                                std::to_string(nc) + ")");
  }
  const int r = nf / nc;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(fine.num_vertices()) * 3);
  for (int J = 0; J <= nf; ++J)
  {
    for (int I = 0; I <= nf; ++I)
    {
      const int f = fine.vertex_index(I, J);
      // Integer cell lookup; vertices on coarse lines go to the lower cell.
      const int i = I == 0 ? 0 : (I - 1) / r;
      const int j = J == 0 ? 0 : (J - 1) / r;
      const int si = I - i * r, tj = J - j * r;
      const double s = static_cast<double>(si) / r, t = static_cast<double>(tj) / r;
      const bool lower = si >= tj;
      const auto w = cell_weights(s, t, lower);
      const int v00 = coarse.vertex_index(i, j), v10 = coarse.vertex_index(i + 1, j);
      const int v01 = coarse.vertex_index(i, j + 1), v11 = coarse.vertex_index(i + 1, j + 1);
      const std::array<int, 3> verts =
          lower ? std::array<int, 3>{v00, v10, v11} : std::array<int, 3>{v00, v11, v01};
      for (int k = 0; k < 3; ++k)
      {
        if (w[k] != 0.0)
        {
          trip.push_back({f, verts[k], w[k]});
        }
      }
    }
  }
  return CsrMatrix::from_triplets(fine.num_vertices(), coarse.num_vertices(), std::move(trip));
}

CsrMatrix interpolation_matrix(const NestedPair &pair)
{
  return interpolation_matrix(pair.coarse, pair.fine);
}

}  // namespace sgdd
