// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "oracles.hpp"
#include "sgdd/mesh.hpp"

using namespace sgdd;

namespace
{

double signed_area(const TriMesh &m, int t)
{
  const auto &tri = m.triangles()[t];
  const Point a = m.vertices()[tri[0]], b = m.vertices()[tri[1]], c = m.vertices()[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

}  // namespace

TEST_CASE("vertex and triangle counts")
{
  const TriMesh m1(1);
  CHECK(m1.num_vertices() == 4);
  CHECK(m1.num_triangles() == 2);
  CHECK(unit_square(100).num_vertices() == 10201);
  for (int n : {1, 2, 5, 16})
  {
    const TriMesh m(n);
    CHECK(m.num_vertices() == (n + 1) * (n + 1));
    CHECK(m.num_triangles() == 2 * n * n);
  }
  CHECK_THROWS_AS(TriMesh(0), std::invalid_argument);
}

TEST_CASE("triangles tile the unit square with positive orientation")
{
  for (int n : {1, 3, 10, 33})
  {
    const TriMesh m(n);
    double total = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t)
    {
      const double a = signed_area(m, t);
      CHECK(a > 0.0);
      CHECK(m.area(t) == doctest::Approx(a).epsilon(1e-14));
      total += a;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    for (const Point &p : m.vertices())
    {
      CHECK(p.x >= 0.0);
      CHECK(p.x <= 1.0);
      CHECK(p.y >= 0.0);
      CHECK(p.y <= 1.0);
    }
  }
}

TEST_CASE("vertex numbering and boundary flags")
{
  const int n = 4;
  const TriMesh m(n);
  for (int j = 0; j <= n; ++j)
  {
    for (int i = 0; i <= n; ++i)
    {
      const int v = m.vertex_index(i, j);
      CHECK(v == j * (n + 1) + i);
      CHECK(m.vertices()[v].x == doctest::Approx(static_cast<double>(i) / n));
      CHECK(m.vertices()[v].y == doctest::Approx(static_cast<double>(j) / n));
      unsigned want = 0;
      if (i == 0)
        want |= kLeft;
      if (i == n)
        want |= kRight;
      if (j == 0)
        want |= kBottom;
      if (j == n)
        want |= kTop;
      CHECK(m.boundary_flags(v) == want);
    }
  }
}

TEST_CASE("vertex neighbourhoods")
{
  const TriMesh m(3);
  for (int v = 0; v < m.num_vertices(); ++v)
  {
    std::set<int> want;
    for (const auto &t : m.triangles())
    {
      if (t[0] == v || t[1] == v || t[2] == v)
      {
        want.insert(t.begin(), t.end());
      }
    }
    const auto &nb = m.neighbours(v);
    CHECK(std::vector<int>(want.begin(), want.end()) == nb);
  }
  // Interior vertex of a right-diagonal mesh touches six others.
  CHECK(m.neighbours(m.vertex_index(1, 1)).size() == 7);
}

TEST_CASE("point location and ties")
{
  const TriMesh m(1);
  const auto [t, w] = m.locate({0.5, 0.5});
  CHECK(t == 0);
  CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.0));
  const TriMesh m4(4);
  for (double x : {0.0, 0.1, 0.25, 0.6, 1.0})
  {
    for (double y : {0.0, 0.3, 0.5, 0.75, 1.0})
    {
      const auto [tri, bw] = m4.locate({x, y});
      double sx = 0.0, sy = 0.0;
      for (int k = 0; k < 3; ++k)
      {
        CHECK(bw[k] >= -1e-14);
        CHECK(bw[k] <= 1.0 + 1e-14);
        sx += bw[k] * m4.vertices()[m4.triangles()[tri][k]].x;
        sy += bw[k] * m4.vertices()[m4.triangles()[tri][k]].y;
      }
      CHECK(sx == doctest::Approx(x).epsilon(1e-13));
      CHECK(sy == doctest::Approx(y).epsilon(1e-13));
      // No lower-indexed triangle contains the point.
      for (int s = 0; s < tri; ++s)
      {
        const auto &tr = m4.triangles()[s];
        const Point a = m4.vertices()[tr[0]], b = m4.vertices()[tr[1]], c = m4.vertices()[tr[2]];
        const double d = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
        const double l0 = ((b.y - c.y) * (x - c.x) + (c.x - b.x) * (y - c.y)) / d;
        const double l1 = ((c.y - a.y) * (x - c.x) + (a.x - c.x) * (y - c.y)) / d;
        const double l2 = 1.0 - l0 - l1;
        CHECK_FALSE((l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12));
      }
    }
  }
  CHECK_THROWS_AS(m4.locate({1.5, 0.5}), std::invalid_argument);
}

TEST_CASE("nodal interpolation reproduces linear fields")
{
  const TriMesh m(7);
  std::vector<double> f(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v)
  {
    f[v] = 2.0 - 3.0 * m.vertices()[v].x + 0.5 * m.vertices()[v].y;
  }
  for (Point p : {Point{0.13, 0.77}, Point{0.5, 0.5}, Point{1.0, 0.0}, Point{0.99, 0.01}})
  {
    CHECK(m.interpolate(f, p) == doctest::Approx(2.0 - 3.0 * p.x + 0.5 * p.y).epsilon(1e-13));
  }
}

TEST_CASE("nested pairs")
{
  const auto pair = nested_pair(5, 2);
  CHECK(pair.fine.resolution() == 10);
  CHECK(pair.refinement_factor == 2);
  const double ratio = static_cast<double>(pair.fine.num_vertices()) / pair.coarse.num_vertices();
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.35));
  // Coarse vertices are fine vertices.
  for (int j = 0; j <= 5; ++j)
  {
    for (int i = 0; i <= 5; ++i)
    {
      const Point c = pair.coarse.vertices()[pair.coarse.vertex_index(i, j)];
      const Point f = pair.fine.vertices()[pair.fine.vertex_index(2 * i, 2 * j)];
      CHECK(c.x == doctest::Approx(f.x));
      CHECK(c.y == doctest::Approx(f.y));
    }
  }
  const auto r16 = nested_pair_for_ratio(80, 16);
  CHECK(r16.refinement_factor == 4);
  CHECK(r16.coarse.resolution() == 20);
  const auto r100 = nested_pair_for_ratio(80, 100);
  CHECK(r100.refinement_factor == 10);
  CHECK_THROWS_AS(nested_pair_for_ratio(81, 4), std::invalid_argument);
  CHECK_THROWS_AS(nested_pair(4, 0), std::invalid_argument);
}

TEST_CASE("interpolation matrix")
{
  const auto pair = nested_pair(3, 4);
  const CsrMatrix P = interpolation_matrix(pair);
  CHECK(P.rows() == pair.fine.num_vertices());
  CHECK(P.cols() == pair.coarse.num_vertices());
  const auto d = oracle::dense(P);
  for (int r = 0; r < P.rows(); ++r)
  {
    CHECK(d.row(r).sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.row(r).minCoeff() >= 0.0);
    CHECK(d.row(r).maxCoeff() <= 1.0);
  }
  std::vector<double> cx(P.cols()), cc(P.cols(), 2.5);
  for (int v = 0; v < P.cols(); ++v)
  {
    cx[v] = pair.coarse.vertices()[v].x + 2.0 * pair.coarse.vertices()[v].y;
  }
  const auto fx = spmv(P, cx), fc = spmv(P, cc);
  for (int v = 0; v < P.rows(); ++v)
  {
    const Point p = pair.fine.vertices()[v];
    CHECK(fx[v] == doctest::Approx(p.x + 2.0 * p.y).epsilon(1e-13));
    CHECK(fc[v] == doctest::Approx(2.5).epsilon(1e-14));
  }

  const TriMesh same(6);
  const auto id = oracle::dense(interpolation_matrix(same, same));
  CHECK(oracle::max_abs(id - Eigen::MatrixXd::Identity(id.rows(), id.cols())) == 0.0);

  CHECK_THROWS_AS(interpolation_matrix(TriMesh(3), TriMesh(4)), std::invalid_argument);
}
