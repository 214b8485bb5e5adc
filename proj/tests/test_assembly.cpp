// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "sgdd/assembly.hpp"
#include "sgdd/direct.hpp"
#include "sgdd/errors.hpp"

using namespace sgdd;

namespace
{

BCSpec neumann_only() { return BCSpec{}; }

// Brute-force stochastic Galerkin assembly: loops over elements and over a
// tensor Gauss-Hermite grid in the germ. The element coefficient is the
// average of the vertex values of q(x, xi) = c(x, xi) (1 + u(x, xi)).
Eigen::MatrixXd brute_force(const TriMesh &mesh, const LognormalPCE &pce, const ChaosBasis &out,
                            const std::vector<double> *u)
{
  const int nv = mesh.num_vertices();
  const int nb = out.size();
  const int M = out.num_vars();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nv * nb, nv * nb);
  const auto q = oracle::gauss_hermite(10);
  long total = 1;
  for (int k = 0; k < M; ++k)
    total *= 10;
  std::vector<double> xi(M);
  for (long s = 0; s < total; ++s)
  {
    long r = s;
    double w = 1.0;
    for (int k = 0; k < M; ++k)
    {
      xi[k] = q.nodes[r % 10];
      w *= q.weights[r % 10];
      r /= 10;
    }
    std::vector<double> psi_in(pce.basis.size()), psi_out(nb);
    for (int i = 0; i < pce.basis.size(); ++i)
    {
      psi_in[i] = 1.0;
      for (int k = 0; k < M; ++k)
        psi_in[i] *= oracle::hermite_explicit(pce.basis[i][k], xi[k]);
    }
    for (int j = 0; j < nb; ++j)
    {
      psi_out[j] = 1.0;
      for (int k = 0; k < M; ++k)
        psi_out[j] *= oracle::hermite_explicit(out[j][k], xi[k]);
    }
    std::vector<double> qv(nv);
    for (int v = 0; v < nv; ++v)
    {
      double c = 0.0;
      for (int i = 0; i < pce.basis.size(); ++i)
        c += pce.coeffs[i][v] * psi_in[i];
      double uu = 0.0;
      if (u)
      {
        for (int j = 0; j < nb; ++j)
          uu += (*u)[v * nb + j] * psi_out[j];
      }
      qv[v] = c * (1.0 + uu);
    }
    for (const auto &tri : mesh.triangles())
    {
      Eigen::Matrix3d X;
      for (int a = 0; a < 3; ++a)
      {
        const Point p = mesh.vertices()[tri[a]];
        X(a, 0) = 1.0;
        X(a, 1) = p.x;
        X(a, 2) = p.y;
      }
      const Eigen::Matrix3d C = X.inverse();  // column a: coefficients of basis a
      const double area = 0.5 * std::abs(X.determinant());
      const double qe = (qv[tri[0]] + qv[tri[1]] + qv[tri[2]]) / 3.0;
      for (int a = 0; a < 3; ++a)
      {
        for (int b = 0; b < 3; ++b)
        {
          const double kab = area * (C(1, a) * C(1, b) + C(2, a) * C(2, b)) * qe * w;
          for (int l = 0; l < nb; ++l)
          {
            for (int k = 0; k < nb; ++k)
            {
              A(tri[a] * nb + l, tri[b] * nb + k) += kab * psi_out[l] * psi_out[k];
            }
          }
        }
      }
    }
  }
  return A;
}

}  // namespace

TEST_CASE("linear field is reproduced exactly")
{
  const TriMesh mesh(6);
  const std::vector<double> c(mesh.num_vertices(), 1.0), f(mesh.num_vertices(), 0.0);
  const auto sys = assemble_deterministic(mesh, c, f, BCSpec::left_right(0.0, 1.0));
  const SparseLu lu(sys.matrix);
  const auto u = lu.solve(sys.rhs);
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    CHECK(u[v] == doctest::Approx(mesh.vertices()[v].x).epsilon(1e-12));
  }
}

TEST_CASE("stiffness matrix annihilates constants")
{
  const TriMesh mesh(5);
  std::vector<double> c(mesh.num_vertices()), f(mesh.num_vertices(), 0.0);
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    c[v] = 1.0 + mesh.vertices()[v].x * mesh.vertices()[v].y;
  }
  const auto sys = assemble_deterministic(mesh, c, f, neumann_only());
  const auto d = oracle::dense(sys.matrix);
  for (int r = 0; r < d.rows(); ++r)
  {
    CHECK(std::abs(d.row(r).sum()) < 1e-13);
  }
  CHECK(oracle::max_abs(d - d.transpose()) < 1e-14);
}

TEST_CASE("eliminated system is symmetric positive definite")
{
  const TriMesh mesh(5);
  std::vector<double> c(mesh.num_vertices()), f(mesh.num_vertices(), 1.0);
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    c[v] = std::exp(std::sin(3.0 * mesh.vertices()[v].x));
  }
  for (const auto &bc : {BCSpec::left_right(0.0, 1.0), BCSpec::all_dirichlet(2.0)})
  {
    const auto sys = assemble_deterministic(mesh, c, f, bc);
    const auto d = oracle::dense(sys.matrix);
    CHECK(oracle::max_abs(d - d.transpose()) < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("non-positive coefficients are rejected")
{
  const TriMesh mesh(3);
  std::vector<double> c(mesh.num_vertices(), 1.0), f(mesh.num_vertices(), 0.0);
  c[5] = 0.0;
  CHECK_THROWS_AS(assemble_deterministic(mesh, c, f, BCSpec::left_right(0, 1)), NumericalError);
  c[5] = -1.0;
  CHECK_THROWS_AS(assemble_deterministic(mesh, c, f, BCSpec::left_right(0, 1)), NumericalError);
  std::vector<double> short_f(3, 0.0);
  c[5] = 1.0;
  CHECK_THROWS_AS(assemble_deterministic(mesh, c, short_f, BCSpec::left_right(0, 1)),
                  std::invalid_argument);
  BCSpec bad = BCSpec::left_right(0, 1);
  bad.mode = BCSpec::Mode::Penalty;
  bad.penalty = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("load vector and Neumann flux")
{
  const TriMesh mesh(4);
  const std::vector<double> one(mesh.num_vertices(), 1.0);
  const auto b = load_vector(mesh, one, neumann_only());
  double s = 0.0;
  for (double x : b)
    s += x;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  BCSpec bc;
  bc.neumann[3] = 2.0;
  const std::vector<double> zero(mesh.num_vertices(), 0.0);
  const auto bn = load_vector(mesh, zero, bc);
  s = 0.0;
  for (double x : bn)
    s += x;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("picard coefficient")
{
  const std::vector<double> c{1.0, 2.0, 0.5}, u{0.0, 1.0, -0.5};
  const auto q = picard_coefficient(c, u, 1);
  CHECK(q[0] == 1.0);
  CHECK(q[1] == 4.0);
  CHECK(q[2] == 0.25);
  const auto q2 = picard_coefficient(c, u, 2);
  CHECK(q2[1] == 8.0);
  const auto q0 = picard_coefficient(c, u, 0);
  CHECK(q0[2] == 0.5);
}

TEST_CASE("stochastic linear system structure")
{
  const TriMesh mesh(4);
  const auto kle = kle_2d(ExpKernel{0.3, 1.0, 1.0}, 3);
  const ChaosBasis in(3, 2), out(3, 3);
  const auto pce = lognormal_pce(kle, in, mesh);
  const auto m = triple_tensor(in, out);
  const std::vector<double> f(mesh.num_vertices(), 1.0);
  const auto sys = assemble_stochastic_linear(mesh, pce, m, out, f, BCSpec::left_right(0.0, 1.0));
  CHECK(sys.nblocks == 20);
  CHECK(sys.block_dim == mesh.num_vertices());
  CHECK(sys.matrix.rows() == sys.size());
  CHECK(static_cast<int>(sys.rhs.size()) == sys.size());
  const auto d = oracle::dense(sys.matrix);
  CHECK(oracle::max_abs(d - d.transpose()) <= 1e-12 * oracle::max_abs(d));

  // Block (0,0) is the deterministic system with the mean coefficient.
  const auto det = assemble_deterministic(mesh, pce.coeffs[0], f, BCSpec::left_right(0.0, 1.0));
  CHECK(oracle::max_abs(oracle::dense(sys.block(0, 0)) - oracle::dense(det.matrix)) < 1e-13);
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    CHECK(sys.rhs[sys.dof(v, 0)] == doctest::Approx(det.rhs[v]).epsilon(1e-14));
    const bool dir = (mesh.boundary_flags(v) & (kLeft | kRight)) != 0;
    for (int k = 1; k < 20; ++k)
    {
      if (dir)
      {
        CHECK(sys.rhs[sys.dof(v, k)] == 0.0);
        // Identity row on boundary dof.
        CHECK(sys.matrix.at(sys.dof(v, k), sys.dof(v, k)) == 1.0);
        CHECK(sys.matrix.row_ptr()[sys.dof(v, k) + 1] - sys.matrix.row_ptr()[sys.dof(v, k)] == 1);
      }
    }
    if (dir)
    {
      CHECK(sys.matrix.at(sys.dof(v, 0), sys.dof(v, 0)) == 1.0);
      CHECK(sys.rhs[sys.dof(v, 0)] == (mesh.boundary_flags(v) & kLeft ? 0.0 : 1.0));
    }
  }
  // Diagonal blocks are nonzero.
  for (int k = 0; k < 20; ++k)
  {
    CHECK(oracle::max_abs(oracle::dense(sys.block(k, k))) > 0.0);
  }
  // Homogeneous data leaves the higher blocks of the rhs empty.
  const auto hom = assemble_stochastic_linear(mesh, pce, m, out, f, BCSpec::left_right(0.0, 0.0));
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    for (int k = 1; k < 20; ++k)
    {
      CHECK(hom.rhs[hom.dof(v, k)] == 0.0);
    }
  }
  CHECK_THROWS_AS(assemble_stochastic_linear(mesh, pce, m, ChaosBasis(3, 2), f, BCSpec{}),
                  std::invalid_argument);
}

TEST_CASE("zero variance gives a block-diagonal system")
{
  const TriMesh mesh(3);
  const auto kle = kle_2d(ExpKernel{0.0, 1.0, 1.0}, 2);
  const ChaosBasis in(2, 2), out(2, 3);
  const auto pce = lognormal_pce(kle, in, mesh);
  const auto m = triple_tensor(in, out);
  const std::vector<double> f(mesh.num_vertices(), 0.0);
  const auto sys = assemble_stochastic_linear(mesh, pce, m, out, f, BCSpec::left_right(0.0, 1.0));
  for (int k = 0; k < out.size(); ++k)
  {
    for (int j = 0; j < out.size(); ++j)
    {
      if (j != k)
      {
        CHECK(oracle::max_abs(oracle::dense(sys.block(k, j))) == 0.0);
      }
    }
  }
}

TEST_CASE("stochastic assembly against brute-force quadrature")
{
  const TriMesh mesh(3);
  const auto kle = kle_2d(ExpKernel{0.5, 1.0, 1.0}, 2, 0.1);
  const ChaosBasis in(2, 2), out(2, 2);
  const auto pce = lognormal_pce(kle, in, mesh);
  const auto m = triple_tensor(in, out);
  const auto t = quad_tensor(in, out);
  const std::vector<double> f(mesh.num_vertices(), 0.0);

  const auto lin = assemble_stochastic_linear(mesh, pce, m, out, f, neumann_only());
  const auto ref = brute_force(mesh, pce, out, nullptr);
  CHECK(oracle::max_abs(oracle::dense(lin.matrix) - ref) < 1e-10);

  std::vector<double> u(mesh.num_vertices() * out.size());
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    u[i] = 0.05 * std::sin(1.0 + 0.7 * static_cast<double>(i));
  }
  const auto pic = assemble_stochastic_picard(mesh, pce, u, m, t, out, f, neumann_only());
  const auto ref_pic = brute_force(mesh, pce, out, &u);
  CHECK(oracle::max_abs(oracle::dense(pic.matrix) - ref_pic) < 1e-10);
}

TEST_CASE("picard assembly reductions")
{
  const TriMesh mesh(4);
  const auto kle = kle_2d(ExpKernel{0.3, 1.0, 1.0}, 2);
  const ChaosBasis in(2, 2), out(2, 3);
  const auto pce = lognormal_pce(kle, in, mesh);
  const auto m = triple_tensor(in, out);
  const auto t = quad_tensor(in, out);
  const std::vector<double> f(mesh.num_vertices(), 0.0);
  const BCSpec bc = BCSpec::left_right(0.0, 1.0);

  const std::vector<double> zero(mesh.num_vertices() * out.size(), 0.0);
  const auto lin = assemble_stochastic_linear(mesh, pce, m, out, f, bc);
  const auto pic0 = assemble_stochastic_picard(mesh, pce, zero, m, t, out, f, bc);
  CHECK(oracle::max_abs(oracle::dense(lin.matrix) - oracle::dense(pic0.matrix)) < 1e-14);

  std::vector<double> u(zero.size());
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    u[i] = 0.02 * std::cos(0.3 * static_cast<double>(i));
  }
  const auto pic = assemble_stochastic_picard(mesh, pce, u, m, t, out, f, bc);
  const auto d = oracle::dense(pic.matrix);
  CHECK(oracle::max_abs(d - d.transpose()) <= 1e-12 * oracle::max_abs(d));
  CHECK(oracle::max_abs(d - oracle::dense(lin.matrix)) > 1e-6);

  // Large negative state drives the effective coefficient below zero.
  std::vector<double> bad(zero.size(), 0.0);
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    bad[v * out.size()] = -3.0;
  }
  CHECK_THROWS_AS(assemble_stochastic_picard(mesh, pce, bad, m, t, out, f, bc), NumericalError);
  CHECK_THROWS_AS(assemble_stochastic_picard(mesh, pce, std::vector<double>(3), m, t, out, f, bc),
                  std::invalid_argument);
}

TEST_CASE("single chaos term matches deterministic picard assembly")
{
  const TriMesh mesh(4);
  const auto kle = kle_2d(ExpKernel{0.0, 1.0, 1.0}, 2, 0.3);
  const ChaosBasis b(2, 0);
  const auto pce = lognormal_pce(kle, b, mesh);
  const auto m = triple_tensor(b, b);
  const auto t = quad_tensor(b, b);
  const std::vector<double> f(mesh.num_vertices(), 1.0);
  std::vector<double> u(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    u[v] = mesh.vertices()[v].x * (1.0 - mesh.vertices()[v].y);
  }
  const BCSpec bc = BCSpec::left_right(0.0, 1.0);
  const auto sto = assemble_stochastic_picard(mesh, pce, u, m, t, b, f, bc);
  const auto q = picard_coefficient(pce.coeffs[0], u, 1);
  const auto det = assemble_deterministic(mesh, q, f, bc);
  CHECK(oracle::max_abs(oracle::dense(sto.matrix) - oracle::dense(det.matrix)) < 1e-13);
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    CHECK(sto.rhs[v] == doctest::Approx(det.rhs[v]).epsilon(1e-14));
  }
}

TEST_CASE("penalty boundary treatment")
{
  const TriMesh mesh(4);
  const std::vector<double> c(mesh.num_vertices(), 1.0), f(mesh.num_vertices(), 0.0);
  BCSpec bc = BCSpec::all_dirichlet(1.0);
  bc.mode = BCSpec::Mode::Penalty;
  bc.penalty = 1e7;
  const auto sys = assemble_deterministic(mesh, c, f, bc);
  CHECK(sys.matrix.rows() == mesh.num_vertices());
  const SparseLu lu(sys.matrix);
  const auto u = lu.solve(sys.rhs);
  for (double x : u)
  {
    CHECK(x == doctest::Approx(1.0).epsilon(1e-5));
  }
  const auto unconstrained = assemble_deterministic(mesh, c, f, neumann_only());
  CHECK(sys.matrix.at(0, 0) == doctest::Approx(unconstrained.matrix.at(0, 0) + 1e7));
}
