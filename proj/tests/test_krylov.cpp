// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "sgdd/direct.hpp"
#include "sgdd/ilu.hpp"
#include "sgdd/krylov.hpp"
#include "sgdd/parallel.hpp"

using namespace sgdd;

namespace
{

std::vector<double> random_vector(int n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (double &x : v)
    x = nd(rng);
  return v;
}

double true_residual(const CsrMatrix &a, std::span<const double> x, std::span<const double> b)
{
  auto r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = b[i] - r[i];
  return norm2(r) / norm2(b);
}

// Preconditioner that runs an inner GMRES solve to a loose tolerance.
class InnerGmres : public LinearOperator
{
public:
  explicit InnerGmres(const CsrMatrix &a) : a_(a), op_(a) {}
  int size() const override { return a_.rows(); }
  void apply(std::span<const double> x, std::span<double> y) const override
  {
    std::fill(y.begin(), y.end(), 0.0);
    KrylovConfig cfg;
    cfg.rel_tol = 1e-2;
    cfg.max_iters = 100;
    gmres(op_, x, y, nullptr, cfg);
  }

private:
  const CsrMatrix &a_;
  MatrixOperator op_;
};

}  // namespace

TEST_CASE("configuration validation")
{
  KrylovConfig cfg;
  CHECK(cfg.rel_tol == 1e-5);
  CHECK(cfg.restart == 200);
  CHECK_NOTHROW(cfg.validate());
  cfg.rel_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.rel_tol = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.rel_tol = 1e-3;
  cfg.restart = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("identity systems converge in one iteration")
{
  const IdentityOperator id(30);
  const auto b = random_vector(30, 1);
  std::vector<double> x(30, 0.0);
  const auto r = gmres(id, b, x, nullptr, KrylovConfig{});
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  std::vector<double> x2(30, 0.0);
  const auto f = fgmres(id, b, x2, nullptr, KrylovConfig{});
  CHECK(f.converged);
  CHECK(f.iterations == 1);
  for (int i = 0; i < 30; ++i)
    CHECK(x2[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("exact inverse preconditioner converges in one iteration")
{
  const auto a = oracle::laplacian_2d(12);
  const SparseLu lu(a);
  const MatrixOperator op(a);
  const auto b = random_vector(a.rows(), 2);
  std::vector<double> x(a.rows(), 0.0);
  KrylovConfig cfg;
  cfg.rel_tol = 1e-10;
  const auto r = gmres(op, b, x, &lu, cfg);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(true_residual(a, x, b) <= 1e-10);
}

TEST_CASE("unpreconditioned Laplacian iterations grow with the grid")
{
  int prev = 0;
  for (int n : {8, 16, 32})
  {
    const auto a = oracle::laplacian_2d(n);
    const MatrixOperator op(a);
    const std::vector<double> b(a.rows(), 1.0);
    std::vector<double> x(a.rows(), 0.0);
    KrylovConfig cfg;
    cfg.rel_tol = 1e-8;
    const auto r = gmres(op, b, x, nullptr, cfg);
    CAPTURE(n);
    CHECK(r.converged);
    CHECK(r.rel_residual <= 1e-8);
    CHECK(true_residual(a, x, b) <= 1e-8);
    CHECK(r.iterations > prev);
    prev = r.iterations;
  }
}

TEST_CASE("residual history is non-increasing within a cycle")
{
  const auto a = oracle::sparse(oracle::random_matrix(80, 0.05, 9, 3.0));
  const MatrixOperator op(a);
  const auto b = random_vector(80, 3);
  for (int restart : {200, 7})
  {
    std::vector<double> x(80, 0.0);
    KrylovConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.restart = restart;
    const auto r = gmres(op, b, x, nullptr, cfg);
    CHECK(r.converged);
    CHECK(r.residual_history.size() == static_cast<std::size_t>(r.iterations) + 1);
    CHECK(r.residual_history[0] == doctest::Approx(1.0));
    for (int i = 1; i <= r.iterations; ++i)
    {
      if (restart == 200 || i % restart != 0)
      {
        CHECK(r.residual_history[i] <= r.residual_history[i - 1] * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("flexible variant reproduces gmres with a fixed preconditioner")
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
  {
    const int n = 60 + static_cast<int>(seed) * 7;
    const auto a = oracle::sparse(oracle::random_matrix(n, 0.06, seed, 2.5));
    const Ilu0 ilu(a);
    const MatrixOperator op(a);
    const auto b = random_vector(n, seed + 100);
    std::vector<double> x1(n, 0.0), x2(n, 0.0);
    KrylovConfig cfg;
    cfg.rel_tol = 1e-8;
    const auto g = gmres(op, b, x1, &ilu, cfg);
    const auto f = fgmres(op, b, x2, &ilu, cfg);
    CAPTURE(seed);
    CHECK(g.converged);
    CHECK(f.converged);
    CHECK(g.iterations == f.iterations);
    for (int i = 0; i < n; ++i)
    {
      CHECK(std::abs(x1[i] - x2[i]) <= 1e-10 * (1.0 + std::abs(x1[i])));
    }
  }
}

TEST_CASE("flexible variant with an inner iterative preconditioner")
{
  const auto a = oracle::laplacian_2d(20);
  const MatrixOperator op(a);
  const InnerGmres inner(a);
  const std::vector<double> b(a.rows(), 1.0);
  std::vector<double> x(a.rows(), 0.0);
  KrylovConfig cfg;
  cfg.rel_tol = 1e-8;
  const auto r = fgmres(op, b, x, &inner, cfg);
  CHECK(r.converged);
  CHECK(true_residual(a, x, b) <= 1e-8);
}

TEST_CASE("iteration cap is reported")
{
  const auto a = oracle::laplacian_2d(30);
  const MatrixOperator op(a);
  const std::vector<double> b(a.rows(), 1.0);
  std::vector<double> x(a.rows(), 0.0);
  KrylovConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.max_iters = 5;
  const auto r = gmres(op, b, x, nullptr, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 5);
  CHECK(r.rel_residual > 1e-12);
}

TEST_CASE("initial guess and zero right-hand side")
{
  const auto a = oracle::laplacian_2d(10);
  const MatrixOperator op(a);
  const auto b = random_vector(a.rows(), 4);
  const SparseLu lu(a);
  auto x = lu.solve(b);
  KrylovConfig cfg;
  cfg.rel_tol = 1e-8;
  const auto r = gmres(op, b, x, nullptr, cfg);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  std::vector<double> z(a.rows(), 0.0), xz(a.rows(), 0.0);
  const auto rz = gmres(op, z, xz, nullptr, cfg);
  CHECK(rz.converged);
  for (double v : xz)
    CHECK(v == 0.0);
}

TEST_CASE("lucky breakdown on a low-dimensional Krylov space")
{
  // b lies in a 2-dimensional invariant subspace.
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(10, 10) * 2.0;
  d(0, 1) = 1.0;
  const auto a = oracle::sparse(d);
  const MatrixOperator op(a);
  std::vector<double> b(10, 0.0), x(10, 0.0);
  b[0] = 1.0;
  b[1] = 1.0;
  KrylovConfig cfg;
  cfg.rel_tol = 1e-14;
  const auto r = gmres(op, b, x, nullptr, cfg);
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
  CHECK(true_residual(a, x, b) < 1e-13);
}
