// SPDX-License-Identifier: Apache-2.0

#include "sgdd/parallel.hpp"

#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace sgdd
{

namespace
{
int g_num_threads = 1;
}

void set_num_threads(int n)
{
  if (n < 1)
  {
    throw std::invalid_argument("thread count must be >= 1");
  }
  g_num_threads = n;
  omp_set_num_threads(n);
}

int num_threads() { return g_num_threads; }

double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
  {
    y[i] += alpha * x[i];
  }
}

void scale(double alpha, std::span<double> x)
{
  for (double &v : x)
  {
    v *= alpha;
  }
}

}  // namespace sgdd
