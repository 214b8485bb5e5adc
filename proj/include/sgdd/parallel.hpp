// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

namespace sgdd
{

// Thread pool size used by the parallel kernels (subdomain solves, spmv,
// Monte Carlo samples). Results never depend on this value.
void set_num_threads(int n);
int num_threads();

// Reductions are evaluated serially in index order so that every kernel is
// bit-reproducible regardless of the thread count.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

}  // namespace sgdd
