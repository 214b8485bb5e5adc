// SPDX-License-Identifier: Apache-2.0

#include "sgdd/chaos.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace sgdd
{

namespace
{

double factorial(int n)
{
  double f = 1.0;
  for (int k = 2; k <= n; ++k)
  {
    f *= k;
  }
  return f;
}

double binomial(int n, int k)
{
  if (k < 0 || k > n)
  {
    return 0.0;
  }
  double b = 1.0;
  for (int r = 1; r <= k; ++r)
  {
    b = b * (n - k + r) / r;
  }
  return b;
}

void compositions(int remaining, int pos, MultiIndex &cur, std::vector<MultiIndex> &out)
{
  const int M = static_cast<int>(cur.size());
  if (pos == M - 1)
  {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int d = remaining; d >= 0; --d)
  {
    cur[pos] = d;
    compositions(remaining - d, pos + 1, cur, out);
  }
}

void check_bases(const ChaosBasis &input, const ChaosBasis &output)
{
  if (input.num_vars() != output.num_vars())
  {
    throw std::invalid_argument("chaos tensor: input and output bases differ in M (" +
                                std::to_string(input.num_vars()) + " vs " +
                                std::to_string(output.num_vars()) + ")");
  }
}

}  // namespace

double hermite_eval(int k, double x)
{
  if (k < 0)
  {
    throw std::invalid_argument("hermite_eval: negative degree");
  }
  if (k == 0)
  {
    return 1.0;
  }
  double h0 = 1.0, h1 = x;
  for (int n = 1; n < k; ++n)
  {
    const double h2 = x * h1 - n * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double basis_eval(const MultiIndex &alpha, std::span<const double> xi)
{
  if (alpha.size() != xi.size())
  {
    throw std::invalid_argument("basis_eval: multi-index has " + std::to_string(alpha.size()) +
                                " variables but xi has " + std::to_string(xi.size()));
  }
  double v = 1.0;
  for (std::size_t k = 0; k < alpha.size(); ++k)
  {
    v *= hermite_eval(alpha[k], xi[k]);
  }
  return v;
}

double norm_sq(const MultiIndex &alpha)
{
  double v = 1.0;
  for (int a : alpha)
  {
    v *= factorial(a);
  }
  return v;
}

double hermite_triple(int a, int b, int c)
{
  const int sum = a + b + c;
  if (sum % 2 != 0)
  {
    return 0.0;
  }
  const int s = sum / 2;
  if (s < a || s < b || s < c)
  {
    return 0.0;
  }
  return factorial(a) * factorial(b) * factorial(c) /
         (factorial(s - a) * factorial(s - b) * factorial(s - c));
}

double hermite_quad(int a, int b, int c, int d)
{
  // He_a He_b = sum_r r! C(a,r) C(b,r) He_{a+b-2r}
  double v = 0.0;
  for (int r = 0; r <= std::min(a, b); ++r)
  {
    const double t = hermite_triple(a + b - 2 * r, c, d);
    if (t != 0.0)
    {
      v += factorial(r) * binomial(a, r) * binomial(b, r) * t;
    }
  }
  return v;
}

long basis_size(int M, int p)
{
  // C(M + p, p), built incrementally to stay exact in integers.
  long b = 1;
  for (int r = 1; r <= p; ++r)
  {
    b = b * (M + r) / r;
  }
  return b;
}

ChaosBasis::ChaosBasis(int M, int p) : M_(M), p_(p)
{
  if (M < 1)
  {
    throw std::invalid_argument("ChaosBasis: M must be >= 1");
  }
  if (p < 0)
  {
    throw std::invalid_argument("ChaosBasis: p must be >= 0");
  }
  MultiIndex cur(M, 0);
  for (int d = 0; d <= p; ++d)
  {
    compositions(d, 0, cur, indices_);
  }
  norm_sq_.reserve(indices_.size());
  for (const auto &a : indices_)
  {
    norm_sq_.push_back(sgdd::norm_sq(a));
  }
}

int ChaosBasis::total_degree(int i) const
{
  int s = 0;
  for (int a : indices_[i])
  {
    s += a;
  }
  return s;
}

int ChaosBasis::find(const MultiIndex &alpha) const
{
  const auto it = std::find(indices_.begin(), indices_.end(), alpha);
  return it == indices_.end() ? -1 : static_cast<int>(it - indices_.begin());
}

double ChaosBasis::eval(int i, std::span<const double> xi) const
{
  return basis_eval(indices_[i], xi);
}

std::vector<double> ChaosBasis::eval_all(std::span<const double> xi) const
{
  if (static_cast<int>(xi.size()) != M_)
  {
    throw std::invalid_argument("ChaosBasis::eval_all: dimension mismatch");
  }
  // Univariate tables, then products.
  std::vector<double> he(static_cast<std::size_t>(M_) * (p_ + 1));
  for (int k = 0; k < M_; ++k)
  {
    double h0 = 1.0, h1 = xi[k];
    he[k * (p_ + 1)] = 1.0;
    if (p_ >= 1)
    {
      he[k * (p_ + 1) + 1] = h1;
    }
    for (int n = 1; n < p_; ++n)
    {
      const double h2 = xi[k] * h1 - n * h0;
      h0 = h1;
      h1 = h2;
      he[k * (p_ + 1) + n + 1] = h2;
    }
  }
  std::vector<double> out(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i)
  {
    double v = 1.0;
    for (int k = 0; k < M_; ++k)
    {
      v *= he[k * (p_ + 1) + indices_[i][k]];
    }
    out[i] = v;
  }
  return out;
}

ChaosBasis enumerate_basis(int M, int p) { return ChaosBasis(M, p); }

TripleTensor::TripleTensor(int n_in, int n_out, std::vector<TripleEntry> entries)
  : n_in_(n_in), n_out_(n_out), entries_(std::move(entries))
{
}

double TripleTensor::value(int i, int j, int k) const
{
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), TripleEntry{i, j, k, 0.0},
                                   [](const TripleEntry &a, const TripleEntry &b)
                                   {
                                     return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
                                   });
  if (it != entries_.end() && it->i == i && it->j == j && it->k == k)
  {
    return it->value;
  }
  return 0.0;
}

void TripleTensor::write_csv(const std::filesystem::path &path) const
{
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot open " + path.string());
  }
  out.precision(17);
  out << "i,j,k,value\n";
  for (const auto &e : entries_)
  {
    out << e.i << ',' << e.j << ',' << e.k << ',' << e.value << '\n';
  }
}

QuadTensor::QuadTensor(int n_in, int n_out, std::vector<QuadEntry> entries)
  : n_in_(n_in), n_out_(n_out), entries_(std::move(entries))
{
}

double QuadTensor::value(int i, int j, int k, int l) const
{
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), QuadEntry{i, j, k, l, 0.0},
      [](const QuadEntry &a, const QuadEntry &b)
      { return std::tie(a.i, a.j, a.k, a.l) < std::tie(b.i, b.j, b.k, b.l); });
  if (it != entries_.end() && it->i == i && it->j == j && it->k == k && it->l == l)
  {
    return it->value;
  }
  return 0.0;
}

void QuadTensor::write_csv(const std::filesystem::path &path) const
{
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot open " + path.string());
  }
  out.precision(17);
  out << "i,j,k,l,value\n";
  for (const auto &e : entries_)
  {
    out << e.i << ',' << e.j << ',' << e.k << ',' << e.l << ',' << e.value << '\n';
  }
}

TripleTensor triple_tensor(const ChaosBasis &input, const ChaosBasis &output)
{
  check_bases(input, output);
  const int M = input.num_vars();
  const int pmax = std::max(input.order(), output.order());
  const int w = pmax + 1;
  std::vector<double> t3(static_cast<std::size_t>(w) * w * w);
  for (int a = 0; a <= pmax; ++a)
    for (int b = 0; b <= pmax; ++b)
      for (int c = 0; c <= pmax; ++c)
      {
        t3[(a * w + b) * w + c] = hermite_triple(a, b, c);
      }

  std::vector<TripleEntry> entries;
  for (int i = 0; i < input.size(); ++i)
  {
    const auto &ai = input[i];
    for (int j = 0; j < output.size(); ++j)
    {
      const auto &aj = output[j];
      for (int k = 0; k < output.size(); ++k)
      {
        const auto &ak = output[k];
        double v = 1.0;
        for (int d = 0; d < M && v != 0.0; ++d)
        {
          v *= t3[(ai[d] * w + aj[d]) * w + ak[d]];
        }
        if (v != 0.0)
        {
          entries.push_back({i, j, k, v});
        }
      }
    }
  }
  return TripleTensor(input.size(), output.size(), std::move(entries));
}

QuadTensor quad_tensor(const ChaosBasis &input, const ChaosBasis &output)
{
  check_bases(input, output);
  const int M = input.num_vars();
  const int pmax = std::max(input.order(), output.order());
  const int w = pmax + 1;
  std::vector<double> t4(static_cast<std::size_t>(w) * w * w * w);
  for (int a = 0; a <= pmax; ++a)
    for (int b = 0; b <= pmax; ++b)
      for (int c = 0; c <= pmax; ++c)
        for (int d = 0; d <= pmax; ++d)
        {
          t4[((a * w + b) * w + c) * w + d] = hermite_quad(a, b, c, d);
        }

  std::vector<QuadEntry> entries;
  for (int i = 0; i < input.size(); ++i)
  {
    const auto &ai = input[i];
    for (int j = 0; j < output.size(); ++j)
    {
      const auto &aj = output[j];
      for (int k = 0; k < output.size(); ++k)
      {
        const auto &ak = output[k];
        for (int l = 0; l < output.size(); ++l)
        {
          const auto &al = output[l];
          double v = 1.0;
          for (int d = 0; d < M && v != 0.0; ++d)
          {
            v *= t4[((ai[d] * w + aj[d]) * w + ak[d]) * w + al[d]];
          }
          if (v != 0.0)
          {
            entries.push_back({i, j, k, l, v});
          }
        }
      }
    }
  }
  return QuadTensor(input.size(), output.size(), std::move(entries));
}

}  // namespace sgdd
