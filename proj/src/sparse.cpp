// SPDX-License-Identifier: Apache-2.0

#include "sgdd/sparse.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sgdd
{

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                     std::vector<double> values)
  : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
    values_(std::move(values))
{
  if (rows < 0 || cols < 0 || row_ptr_.size() != static_cast<std::size_t>(rows) + 1 ||
      col_idx_.size() != values_.size() || row_ptr_.front() != 0 ||
      static_cast<std::size_t>(row_ptr_.back()) != col_idx_.size())
  {
    throw std::invalid_argument("CsrMatrix: inconsistent array sizes");
  }
  for (int i = 0; i < rows; ++i)
  {
    if (row_ptr_[i + 1] < row_ptr_[i])
    {
      throw std::invalid_argument("CsrMatrix: row pointers not monotone");
    }
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
    {
      if (col_idx_[p] < 0 || col_idx_[p] >= cols)
      {
        throw std::invalid_argument("CsrMatrix: column index out of range");
      }
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
      {
        throw std::invalid_argument("CsrMatrix: columns unsorted or duplicated in row " +
                                    std::to_string(i));
      }
    }
  }
}

CsrMatrix CsrMatrix::identity(int n)
{
  std::vector<int> rp(n + 1), ci(n);
  for (int i = 0; i <= n; ++i)
  {
    rp[i] = i;
  }
  for (int i = 0; i < n; ++i)
  {
    ci[i] = i;
  }
  return CsrMatrix(n, n, std::move(rp), std::move(ci), std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets)
{
  std::sort(triplets.begin(), triplets.end(), [](const Triplet &a, const Triplet &b)
            { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  std::vector<int> rp(rows + 1, 0), ci;
  std::vector<double> v;
  ci.reserve(triplets.size());
  v.reserve(triplets.size());
  int last_row = -1, last_col = -1;
  for (const auto &t : triplets)
  {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
    {
      throw std::invalid_argument("from_triplets: index out of range");
    }
    if (t.row == last_row && t.col == last_col)
    {
      v.back() += t.value;
      continue;
    }
    ci.push_back(t.col);
    v.push_back(t.value);
    rp[t.row + 1]++;
    last_row = t.row;
    last_col = t.col;
  }
  for (int i = 0; i < rows; ++i)
  {
    rp[i + 1] += rp[i];
  }
  return CsrMatrix(rows, cols, std::move(rp), std::move(ci), std::move(v));
}

std::ptrdiff_t CsrMatrix::find(int i, int j) const
{
  auto first = col_idx_.begin() + row_ptr_[i];
  auto last = col_idx_.begin() + row_ptr_[i + 1];
  auto it = std::lower_bound(first, last, j);
  if (it != last && *it == j)
  {
    return it - col_idx_.begin();
  }
  return -1;
}

double CsrMatrix::at(int i, int j) const
{
  const auto p = find(i, j);
  return p < 0 ? 0.0 : values_[p];
}

std::vector<double> CsrMatrix::diagonal() const
{
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (int i = 0; i < static_cast<int>(d.size()); ++i)
  {
    d[i] = at(i, i);
  }
  return d;
}

CsrMatrix CsrMatrix::transpose() const
{
  std::vector<int> rp(cols_ + 1, 0);
  for (int c : col_idx_)
  {
    rp[c + 1]++;
  }
  for (int j = 0; j < cols_; ++j)
  {
    rp[j + 1] += rp[j];
  }
  std::vector<int> next(rp.begin(), rp.end() - 1);
  std::vector<int> ci(nnz());
  std::vector<double> v(nnz());
  for (int i = 0; i < rows_; ++i)
  {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
    {
      const int q = next[col_idx_[p]]++;
      ci[q] = i;
      v[q] = values_[p];
    }
  }
  return CsrMatrix(cols_, rows_, std::move(rp), std::move(ci), std::move(v));
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
  {
    throw std::invalid_argument("spmv: dimension mismatch");
  }
  const int *rp = row_ptr_.data();
  const int *ci = col_idx_.data();
  const double *v = values_.data();
#pragma omp parallel for schedule(static) if (rows_ > 50000)
  for (int i = 0; i < rows_; ++i)
  {
    double s = 0.0;
    for (int p = rp[i]; p < rp[i + 1]; ++p)
    {
      s += v[p] * x[ci[p]];
    }
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::to_dense() const
{
  std::vector<double> d(static_cast<std::size_t>(rows_) * cols_, 0.0);
  for (int i = 0; i < rows_; ++i)
  {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
    {
      d[static_cast<std::size_t>(i) * cols_ + col_idx_[p]] = values_[p];
    }
  }
  return d;
}

Vector spmv(const CsrMatrix &a, std::span<const double> x)
{
  Vector y(a.rows());
  a.multiply(x, y);
  return y;
}

CsrMatrix multiply(const CsrMatrix &a, const CsrMatrix &b)
{
  if (a.cols() != b.rows())
  {
    throw std::invalid_argument("multiply: inner dimension mismatch");
  }
  const auto arp = a.row_ptr();
  const auto aci = a.col_idx();
  const auto av = a.values();
  const auto brp = b.row_ptr();
  const auto bci = b.col_idx();
  const auto bv = b.values();

  std::vector<int> rp(a.rows() + 1, 0);
  std::vector<int> ci;
  std::vector<double> v;
  std::vector<int> marker(b.cols(), -1);
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<int> cols;
  for (int i = 0; i < a.rows(); ++i)
  {
    cols.clear();
    for (int p = arp[i]; p < arp[i + 1]; ++p)
    {
      const int k = aci[p];
      const double aik = av[p];
      for (int q = brp[k]; q < brp[k + 1]; ++q)
      {
        const int j = bci[q];
        if (marker[j] != i)
        {
          marker[j] = i;
          acc[j] = 0.0;
          cols.push_back(j);
        }
        acc[j] += aik * bv[q];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (int j : cols)
    {
      ci.push_back(j);
      v.push_back(acc[j]);
    }
    rp[i + 1] = static_cast<int>(ci.size());
  }
  return CsrMatrix(a.rows(), b.cols(), std::move(rp), std::move(ci), std::move(v));
}

CsrMatrix triple_product(const CsrMatrix &r, const CsrMatrix &a, const CsrMatrix &p)
{
  return multiply(r, multiply(a, p));
}

CsrMatrix submatrix(const CsrMatrix &a, std::span<const int> idx)
{
  std::vector<int> local(a.cols(), -1);
  for (std::size_t k = 0; k < idx.size(); ++k)
  {
    if (k > 0 && idx[k] <= idx[k - 1])
    {
      throw std::invalid_argument("submatrix: index set must be sorted and unique");
    }
    local[idx[k]] = static_cast<int>(k);
  }
  const auto arp = a.row_ptr();
  const auto aci = a.col_idx();
  const auto av = a.values();
  std::vector<int> rp(idx.size() + 1, 0);
  std::vector<int> ci;
  std::vector<double> v;
  for (std::size_t k = 0; k < idx.size(); ++k)
  {
    const int i = idx[k];
    for (int p = arp[i]; p < arp[i + 1]; ++p)
    {
      const int lj = local[aci[p]];
      if (lj >= 0)
      {
        ci.push_back(lj);
        v.push_back(av[p]);
      }
    }
    rp[k + 1] = static_cast<int>(ci.size());
  }
  const int n = static_cast<int>(idx.size());
  return CsrMatrix(n, n, std::move(rp), std::move(ci), std::move(v));
}

void IdentityOperator::apply(std::span<const double> x, std::span<double> y) const
{
  std::copy(x.begin(), x.end(), y.begin());
}

void write_matrix_market(const CsrMatrix &a, const std::filesystem::path &path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot open " + path.string());
  }
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out << std::setprecision(17);
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (int i = 0; i < a.rows(); ++i)
  {
    for (int p = rp[i]; p < rp[i + 1]; ++p)
    {
      out << i + 1 << ' ' << ci[p] + 1 << ' ' << v[p] << '\n';
    }
  }
}

CsrMatrix read_matrix_market(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::string line;
  std::getline(in, line);
  if (line.rfind("%%MatrixMarket", 0) != 0 || line.find("coordinate") == std::string::npos)
  {
    throw std::runtime_error("not a MatrixMarket coordinate file: " + path.string());
  }
  const bool symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line) && (line.empty() || line[0] == '%'))
  {
  }
  std::istringstream header(line);
  int rows = 0, cols = 0;
  std::size_t count = 0;
  header >> rows >> cols >> count;
  std::vector<Triplet> t;
  t.reserve(symmetric ? 2 * count : count);
  for (std::size_t k = 0; k < count; ++k)
  {
    int i, j;
    double v;
    if (!(in >> i >> j >> v))
    {
      throw std::runtime_error("truncated MatrixMarket file: " + path.string());
    }
    t.push_back({i - 1, j - 1, v});
    if (symmetric && i != j)
    {
      t.push_back({j - 1, i - 1, v});
    }
  }
  return CsrMatrix::from_triplets(rows, cols, std::move(t));
}

}  // namespace sgdd
