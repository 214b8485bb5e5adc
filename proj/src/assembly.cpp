// SPDX-License-Identifier: Apache-2.0

#include "sgdd/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sgdd/errors.hpp"

namespace sgdd
{

namespace
{

// Nonzero (row block, column block) pairs; the diagonal is always present.
struct BlockPattern
{
  int nb = 1;
  std::vector<std::vector<int>> cols;
  std::vector<int> pair_of;
  int npairs = 0;

  explicit BlockPattern(int nblocks) : nb(nblocks), cols(nblocks), pair_of(nblocks * nblocks, -1)
  {
    for (int l = 0; l < nb; ++l)
    {
      add(l, l);
    }
  }

  void add(int l, int k) { pair_of[l * nb + k] = 0; }

  void finalize()
  {
    npairs = 0;
    for (int l = 0; l < nb; ++l)
    {
      cols[l].clear();
      for (int k = 0; k < nb; ++k)
      {
        if (pair_of[l * nb + k] >= 0)
        {
          pair_of[l * nb + k] = npairs++;
          cols[l].push_back(k);
        }
      }
    }
  }

  int pair(int l, int k) const { return pair_of[l * nb + k]; }
};

struct ElementGeometry
{
  double area;
  double k[3][3];
};

ElementGeometry element(const TriMesh &mesh, int t)
{
  const auto &tri = mesh.triangles()[t];
  const Point &p0 = mesh.vertices()[tri[0]], &p1 = mesh.vertices()[tri[1]],
              &p2 = mesh.vertices()[tri[2]];
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  const double gx[3] = {(p1.y - p2.y) / det, (p2.y - p0.y) / det, (p0.y - p1.y) / det};
  const double gy[3] = {(p2.x - p1.x) / det, (p0.x - p2.x) / det, (p1.x - p0.x) / det};
  ElementGeometry e{0.5 * det, {}};
  for (int a = 0; a < 3; ++a)
  {
    for (int b = 0; b < 3; ++b)
    {
      e.k[a][b] = e.area * (gx[a] * gx[b] + gy[a] * gy[b]);
    }
  }
  return e;
}

int neighbour_pos(const TriMesh &mesh, int v, int w)
{
  const auto &nb = mesh.neighbours(v);
  return static_cast<int>(std::lower_bound(nb.begin(), nb.end(), w) - nb.begin());
}

// Assembles the block system from nodal block coefficients q[v * npairs + p]
// and a scalar load placed in block 0. `weights[l]` scales the penalty term.
BlockCsrSystem assemble_blocks(const TriMesh &mesh, const BlockPattern &pat,
                               std::span<const double> q, std::span<const double> load,
                               const BCSpec &bc, std::span<const double> weights)
{
  bc.validate();
  const int nv = mesh.num_vertices();
  const int nb = pat.nb;
  const int n = nv * nb;

  std::vector<int> row_ptr(n + 1, 0);
  for (int v = 0; v < nv; ++v)
  {
    const int deg = static_cast<int>(mesh.neighbours(v).size());
    for (int l = 0; l < nb; ++l)
    {
      row_ptr[v * nb + l + 1] = row_ptr[v * nb + l] + deg * static_cast<int>(pat.cols[l].size());
    }
  }
  std::vector<int> col_idx(row_ptr[n]);
  std::vector<double> val(row_ptr[n], 0.0);
  for (int v = 0; v < nv; ++v)
  {
    for (int l = 0; l < nb; ++l)
    {
      int p = row_ptr[v * nb + l];
      for (int w : mesh.neighbours(v))
      {
        for (int k : pat.cols[l])
        {
          col_idx[p++] = w * nb + k;
        }
      }
    }
  }

  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto &tri = mesh.triangles()[t];
    const auto e = element(mesh, t);
    int npos[3][3];
    for (int a = 0; a < 3; ++a)
    {
      for (int b = 0; b < 3; ++b)
      {
        npos[a][b] = neighbour_pos(mesh, tri[a], tri[b]);
      }
    }
    for (int l = 0; l < nb; ++l)
    {
      const int len = static_cast<int>(pat.cols[l].size());
      for (int kp = 0; kp < len; ++kp)
      {
        const int pr = pat.pair(l, pat.cols[l][kp]);
        const double ce = (q[static_cast<std::size_t>(tri[0]) * pat.npairs + pr] +
                           q[static_cast<std::size_t>(tri[1]) * pat.npairs + pr] +
                           q[static_cast<std::size_t>(tri[2]) * pat.npairs + pr]) /
                          3.0;
        if (ce == 0.0)
        {
          continue;
        }
        for (int a = 0; a < 3; ++a)
        {
          const int base = row_ptr[tri[a] * nb + l] + kp;
          for (int b = 0; b < 3; ++b)
          {
            val[base + npos[a][b] * len] += ce * e.k[a][b];
          }
        }
      }
    }
  }

  Vector rhs(n, 0.0);
  for (int v = 0; v < nv; ++v)
  {
    rhs[v * nb] = load[v];
  }

  std::vector<char> is_dir(nv, 0);
  Vector gval(nv, 0.0);
  for (int v = 0; v < nv; ++v)
  {
    if (const auto g = bc.dirichlet_value(mesh.boundary_flags(v)))
    {
      is_dir[v] = 1;
      gval[v] = *g;
    }
  }

  BlockCsrSystem sys;
  sys.nblocks = nb;
  sys.block_dim = nv;

  if (bc.mode == BCSpec::Mode::Penalty)
  {
    for (int v = 0; v < nv; ++v)
    {
      if (!is_dir[v])
      {
        continue;
      }
      for (int l = 0; l < nb; ++l)
      {
        const int r = v * nb + l;
        for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
        {
          if (col_idx[p] == r)
          {
            val[p] += bc.penalty * weights[l];
          }
        }
      }
      rhs[v * nb] += bc.penalty * weights[0] * gval[v];
    }
    sys.matrix = CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(val));
    sys.rhs = std::move(rhs);
    return sys;
  }

  // Symmetric elimination: boundary block 0 carries g, higher blocks zero.
  std::vector<int> rp(n + 1, 0);
  std::vector<int> ci;
  std::vector<double> vv;
  ci.reserve(col_idx.size());
  vv.reserve(col_idx.size());
  for (int r = 0; r < n; ++r)
  {
    const int v = r / nb;
    if (is_dir[v])
    {
      ci.push_back(r);
      vv.push_back(1.0);
      rhs[r] = (r % nb == 0) ? gval[v] : 0.0;
    }
    else
    {
      for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
      {
        const int c = col_idx[p];
        const int w = c / nb;
        if (is_dir[w])
        {
          if (c % nb == 0)
          {
            rhs[r] -= val[p] * gval[w];
          }
          continue;
        }
        ci.push_back(c);
        vv.push_back(val[p]);
      }
    }
    rp[r + 1] = static_cast<int>(ci.size());
  }
  sys.matrix = CsrMatrix(n, n, std::move(rp), std::move(ci), std::move(vv));
  sys.rhs = std::move(rhs);
  return sys;
}

void check_f(const TriMesh &mesh, std::span<const double> f)
{
  if (static_cast<int>(f.size()) != mesh.num_vertices())
  {
    throw std::invalid_argument("assembly: source field has " + std::to_string(f.size()) +
                                " values for " + std::to_string(mesh.num_vertices()) + " vertices");
  }
}

void check_stochastic(const TriMesh &mesh, const LognormalPCE &c_pce, const TripleTensor &m,
                      const ChaosBasis &out)
{
  if (c_pce.num_nodes() != mesh.num_vertices())
  {
    throw std::invalid_argument("assembly: coefficient fields do not match the mesh");
  }
  if (m.input_size() != c_pce.num_terms() || m.output_size() != out.size())
  {
    throw std::invalid_argument("assembly: triple tensor is " + std::to_string(m.input_size()) +
                                "x" + std::to_string(m.output_size()) + " but the bases have " +
                                std::to_string(c_pce.num_terms()) + " and " +
                                std::to_string(out.size()) + " terms");
  }
  if (c_pce.basis.num_vars() != out.num_vars())
  {
    throw std::invalid_argument("assembly: input and output bases differ in M");
  }
}

// Linear part sum_i m_ikl c_i into q for block (l, k).
void add_linear_coefficients(const BlockPattern &pat, const LognormalPCE &c_pce,
                             const TripleTensor &m, std::vector<double> &q)
{
  const int nv = c_pce.num_nodes();
  for (const auto &e : m.entries())
  {
    const int pr = pat.pair(e.k, e.j);
    const double *c = c_pce.coeffs[e.i].data();
    for (int v = 0; v < nv; ++v)
    {
      q[static_cast<std::size_t>(v) * pat.npairs + pr] += e.value * c[v];
    }
  }
}

std::vector<double> block_weights(const ChaosBasis &out)
{
  std::vector<double> w(out.size());
  for (int l = 0; l < out.size(); ++l)
  {
    w[l] = out.norm_sq(l);
  }
  return w;
}

}  // namespace

void BCSpec::validate() const
{
  if (mode == Mode::Penalty && !(penalty > 0.0))
  {
    throw std::invalid_argument("BCSpec: penalty weight must be > 0");
  }
}

BCSpec BCSpec::left_right(double left, double right)
{
  BCSpec bc;
  bc.dirichlet[0] = left;
  bc.dirichlet[1] = right;
  return bc;
}

BCSpec BCSpec::all_dirichlet(double value)
{
  BCSpec bc;
  bc.dirichlet.fill(value);
  return bc;
}

std::optional<double> BCSpec::dirichlet_value(unsigned flags) const
{
  static constexpr unsigned bits[4] = {kLeft, kRight, kBottom, kTop};
  for (int e = 0; e < 4; ++e)
  {
    if ((flags & bits[e]) && dirichlet[e])
    {
      return dirichlet[e];
    }
  }
  return std::nullopt;
}

CsrMatrix BlockCsrSystem::block(int k, int j) const
{
  std::vector<Triplet> trip;
  const auto rp = matrix.row_ptr();
  const auto ci = matrix.col_idx();
  const auto v = matrix.values();
  for (int node = 0; node < block_dim; ++node)
  {
    const int r = dof(node, k);
    for (int p = rp[r]; p < rp[r + 1]; ++p)
    {
      if (ci[p] % nblocks == j)
      {
        trip.push_back({node, ci[p] / nblocks, v[p]});
      }
    }
  }
  return CsrMatrix::from_triplets(block_dim, block_dim, std::move(trip));
}

Vector load_vector(const TriMesh &mesh, std::span<const double> f, const BCSpec &bc)
{
  check_f(mesh, f);
  Vector b(mesh.num_vertices(), 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto &tri = mesh.triangles()[t];
    const double a = mesh.area(t);
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
      {
        b[tri[i]] += a / 12.0 * (i == j ? 2.0 : 1.0) * f[tri[j]];
      }
    }
  }
  const int n = mesh.resolution();
  const double h = 1.0 / n;
  for (int e = 0; e < 4; ++e)
  {
    if (bc.dirichlet[e] || bc.neumann[e] == 0.0)
    {
      continue;
    }
    for (int s = 0; s < n; ++s)
    {
      int v0 = 0, v1 = 0;
      switch (e)
      {
        case 0:
          v0 = mesh.vertex_index(0, s);
          v1 = mesh.vertex_index(0, s + 1);
          break;
        case 1:
          v0 = mesh.vertex_index(n, s);
          v1 = mesh.vertex_index(n, s + 1);
          break;
        case 2:
          v0 = mesh.vertex_index(s, 0);
          v1 = mesh.vertex_index(s + 1, 0);
          break;
        default:
          v0 = mesh.vertex_index(s, n);
          v1 = mesh.vertex_index(s + 1, n);
          break;
      }
      b[v0] += 0.5 * h * bc.neumann[e];
      b[v1] += 0.5 * h * bc.neumann[e];
    }
  }
  return b;
}

LinearSystem assemble_deterministic(const TriMesh &mesh, std::span<const double> coeff,
                                    std::span<const double> f, const BCSpec &bc)
{
  check_f(mesh, coeff);
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    if (!(coeff[v] > 0.0) || !std::isfinite(coeff[v]))
    {
      throw NumericalError("assemble_deterministic: coefficient " + std::to_string(coeff[v]) +
                           " at vertex " + std::to_string(v) + " is not positive and finite");
    }
  }
  BlockPattern pat(1);
  pat.finalize();
  const Vector load = load_vector(mesh, f, bc);
  const double w = 1.0;
  auto sys = assemble_blocks(mesh, pat, coeff, load, bc, std::span<const double>(&w, 1));
  return {std::move(sys.matrix), std::move(sys.rhs)};
}

Vector picard_coefficient(std::span<const double> c, std::span<const double> u, int m)
{
  if (c.size() != u.size())
  {
    throw std::invalid_argument("picard_coefficient: size mismatch");
  }
  if (m < 0)
  {
    throw std::invalid_argument("picard_coefficient: exponent must be >= 0");
  }
  Vector q(c.size());
  for (std::size_t v = 0; v < c.size(); ++v)
  {
    q[v] = c[v] * std::pow(1.0 + u[v], m);
  }
  return q;
}

BlockCsrSystem assemble_stochastic_linear(const TriMesh &mesh, const LognormalPCE &c_pce,
                                          const TripleTensor &m, const ChaosBasis &output_basis,
                                          std::span<const double> f, const BCSpec &bc)
{
  check_stochastic(mesh, c_pce, m, output_basis);
  const int nb = output_basis.size();
  BlockPattern pat(nb);
  for (const auto &e : m.entries())
  {
    pat.add(e.k, e.j);
  }
  pat.finalize();
  std::vector<double> q(static_cast<std::size_t>(mesh.num_vertices()) * pat.npairs, 0.0);
  add_linear_coefficients(pat, c_pce, m, q);
  const Vector load = load_vector(mesh, f, bc);
  return assemble_blocks(mesh, pat, q, load, bc, block_weights(output_basis));
}

BlockCsrSystem assemble_stochastic_picard(const TriMesh &mesh, const LognormalPCE &c_pce,
                                          std::span<const double> u_prev, const TripleTensor &m,
                                          const QuadTensor &t, const ChaosBasis &output_basis,
                                          std::span<const double> f, const BCSpec &bc)
{
  check_stochastic(mesh, c_pce, m, output_basis);
  const int nb = output_basis.size();
  const int nv = mesh.num_vertices();
  if (t.input_size() != c_pce.num_terms() || t.output_size() != nb)
  {
    throw std::invalid_argument("assemble_stochastic_picard: quad tensor does not match the bases");
  }
  if (static_cast<std::size_t>(nv) * nb != u_prev.size())
  {
    throw std::invalid_argument("assemble_stochastic_picard: previous iterate has " +
                                std::to_string(u_prev.size()) + " values, expected " +
                                std::to_string(static_cast<std::size_t>(nv) * nb));
  }
  BlockPattern pat(nb);
  for (const auto &e : m.entries())
  {
    pat.add(e.k, e.j);
  }
  for (const auto &e : t.entries())
  {
    pat.add(e.l, e.k);
  }
  pat.finalize();
  std::vector<double> q(static_cast<std::size_t>(nv) * pat.npairs, 0.0);
  add_linear_coefficients(pat, c_pce, m, q);
  for (const auto &e : t.entries())
  {
    const int pr = pat.pair(e.l, e.k);
    const double *c = c_pce.coeffs[e.i].data();
    for (int v = 0; v < nv; ++v)
    {
      q[static_cast<std::size_t>(v) * pat.npairs + pr] +=
          e.value * c[v] * u_prev[static_cast<std::size_t>(v) * nb + e.j];
    }
  }
  for (int v = 0; v < nv; ++v)
  {
    for (int l = 0; l < nb; ++l)
    {
      const double d = q[static_cast<std::size_t>(v) * pat.npairs + pat.pair(l, l)];
      if (!(d > 0.0) || !std::isfinite(d))
      {
        throw NumericalError("assemble_stochastic_picard: effective coefficient " +
                             std::to_string(d) + " in block " + std::to_string(l) +
                             " at vertex " + std::to_string(v) + " is not positive");
      }
    }
  }
  const Vector load = load_vector(mesh, f, bc);
  return assemble_blocks(mesh, pat, q, load, bc, block_weights(output_basis));
}

}  // namespace sgdd
