// SPDX-License-Identifier: Apache-2.0

#include "sgdd/randomfield.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sgdd
{

namespace
{

double bisect(const std::function<double(double)> &f, double lo, double hi)
{
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0)
  {
    return lo;
  }
  if (fhi == 0.0)
  {
    return hi;
  }
  if ((flo > 0.0) == (fhi > 0.0))
  {
    throw std::logic_error("kle_1d: root not bracketed in [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it)
  {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) < 1e-13 && hi - lo < 1e-12 * std::max(1.0, mid))
    {
      break;
    }
    if (fm == 0.0 || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * mid)
    {
      break;
    }
    if ((fm > 0.0) == (flo > 0.0))
    {
      lo = mid;
      flo = fm;
    }
    else
    {
      hi = mid;
    }
  }
  return mid;
}

}  // namespace

void ExpKernel::validate() const
{
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
  {
    throw std::invalid_argument("ExpKernel: sigma must be >= 0");
  }
  if (!(bx > 0.0) || !(by > 0.0))
  {
    throw std::invalid_argument("ExpKernel: correlation lengths must be > 0");
  }
}

double Kle1dMode::eval(double t) const
{
  const double s = t - half_length;
  return scale * (even ? std::cos(omega * s) : std::sin(omega * s));
}

std::vector<Kle1dMode> kle_1d(double b, double length, int M1)
{
  if (!(b > 0.0) || !(length > 0.0))
  {
    throw std::invalid_argument("kle_1d: b and length must be > 0");
  }
  if (M1 < 1)
  {
    throw std::invalid_argument("kle_1d: M1 must be >= 1");
  }
  const double a = 0.5 * length;
  const double pi = std::numbers::pi;
  auto even_f = [&](double w) { return b * w * std::sin(w * a) - std::cos(w * a); };
  auto odd_f = [&](double w) { return b * w * std::cos(w * a) + std::sin(w * a); };

  std::vector<Kle1dMode> modes;
  modes.reserve(M1);
  for (int k = 0; static_cast<int>(modes.size()) < M1; ++k)
  {
    // Even family root in (k pi / a, (k + 1/2) pi / a).
    {
      const double lo = k * pi / a, hi = (k + 0.5) * pi / a;
      const double w = bisect(even_f, lo, hi);
      const double nrm = a + std::sin(2.0 * w * a) / (2.0 * w);
      modes.push_back({2.0 * b / (1.0 + b * b * w * w), w, true, a, 1.0 / std::sqrt(nrm)});
    }
    if (static_cast<int>(modes.size()) == M1)
    {
      break;
    }
    // Odd family root in ((k + 1/2) pi / a, (k + 1) pi / a).
    {
      const double lo = (k + 0.5) * pi / a, hi = (k + 1) * pi / a;
      const double w = bisect(odd_f, lo, hi);
      const double nrm = a - std::sin(2.0 * w * a) / (2.0 * w);
      modes.push_back({2.0 * b / (1.0 + b * b * w * w), w, false, a, 1.0 / std::sqrt(nrm)});
    }
  }
  return modes;
}

KLExpansion::KLExpansion(double g0, double sigma, std::vector<Kle2dMode> modes)
  : g0_(g0), sigma_(sigma), modes_(std::move(modes))
{
}

double KLExpansion::g(int k, Point p) const
{
  return std::sqrt(modes_[k].lambda) * modes_[k].eval(p.x, p.y);
}

double KLExpansion::variance_fraction(int k) const
{
  if (sigma_ == 0.0)
  {
    return 1.0;
  }
  double s = 0.0;
  for (int i = 0; i < k && i < size(); ++i)
  {
    s += modes_[i].lambda;
  }
  return s / (sigma_ * sigma_);
}

void KLExpansion::write_csv(const std::filesystem::path &path) const
{
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot open " + path.string());
  }
  out.precision(17);
  out << "index,lambda,capture\n";
  for (int k = 0; k < size(); ++k)
  {
    out << k + 1 << ',' << modes_[k].lambda << ',' << variance_fraction(k + 1) << '\n';
  }
}

KLExpansion kle_2d(const ExpKernel &kernel, int M, double g0)
{
  kernel.validate();
  if (M < 1)
  {
    throw std::invalid_argument("kle_2d: M must be >= 1");
  }
  const auto mx = kle_1d(kernel.bx, 1.0, M);
  const auto my = kle_1d(kernel.by, 1.0, M);
  // Both 1D sequences decrease, so a pair (i, j) among the top M has (i+1)(j+1) <= M.
  std::vector<Kle2dMode> all;
  for (int i = 0; i < M; ++i)
  {
    for (int j = 0; (i + 1) * (j + 1) <= M; ++j)
    {
      all.push_back({kernel.sigma * kernel.sigma * mx[i].lambda * my[j].lambda, mx[i], my[j]});
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Kle2dMode &p, const Kle2dMode &q) { return p.lambda > q.lambda; });
  all.resize(M);
  return KLExpansion(g0, kernel.sigma, std::move(all));
}

LognormalPCE lognormal_pce(const KLExpansion &kle, const ChaosBasis &input_basis,
                           const TriMesh &mesh)
{
  const int M = kle.size();
  if (input_basis.num_vars() != M)
  {
    throw std::invalid_argument("lognormal_pce: basis has " +
                                std::to_string(input_basis.num_vars()) +
                                " variables but the expansion has " + std::to_string(M));
  }
  const int nv = mesh.num_vertices();
  const int P = input_basis.size();
  LognormalPCE pce{input_basis, std::vector<Vector>(P, Vector(nv))};
  std::vector<double> g(M);
  for (int v = 0; v < nv; ++v)
  {
    const Point p = mesh.vertices()[v];
    double s2 = 0.0;
    for (int k = 0; k < M; ++k)
    {
      g[k] = kle.g(k, p);
      s2 += g[k] * g[k];
    }
    const double c0 = std::exp(kle.g0() + 0.5 * s2);
    for (int i = 0; i < P; ++i)
    {
      const auto &alpha = input_basis[i];
      double c = c0;
      for (int k = 0; k < M; ++k)
      {
        for (int d = 1; d <= alpha[k]; ++d)
        {
          c *= g[k] / d;
        }
      }
      pce.coeffs[i][v] = c;
    }
  }
  return pce;
}

FieldSampler::FieldSampler(const KLExpansion &kle, const TriMesh &mesh)
  : M_(kle.size()), nv_(mesh.num_vertices()), g0_(kle.g0()),
    g_(static_cast<std::size_t>(kle.size()) * mesh.num_vertices())
{
  for (int v = 0; v < nv_; ++v)
  {
    for (int k = 0; k < M_; ++k)
    {
      g_[static_cast<std::size_t>(v) * M_ + k] = kle.g(k, mesh.vertices()[v]);
    }
  }
}

void FieldSampler::sample(std::span<const double> xi, std::span<double> out) const
{
  if (static_cast<int>(xi.size()) != M_ || static_cast<int>(out.size()) != nv_)
  {
    throw std::invalid_argument("FieldSampler::sample: dimension mismatch");
  }
  for (int v = 0; v < nv_; ++v)
  {
    double s = g0_;
    const double *gv = &g_[static_cast<std::size_t>(v) * M_];
    for (int k = 0; k < M_; ++k)
    {
      s += gv[k] * xi[k];
    }
    out[v] = std::exp(s);
  }
}

Vector FieldSampler::sample(std::span<const double> xi) const
{
  Vector out(nv_);
  sample(xi, out);
  return out;
}

Vector sample_field(const KLExpansion &kle, std::span<const double> xi, const TriMesh &mesh)
{
  return FieldSampler(kle, mesh).sample(xi);
}

}  // namespace sgdd
