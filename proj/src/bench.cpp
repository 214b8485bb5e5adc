// SPDX-License-Identifier: Apache-2.0

#include "sgdd/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sgdd/assembly.hpp"
#include "sgdd/condition.hpp"
#include "sgdd/io.hpp"
#include "sgdd/randomfield.hpp"
#include "sgdd/solvers.hpp"

namespace sgdd
{

namespace
{

std::string fmt(double v) { return format_double(v); }
std::string fmt(int v) { return std::to_string(v); }

SolveReport run_one(const RunConfig &cfg)
{
  switch (cfg.problem)
  {
    case ProblemKind::LinearStochastic:
      return solve_linear_stochastic(cfg).report;
    case ProblemKind::NonlinearStochastic:
      return solve_nonlinear_stochastic(cfg).report;
    case ProblemKind::LinearDeterministic:
      return solve_deterministic(cfg, 0).report;
    case ProblemKind::NonlinearDeterministic:
      return solve_deterministic(cfg, 1).report;
  }
  throw std::logic_error("run_one: unknown problem");
}

int dofs_of(const RunConfig &cfg)
{
  const int nv = (cfg.mesh_n + 1) * (cfg.mesh_n + 1);
  return cfg.stochastic() ? nv * static_cast<int>(basis_size(cfg.M, cfg.p_out)) : nv;
}

int as_int(double v, const char *what)
{
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9)
  {
    throw ConfigError("sweep", std::string(what) + " values must be integers");
  }
  return static_cast<int>(r);
}

std::vector<double> parse_list(std::string_view key, std::string_view s)
{
  std::vector<double> out;
  while (!s.empty())
  {
    const auto comma = s.find(',');
    std::string_view item = s.substr(0, comma);
    s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
    while (!item.empty() && (item.front() == ' ' || item.front() == '\t'))
      item.remove_prefix(1);
    while (!item.empty() && (item.back() == ' ' || item.back() == '\t'))
      item.remove_suffix(1);
    if (item.empty())
    {
      continue;
    }
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size())
    {
      throw ConfigError(std::string(key), "bad list entry '" + std::string(item) + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::string to_string(StudyKind k)
{
  switch (k)
  {
    case StudyKind::Strong:
      return "strong";
    case StudyKind::Weak:
      return "weak";
    case StudyKind::RandomVars:
      return "random-vars";
    case StudyKind::Order:
      return "order";
    case StudyKind::CoarseRatio:
      return "coarse-ratio";
    case StudyKind::CondRatio:
      return "cond-ratio";
  }
  return "";
}

StudyKind parse_study_kind(std::string_view s)
{
  for (auto k : {StudyKind::Strong, StudyKind::Weak, StudyKind::RandomVars, StudyKind::Order,
                 StudyKind::CoarseRatio, StudyKind::CondRatio})
  {
    if (to_string(k) == s)
    {
      return k;
    }
  }
  throw ConfigError("study", "unknown study '" + std::string(s) + "'");
}

void StudySpec::validate() const
{
  if (sweep.empty())
  {
    throw ConfigError("sweep", "must not be empty");
  }
  if (preconditioners.empty())
  {
    throw ConfigError("preconditioners", "must not be empty");
  }
  base.validate();
}

StudySpec parse_study_spec(std::string_view text)
{
  StudySpec spec;
  bool have_kind = false;
  for (const auto &[k, v] : parse_key_values(text))
  {
    if (k == "study")
    {
      spec.kind = parse_study_kind(v);
      have_kind = true;
    }
    else if (k == "sweep")
    {
      spec.sweep = parse_list(k, v);
    }
    else if (k == "preconditioners")
    {
      spec.preconditioners.clear();
      std::string_view s = v;
      while (!s.empty())
      {
        const auto comma = s.find(',');
        std::string item(s.substr(0, comma));
        s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty())
        {
          spec.preconditioners.push_back(parse_preconditioner(item));
        }
      }
    }
    else if (k == "output")
    {
      spec.output = v;
    }
    else
    {
      set_config_value(spec.base, k, v);
    }
  }
  if (!have_kind)
  {
    throw ConfigError("study", "missing");
  }
  spec.validate();
  return spec;
}

StudySpec load_study_spec(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("study", "cannot read " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_study_spec(ss.str());
}

int Table::column_index(std::string_view name) const
{
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
  {
    throw std::invalid_argument("Table: no column '" + std::string(name) + "'");
  }
  return static_cast<int>(it - header.begin());
}

std::vector<double> Table::column(std::string_view name) const
{
  const int c = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &r : rows)
  {
    out.push_back(std::stod(r[c]));
  }
  return out;
}

Table Table::where(std::string_view name, std::string_view value) const
{
  const int c = column_index(name);
  Table t{header, {}};
  for (const auto &r : rows)
  {
    if (r[c] == value)
    {
      t.rows.push_back(r);
    }
  }
  return t;
}

void Table::write_csv(const std::filesystem::path &path, const RunConfig *cfg) const
{
  if (path.has_parent_path())
  {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot open " + path.string());
  }
  if (cfg)
  {
    write_config_comment(out, *cfg);
  }
  for (std::size_t i = 0; i < header.size(); ++i)
  {
    out << (i ? "," : "") << header[i];
  }
  out << '\n';
  for (const auto &r : rows)
  {
    for (std::size_t i = 0; i < r.size(); ++i)
    {
      out << (i ? "," : "") << r[i];
    }
    out << '\n';
  }
}

int weak_mesh_size(int n0, int nsub0, int nsub)
{
  const double n = n0 * std::sqrt(static_cast<double>(nsub) / nsub0);
  return 2 * static_cast<int>(std::lround(n / 2.0));
}

Table run_strong(const StudySpec &spec)
{
  spec.validate();
  std::vector<int> nsubs;
  for (double s : spec.sweep)
  {
    nsubs.push_back(as_int(s, "nsub"));
  }
  if (std::find(nsubs.begin(), nsubs.end(), 1) == nsubs.end())
  {
    nsubs.insert(nsubs.begin(), 1);
  }
  Table t{{"preconditioner", "nsub", "mesh_n", "dofs", "outer_iterations",
           "mean_coarse_iterations", "picard_iterations", "pc_setup_seconds", "solve_seconds",
           "speedup", "efficiency", "converged"},
          {}};
  for (auto pk : spec.preconditioners)
  {
    double ts = 0.0;
    for (int ns : nsubs)
    {
      RunConfig cfg = spec.base;
      cfg.preconditioner = pk;
      cfg.nsub = ns;
      const auto r = run_one(cfg);
      const double tp = r.pc_setup_seconds + r.solve_seconds;
      if (ns == 1)
      {
        ts = tp;
      }
      const double speedup = tp > 0.0 ? ts / tp : 0.0;
      t.rows.push_back({to_string(pk), fmt(ns), fmt(cfg.mesh_n), fmt(dofs_of(cfg)),
                        fmt(r.mean_outer_iterations()), fmt(r.mean_coarse_iterations),
                        fmt(r.picard_iterations), fmt(r.pc_setup_seconds), fmt(r.solve_seconds),
                        fmt(speedup), fmt(speedup / ns), r.converged ? "1" : "0"});
    }
  }
  return t;
}

Table run_weak(const StudySpec &spec)
{
  spec.validate();
  std::vector<int> nsubs;
  for (double s : spec.sweep)
  {
    nsubs.push_back(as_int(s, "nsub"));
  }
  Table t{{"preconditioner", "nsub", "mesh_n", "dofs", "dofs_per_subdomain", "outer_iterations",
           "mean_coarse_iterations", "picard_iterations", "pc_setup_seconds", "solve_seconds",
           "weak_efficiency", "converged"},
          {}};
  const int factor = spec.base.refinement_factor();
  const int step = std::lcm(2, factor);
  for (auto pk : spec.preconditioners)
  {
    double ts = 0.0;
    for (std::size_t q = 0; q < nsubs.size(); ++q)
    {
      RunConfig cfg = spec.base;
      cfg.preconditioner = pk;
      cfg.nsub = nsubs[q];
      const int n = weak_mesh_size(spec.base.mesh_n, nsubs.front(), nsubs[q]);
      cfg.mesh_n = std::max(step, step * static_cast<int>(std::lround(static_cast<double>(n) / step)));
      const auto r = run_one(cfg);
      const double tp = r.pc_setup_seconds + r.solve_seconds;
      if (q == 0)
      {
        ts = tp;
      }
      t.rows.push_back({to_string(pk), fmt(cfg.nsub), fmt(cfg.mesh_n), fmt(dofs_of(cfg)),
                        fmt(static_cast<double>(dofs_of(cfg)) / cfg.nsub),
                        fmt(r.mean_outer_iterations()), fmt(r.mean_coarse_iterations),
                        fmt(r.picard_iterations), fmt(r.pc_setup_seconds), fmt(r.solve_seconds),
                        fmt(tp > 0.0 ? ts / tp : 0.0), r.converged ? "1" : "0"});
    }
  }
  return t;
}

Table run_param_scaling(const StudySpec &spec)
{
  spec.validate();
  Table t{{"M", "p_in", "p_out", "terms", "dofs", "outer_iterations", "picard_iterations",
           "pc_setup_seconds", "solve_seconds", "converged"},
          {}};
  for (double s : spec.sweep)
  {
    RunConfig cfg = spec.base;
    if (spec.kind == StudyKind::Order)
    {
      cfg.p_out = as_int(s, "p_out");
    }
    else
    {
      cfg.M = as_int(s, "M");
    }
    const auto r = run_one(cfg);
    t.rows.push_back({fmt(cfg.M), fmt(cfg.p_in), fmt(cfg.p_out),
                      fmt(static_cast<int>(basis_size(cfg.M, cfg.p_out))), fmt(dofs_of(cfg)),
                      fmt(r.mean_outer_iterations()), fmt(r.picard_iterations),
                      fmt(r.pc_setup_seconds), fmt(r.solve_seconds), r.converged ? "1" : "0"});
  }
  return t;
}

Table run_coarse_ratio(const StudySpec &spec)
{
  spec.validate();
  Table t{{"ratio", "factor", "coarse_n", "vertex_ratio", "outer_iterations",
           "mean_coarse_iterations", "picard_iterations", "pc_setup_seconds", "solve_seconds",
           "converged"},
          {}};
  for (double s : spec.sweep)
  {
    RunConfig cfg = spec.base;
    cfg.coarse_ratio = s;
    cfg.validate();
    const int factor = cfg.refinement_factor();
    const int nc = cfg.mesh_n / factor;
    const double vr = std::pow((cfg.mesh_n + 1.0) / (nc + 1.0), 2);
    const auto r = run_one(cfg);
    t.rows.push_back({fmt(s), fmt(factor), fmt(nc), fmt(vr), fmt(r.mean_outer_iterations()),
                      fmt(r.mean_coarse_iterations), fmt(r.picard_iterations),
                      fmt(r.pc_setup_seconds), fmt(r.solve_seconds), r.converged ? "1" : "0"});
  }
  return t;
}

Table run_cond_ratio(const StudySpec &spec)
{
  spec.validate();
  const RunConfig &base = spec.base;
  const TriMesh mesh(base.mesh_n);
  BCSpec bc = BCSpec::all_dirichlet(0.0);
  bc.mode = BCSpec::Mode::Penalty;
  bc.penalty = 1e7;
  const Vector f(mesh.num_vertices(), 0.0);
  const Vector cdet(mesh.num_vertices(), std::exp(base.g0));
  const double cond_det = condition_number(assemble_deterministic(mesh, cdet, f, bc).matrix);

  Table t{{"M", "terms", "dim", "cond_stochastic", "cond_deterministic", "ratio"}, {}};
  for (double s : spec.sweep)
  {
    const int M = as_int(s, "M");
    const ChaosBasis in(M, base.p_in), out(M, base.p_out);
    const auto kle = kle_2d({base.sigma, base.bx, base.by}, M, base.g0);
    const auto pce = lognormal_pce(kle, in, mesh);
    const auto m = triple_tensor(in, out);
    const auto sys = assemble_stochastic_linear(mesh, pce, m, out, f, bc);
    const double cs = condition_number(sys.matrix);
    t.rows.push_back({fmt(M), fmt(out.size()), fmt(sys.size()), fmt(cs), fmt(cond_det),
                      fmt(cs / cond_det)});
  }
  return t;
}

Table run_study(const StudySpec &spec)
{
  switch (spec.kind)
  {
    case StudyKind::Strong:
      return run_strong(spec);
    case StudyKind::Weak:
      return run_weak(spec);
    case StudyKind::RandomVars:
    case StudyKind::Order:
      return run_param_scaling(spec);
    case StudyKind::CoarseRatio:
      return run_coarse_ratio(spec);
    case StudyKind::CondRatio:
      return run_cond_ratio(spec);
  }
  throw std::logic_error("run_study: unknown study");
}

}  // namespace sgdd
