// SPDX-License-Identifier: Apache-2.0

#include "sgdd/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sgdd
{

namespace
{

std::ofstream open_out(const std::filesystem::path &path)
{
  if (path.has_parent_path())
  {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out.precision(17);
  return out;
}

nlohmann::json config_object(const RunConfig &cfg)
{
  nlohmann::json j;
  j["problem"] = to_string(cfg.problem);
  j["mesh_n"] = cfg.mesh_n;
  j["M"] = cfg.M;
  j["p_in"] = cfg.p_in;
  j["p_out"] = cfg.p_out;
  j["sigma"] = cfg.sigma;
  j["bx"] = cfg.bx;
  j["by"] = cfg.by;
  j["g0"] = cfg.g0;
  j["nsub"] = cfg.nsub;
  j["overlap"] = cfg.overlap;
  j["preconditioner"] = to_string(cfg.preconditioner);
  j["coarse_ratio"] = cfg.coarse_ratio;
  j["outer_tol"] = cfg.outer_tol;
  j["coarse_tol"] = cfg.coarse_tol ? nlohmann::json(*cfg.coarse_tol) : nlohmann::json("default");
  j["picard_tol"] = cfg.picard_tol;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["threads"] = cfg.threads;
  j["mcs_samples"] = cfg.mcs_samples;
  return j;
}

nlohmann::json finite_or_null(double v)
{
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string config_title(const RunConfig &cfg)
{
  std::string s;
  for (const auto &[k, v] : parse_key_values(serialize(cfg)))
  {
    if (k != "output_dir")
    {
      s += (s.empty() ? "" : " ") + k + "=" + v;
    }
  }
  return "sgdd " + s;
}

void write_config_comment(std::ostream &out, const RunConfig &cfg)
{
  std::istringstream in(serialize(cfg));
  std::string line;
  while (std::getline(in, line))
  {
    out << "# " << line << '\n';
  }
}

void write_vtk(const std::filesystem::path &path, const TriMesh &mesh,
               const std::vector<NamedField> &fields, const std::string &title)
{
  auto out = open_out(path);
  std::string t = title.substr(0, 255);
  for (char &c : t)
  {
    if (c == '\n')
    {
      c = ' ';
    }
  }
  out << "# vtk DataFile Version 3.0\n" << t << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto &p : mesh.vertices())
  {
    out << p.x << ' ' << p.y << " 0\n";
  }
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto &tri : mesh.triangles())
  {
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (int i = 0; i < mesh.num_triangles(); ++i)
  {
    out << "5\n";
  }
  if (!fields.empty())
  {
    out << "POINT_DATA " << mesh.num_vertices() << '\n';
  }
  for (const auto &f : fields)
  {
    if (static_cast<int>(f.values.size()) != mesh.num_vertices())
    {
      throw std::invalid_argument("write_vtk: field '" + f.name + "' has the wrong size");
    }
    out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values)
    {
      out << v << '\n';
    }
  }
}

void write_moments_csv(const std::filesystem::path &path, const TriMesh &mesh,
                       const Moments &mo, const RunConfig &cfg)
{
  auto out = open_out(path);
  write_config_comment(out, cfg);
  out << "node,x,y,mean,std\n";
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    const auto &p = mesh.vertices()[v];
    out << v << ',' << p.x << ',' << p.y << ',' << mo.mean[v] << ',' << mo.std[v] << '\n';
  }
}

void write_residual_csv(const std::filesystem::path &path, std::span<const double> history)
{
  auto out = open_out(path);
  out << "iteration,rel_residual\n";
  for (std::size_t i = 0; i < history.size(); ++i)
  {
    out << i << ',' << history[i] << '\n';
  }
}

std::string config_json(const RunConfig &cfg) { return config_object(cfg).dump(2); }

std::string report_json(const SolveReport &r, const RunConfig &cfg)
{
  nlohmann::json j;
  j["config"] = config_object(cfg);
  nlohmann::json rep;
  rep["converged"] = r.converged;
  rep["stagnated"] = r.stagnated;
  rep["message"] = r.message;
  rep["outer_iterations"] = r.outer_iterations;
  rep["outer_per_solve"] = r.outer_per_solve;
  rep["mean_outer_iterations"] = r.mean_outer_iterations();
  rep["coarse_solves"] = r.coarse_solves;
  rep["coarse_iterations"] = r.coarse_iterations;
  rep["mean_coarse_iterations"] = r.mean_coarse_iterations;
  rep["coarse_failures"] = r.coarse_failures;
  rep["picard_iterations"] = r.picard_iterations;
  rep["picard_updates"] = r.picard_updates;
  rep["picard_rel_update"] = finite_or_null(r.picard_rel_update);
  rep["pc_setup_seconds"] = r.pc_setup_seconds;
  rep["solve_seconds"] = r.solve_seconds;
  rep["final_rel_residual"] = r.final_rel_residual;
  rep["residual_history"] = r.residual_history;
  rep["amg_level_sizes"] = r.amg_level_sizes;
  j["report"] = rep;
  return j.dump(2);
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
  auto out = open_out(path);
  out << text;
  if (!text.empty() && text.back() != '\n')
  {
    out << '\n';
  }
}

}  // namespace sgdd
