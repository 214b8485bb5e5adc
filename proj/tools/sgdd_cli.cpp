// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgdd/bench.hpp"
#include "sgdd/config.hpp"
#include "sgdd/errors.hpp"
#include "sgdd/io.hpp"
#include "sgdd/mcs.hpp"
#include "sgdd/parallel.hpp"
#include "sgdd/solvers.hpp"

namespace fs = std::filesystem;
using namespace sgdd;

namespace
{

struct GlobalOptions
{
  std::optional<int> threads;
  std::optional<std::string> out;
};

RunConfig resolve(const std::string &path, const GlobalOptions &g)
{
  RunConfig cfg = load_config(path);
  if (g.threads)
  {
    cfg.threads = *g.threads;
  }
  if (g.out)
  {
    cfg.output_dir = *g.out;
  }
  cfg.validate();
  set_num_threads(cfg.threads);
  return cfg;
}

void print_report(const SolveReport &r)
{
  std::cout << "converged: " << (r.converged ? "yes" : "no") << '\n'
            << "outer iterations: " << r.outer_iterations << '\n';
  if (r.picard_iterations > 0)
  {
    std::cout << "picard iterations: " << r.picard_iterations << '\n';
  }
  if (r.coarse_solves > 0)
  {
    std::cout << "mean coarse iterations: " << r.mean_coarse_iterations << '\n';
  }
  std::cout << "pc setup [s]: " << r.pc_setup_seconds << '\n'
            << "solve [s]: " << r.solve_seconds << '\n';
  if (!r.message.empty())
  {
    std::cout << "note: " << r.message << '\n';
  }
}

int cmd_solve(const std::string &path, const GlobalOptions &g)
{
  const RunConfig cfg = resolve(path, g);
  const fs::path out = cfg.output_dir;
  SolveReport report;
  if (cfg.stochastic())
  {
    const auto res = cfg.nonlinear() ? solve_nonlinear_stochastic(cfg) : solve_linear_stochastic(cfg);
    const auto mo = moments(res.solution);
    std::vector<Vector> modes;
    for (int j = 0; j < res.solution.basis.size(); ++j)
    {
      modes.push_back(res.solution.mode(j));
    }
    std::vector<NamedField> fields{{"mean", mo.mean}, {"std", mo.std}};
    for (std::size_t j = 0; j < modes.size(); ++j)
    {
      fields.push_back({"u_" + std::to_string(j), modes[j]});
    }
    write_vtk(out / "solution.vtk", res.mesh, fields, config_title(cfg));
    write_moments_csv(out / "moments.csv", res.mesh, mo, cfg);
    report = res.report;
  }
  else
  {
    const auto res = solve_deterministic(cfg, cfg.nonlinear() ? 1 : 0);
    const Vector zero(res.u.size(), 0.0);
    write_vtk(out / "solution.vtk", res.mesh, {{"mean", res.u}, {"std", zero}}, config_title(cfg));
    write_moments_csv(out / "moments.csv", res.mesh, Moments{res.u, zero}, cfg);
    report = res.report;
  }
  write_text(out / "report.json", report_json(report, cfg));
  print_report(report);
  std::cout << "artifacts written to " << out.string() << '\n';
  return report.converged ? 0 : 1;
}

int cmd_verify(const std::string &path, const GlobalOptions &g)
{
  const RunConfig cfg = resolve(path, g);
  if (!cfg.stochastic())
  {
    throw ConfigError("problem", "verify needs a stochastic problem");
  }
  const fs::path out = cfg.output_dir;
  const auto sg = cfg.nonlinear() ? solve_nonlinear_stochastic(cfg) : solve_linear_stochastic(cfg);
  if (!sg.report.converged)
  {
    std::cerr << "stochastic Galerkin solve did not converge: " << sg.report.message << '\n';
    return 1;
  }
  const auto mo = moments(sg.solution);
  const auto probes = default_probes();
  const int N = cfg.mcs_samples;
  const auto mc = run_mcs(cfg, N, cfg.seed, probes);
  const int ndraws = std::max(100000, N);

  std::ofstream csv;
  fs::create_directories(out);
  csv.open(out / "comparison.csv");
  csv.precision(12);
  write_config_comment(csv, cfg);
  csv << "probe,x,y,sg_mean,mcs_mean,mean_band,sg_std,mcs_std,std_band,ks,in_band\n";
  std::ofstream samples(out / "mcs_probe_samples.csv");
  samples.precision(17);
  write_config_comment(samples, cfg);
  samples << "sample";
  for (std::size_t p = 0; p < probes.size(); ++p)
  {
    samples << ",probe" << p;
  }
  samples << '\n';
  for (int s = 0; s < N; ++s)
  {
    samples << s;
    for (std::size_t p = 0; p < probes.size(); ++p)
    {
      samples << ',' << mc.probe_samples[p][s];
    }
    samples << '\n';
  }

  bool all_ok = true;
  std::cout << "probe        sg_mean      mcs_mean     sg_std       mcs_std      ks      ok\n";
  for (std::size_t p = 0; p < probes.size(); ++p)
  {
    const Point pt = probes[p];
    const double sg_mean = sg.mesh.interpolate(mo.mean, pt);
    const double sg_std = sg.mesh.interpolate(mo.std, pt);
    const auto &ms = mc.probe_samples[p];
    Welford w;
    for (double v : ms)
    {
      w.add(std::span<const double>(&v, 1));
    }
    const double mc_mean = w.mean()[0];
    const double mc_std = std::sqrt(w.variance()[0]);
    const double floor = 10.0 * cfg.outer_tol * std::max(1.0, std::abs(mc_mean));
    const double mean_band = std::max(3.0 * mc_std / std::sqrt(static_cast<double>(N)), floor);
    const double std_band =
        std::max(N > 1 ? 3.0 * mc_std / std::sqrt(2.0 * (N - 1)) : 0.0, floor);
    const double ks = ks_distance(surrogate_samples(sg.solution, sg.mesh, pt, ndraws, cfg.seed + 1), ms);
    const bool ok = std::abs(sg_mean - mc_mean) <= mean_band && std::abs(sg_std - mc_std) <= std_band;
    all_ok = all_ok && ok;
    csv << p << ',' << pt.x << ',' << pt.y << ',' << sg_mean << ',' << mc_mean << ',' << mean_band
        << ',' << sg_std << ',' << mc_std << ',' << std_band << ',' << ks << ',' << (ok ? 1 : 0)
        << '\n';
    std::printf("(%.2f,%.2f)  %-12.6g %-12.6g %-12.6g %-12.6g %-7.4f %s\n", pt.x, pt.y, sg_mean,
                mc_mean, sg_std, mc_std, ks, ok ? "yes" : "NO");
  }
  nlohmann::json j = nlohmann::json::parse(report_json(sg.report, cfg));
  j["mcs"] = {{"samples", N}, {"seed", cfg.seed}, {"seconds", mc.seconds},
              {"linear_iterations", mc.linear_iterations},
              {"picard_iterations", mc.picard_iterations}, {"all_in_band", all_ok}};
  write_text(out / "verify.json", j.dump(2));
  if (!all_ok)
  {
    std::cerr << "verification failed: probes outside the Monte Carlo band (see comparison.csv)\n";
  }
  return all_ok ? 0 : 1;
}

int cmd_study(const std::string &path, const GlobalOptions &g)
{
  StudySpec spec = load_study_spec(path);
  if (g.threads)
  {
    spec.base.threads = *g.threads;
  }
  if (g.out)
  {
    spec.base.output_dir = *g.out;
  }
  spec.validate();
  set_num_threads(spec.base.threads);
  const fs::path csv =
      spec.output.empty() ? fs::path(spec.base.output_dir) / ("study_" + to_string(spec.kind) + ".csv")
                          : spec.output;
  const Table t = run_study(spec);
  t.write_csv(csv, &spec.base);
  nlohmann::json manifest;
  manifest["study"] = to_string(spec.kind);
  manifest["sweep"] = spec.sweep;
  std::vector<std::string> pcs;
  for (auto p : spec.preconditioners)
  {
    pcs.push_back(to_string(p));
  }
  manifest["preconditioners"] = pcs;
  manifest["config"] = nlohmann::json::parse(config_json(spec.base));
  manifest["table"] = csv.string();
  fs::path json_path = csv;
  json_path.replace_extension(".json");
  write_text(json_path, manifest.dump(2));
  for (std::size_t i = 0; i < t.header.size(); ++i)
  {
    std::cout << (i ? "," : "") << t.header[i];
  }
  std::cout << '\n';
  for (const auto &r : t.rows)
  {
    for (std::size_t i = 0; i < r.size(); ++i)
    {
      std::cout << (i ? "," : "") << r[i];
    }
    std::cout << '\n';
  }
  std::cout << "table written to " << csv.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Stochastic Galerkin solvers with two-grid Schwarz preconditioners"};
  app.require_subcommand(1);
  GlobalOptions g;
  int threads = 0;
  std::string out;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Output directory");

  std::string solve_cfg, verify_cfg, study_spec;
  auto *solve = app.add_subcommand("solve", "Run the configured solve");
  solve->add_option("config", solve_cfg, "Config file")->required();
  auto *verify = app.add_subcommand("verify", "Compare the stochastic Galerkin solution with Monte Carlo");
  verify->add_option("config", verify_cfg, "Config file")->required();
  auto *study = app.add_subcommand("study", "Run a scalability or conditioning study");
  study->add_option("spec", study_spec, "Study spec file")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (threads > 0)
  {
    g.threads = threads;
  }
  if (!out.empty())
  {
    g.out = out;
  }

  try
  {
    if (*solve)
    {
      return cmd_solve(solve_cfg, g);
    }
    if (*verify)
    {
      return cmd_verify(verify_cfg, g);
    }
    return cmd_study(study_spec, g);
  }
  catch (const ConfigError &e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  catch (const NumericalError &e)
  {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  }
  catch (const std::invalid_argument &e)
  {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
