// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdd/config.hpp"
#include "sgdd/io.hpp"
#include "sgdd/mesh.hpp"
#include "sgdd/solvers.hpp"

using namespace sgdd;

namespace
{

std::string field_of(const std::string &text)
{
  try
  {
    parse_config(text);
  }
  catch (const ConfigError &e)
  {
    return e.field();
  }
  return "";
}

std::string read_all(const std::filesystem::path &p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string &name)
{
  auto dir = std::filesystem::temp_directory_path() / "sgdd_test_config";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("defaults")
{
  const RunConfig c;
  CHECK(c.problem == ProblemKind::LinearStochastic);
  CHECK(c.sigma == 0.3);
  CHECK(c.bx == 1.0);
  CHECK(c.by == 1.0);
  CHECK(c.p_in == 2);
  CHECK(c.p_out == 3);
  CHECK(c.coarse_ratio == 4.0);
  CHECK(c.refinement_factor() == 2);
  CHECK(c.outer_tol == 1e-5);
  CHECK(c.picard_tol == 1e-6);
  CHECK_FALSE(c.coarse_tol.has_value());
  CHECK(c.preconditioner == PreconditionerKind::TwoGridV3);
  CHECK_NOTHROW(c.validate());
  CHECK(parse_config("") == c);
}

TEST_CASE("serialize round trip")
{
  RunConfig c;
  c.problem = ProblemKind::NonlinearDeterministic;
  c.mesh_n = 30;
  c.M = 5;
  c.p_in = 1;
  c.p_out = 4;
  c.sigma = 0.1 + 0.2;
  c.bx = 0.7;
  c.by = 1.0 / 3.0;
  c.g0 = -0.25;
  c.nsub = 9;
  c.overlap = 2;
  c.preconditioner = PreconditionerKind::Ras1;
  c.coarse_ratio = 9.0;
  c.outer_tol = 3e-7;
  c.coarse_tol = 1.0 / 7.0;
  c.picard_tol = 2.5e-9;
  c.seed = 18446744073709551615ULL;
  c.output_dir = "some/dir";
  c.threads = 3;
  c.mcs_samples = 17;
  const RunConfig back = parse_config(serialize(c));
  CHECK(back == c);
  c.coarse_tol.reset();
  CHECK(parse_config(serialize(c)) == c);
}

TEST_CASE("format_double round trips")
{
  for (double v : {0.0, 1.0, 0.1, 1e-5, 1.0 / 3.0, 6.02214076e23, -2.5e-300,
                   std::numeric_limits<double>::min(), std::numeric_limits<double>::max()})
  {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.3) == "0.3");
  CHECK(format_double(4.0) == "4");
}

TEST_CASE("comments and whitespace")
{
  const auto c = parse_config("  # header\n\nsigma = 0.2   # trailing\n\tM=4\r\n"
                              "preconditioner = 2glu\ncoarse_tol = default\n");
  CHECK(c.sigma == 0.2);
  CHECK(c.M == 4);
  CHECK(c.preconditioner == PreconditionerKind::TwoGridLu);
  CHECK_FALSE(c.coarse_tol.has_value());
  CHECK(parse_config("coarse_tol = 0.01").coarse_tol == 0.01);
}

TEST_CASE("errors name the field")
{
  CHECK(field_of("bogus = 1") == "bogus");
  CHECK(field_of("sigma = 0.1\nsigma = 0.2") == "sigma");
  CHECK(field_of("sigma = -0.1") == "sigma");
  CHECK(field_of("sigma = abc") == "sigma");
  CHECK(field_of("sigma = inf") == "sigma");
  CHECK(field_of("mesh_n = 1") == "mesh_n");
  CHECK(field_of("mesh_n = 4.5") == "mesh_n");
  CHECK(field_of("M = 0") == "M");
  CHECK(field_of("p_in = -1") == "p_in");
  CHECK(field_of("p_out = -1") == "p_out");
  CHECK(field_of("bx = 0") == "bx");
  CHECK(field_of("by = -1") == "by");
  CHECK(field_of("nsub = 0") == "nsub");
  CHECK(field_of("mesh_n = 2\nnsub = 10") == "nsub");
  CHECK(field_of("overlap = 0") == "overlap");
  CHECK(field_of("coarse_ratio = 0.5") == "coarse_ratio");
  CHECK(field_of("mesh_n = 63") == "coarse_ratio");
  CHECK(field_of("outer_tol = 1") == "outer_tol");
  CHECK(field_of("outer_tol = 0") == "outer_tol");
  CHECK(field_of("coarse_tol = 1.5") == "coarse_tol");
  CHECK(field_of("picard_tol = 0") == "picard_tol");
  CHECK(field_of("output_dir = ") == "output_dir");
  CHECK(field_of("threads = 0") == "threads");
  CHECK(field_of("mcs_samples = 0") == "mcs_samples");
  CHECK(field_of("seed = -3") == "seed");
  CHECK(field_of("problem = quadratic") == "problem");
  CHECK(field_of("preconditioner = ilu") == "preconditioner");
  CHECK(field_of("no equals sign") == "line 1");
  CHECK(field_of("# c\n = 3") == "line 2");
  CHECK_THROWS_AS(parse_config("sigma = -1"), std::invalid_argument);
}

TEST_CASE("enum names")
{
  for (auto p : {ProblemKind::LinearStochastic, ProblemKind::NonlinearStochastic,
                 ProblemKind::LinearDeterministic, ProblemKind::NonlinearDeterministic})
  {
    CHECK(parse_problem(to_string(p)) == p);
  }
  for (auto p : {PreconditionerKind::Ras1, PreconditionerKind::TwoGridLu,
                 PreconditionerKind::TwoGridV2, PreconditionerKind::TwoGridV3})
  {
    CHECK(parse_preconditioner(to_string(p)) == p);
  }
  CHECK(to_string(PreconditionerKind::TwoGridV2) == "2gv2");
  RunConfig c;
  c.problem = ProblemKind::NonlinearStochastic;
  CHECK(c.stochastic());
  CHECK(c.nonlinear());
  c.problem = ProblemKind::LinearDeterministic;
  CHECK_FALSE(c.stochastic());
  CHECK_FALSE(c.nonlinear());
}

TEST_CASE("load_config")
{
  const auto path = scratch("run.cfg");
  {
    std::ofstream out(path);
    out << "mesh_n = 16\nsigma = 0.05\n";
  }
  const auto c = load_config(path);
  CHECK(c.mesh_n == 16);
  CHECK(c.sigma == 0.05);
  CHECK_THROWS_AS(load_config(scratch("missing.cfg")), ConfigError);
}

TEST_CASE("report json")
{
  RunConfig c;
  c.sigma = 0.125;
  SolveReport r;
  r.outer_iterations = 12;
  r.outer_per_solve = {7, 5};
  r.picard_iterations = 2;
  r.picard_updates = {1.0, 0.01};
  r.converged = true;
  r.residual_history = {1.0, 1e-3, 1e-6};
  const auto j = nlohmann::json::parse(report_json(r, c));
  CHECK(j["config"]["sigma"].get<double>() == 0.125);
  CHECK(j["config"]["coarse_tol"].get<std::string>() == "default");
  CHECK(j["config"]["preconditioner"].get<std::string>() == "2gv3");
  CHECK(j["report"]["outer_iterations"].get<int>() == 12);
  CHECK(j["report"]["mean_outer_iterations"].get<double>() == doctest::Approx(6.0));
  CHECK(j["report"]["converged"].get<bool>());
  CHECK(j["report"]["residual_history"].size() == 3);
  CHECK(j["report"]["picard_updates"][1].get<double>() == 0.01);
  const auto cj = nlohmann::json::parse(config_json(c));
  CHECK(cj["mesh_n"].get<int>() == 64);
}

TEST_CASE("vtk and csv writers")
{
  const TriMesh mesh(2);
  RunConfig c;
  c.mesh_n = 2;
  c.coarse_ratio = 1.0;
  std::vector<double> f(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
  {
    f[v] = v * 0.5;
  }
  const auto vtk = scratch("sub/field.vtk");
  write_vtk(vtk, mesh, {{"mean", f}}, config_title(c));
  const std::string text = read_all(vtk);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  std::getline(in, line);
  CHECK(line.rfind("sgdd ", 0) == 0);
  CHECK(line.find("mesh_n=2") != std::string::npos);
  CHECK(line.find("output_dir") == std::string::npos);
  CHECK(line.size() <= 255);
  CHECK(text.find("POINTS 9 double") != std::string::npos);
  CHECK(text.find("CELLS 8 32") != std::string::npos);
  CHECK(text.find("SCALARS mean double 1") != std::string::npos);
  std::vector<double> wrong(3);
  CHECK_THROWS_AS(write_vtk(vtk, mesh, {{"bad", wrong}}, "t"), std::invalid_argument);

  Moments mo;
  mo.mean = f;
  mo.std.assign(f.size(), 0.25);
  const auto csv = scratch("moments.csv");
  write_moments_csv(csv, mesh, mo, c);
  std::istringstream cin(read_all(csv));
  int comments = 0;
  int rows = 0;
  bool header = false;
  while (std::getline(cin, line))
  {
    if (line.rfind("# ", 0) == 0)
    {
      ++comments;
      CHECK_FALSE(header);
    }
    else if (!header)
    {
      CHECK(line == "node,x,y,mean,std");
      header = true;
    }
    else
    {
      ++rows;
    }
  }
  CHECK(comments == 20);
  CHECK(rows == mesh.num_vertices());

  const auto res = scratch("res.csv");
  const std::vector<double> hist{1.0, 0.5};
  write_residual_csv(res, hist);
  CHECK(read_all(res).rfind("iteration,rel_residual\n0,1\n1,0.5\n", 0) == 0);
}
