// SPDX-License-Identifier: Apache-2.0

#include "sgdd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace sgdd
{

namespace
{

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
  {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(std::string_view key, std::string_view v)
{
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
  {
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v)
{
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
  {
    throw ConfigError(std::string(key),
                      "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v)
{
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
  {
    throw ConfigError(std::string(key), "expected a finite number, got '" + std::string(v) + "'");
  }
  return out;
}

void require(bool ok, const char *field, const std::string &what)
{
  if (!ok)
  {
    throw ConfigError(field, what);
  }
}

}  // namespace

std::string format_double(double v)
{
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

int RunConfig::refinement_factor() const
{
  return static_cast<int>(std::lround(std::sqrt(coarse_ratio)));
}

void RunConfig::validate() const
{
  require(mesh_n >= 2, "mesh_n", "must be >= 2");
  require(M >= 1, "M", "must be >= 1");
  require(p_in >= 0, "p_in", "must be >= 0");
  require(p_out >= 0, "p_out", "must be >= 0");
  require(sigma >= 0.0, "sigma", "must be >= 0");
  require(bx > 0.0, "bx", "must be > 0");
  require(by > 0.0, "by", "must be > 0");
  require(nsub >= 1, "nsub", "must be >= 1");
  require(nsub <= (mesh_n + 1) * (mesh_n + 1), "nsub", "exceeds the number of mesh vertices");
  require(overlap >= 1, "overlap", "must be >= 1");
  require(coarse_ratio >= 1.0, "coarse_ratio", "must be >= 1");
  require(mesh_n % refinement_factor() == 0, "coarse_ratio",
          "refinement factor " + std::to_string(refinement_factor()) +
              " does not divide mesh_n = " + std::to_string(mesh_n));
  require(outer_tol > 0.0 && outer_tol < 1.0, "outer_tol", "must lie in (0, 1)");
  require(!coarse_tol || (*coarse_tol > 0.0 && *coarse_tol < 1.0), "coarse_tol",
          "must lie in (0, 1)");
  require(picard_tol > 0.0 && picard_tol < 1.0, "picard_tol", "must lie in (0, 1)");
  require(!output_dir.empty(), "output_dir", "must not be empty");
  require(threads >= 1, "threads", "must be >= 1");
  require(mcs_samples >= 1, "mcs_samples", "must be >= 1");
}

std::string to_string(ProblemKind p)
{
  switch (p)
  {
    case ProblemKind::LinearStochastic:
      return "linear-stochastic";
    case ProblemKind::NonlinearStochastic:
      return "nonlinear-stochastic";
    case ProblemKind::LinearDeterministic:
      return "linear-deterministic";
    case ProblemKind::NonlinearDeterministic:
      return "nonlinear-deterministic";
  }
  return "";
}

std::string to_string(PreconditionerKind p)
{
  switch (p)
  {
    case PreconditionerKind::Ras1:
      return "ras1";
    case PreconditionerKind::TwoGridLu:
      return "2glu";
    case PreconditionerKind::TwoGridV2:
      return "2gv2";
    case PreconditionerKind::TwoGridV3:
      return "2gv3";
  }
  return "";
}

ProblemKind parse_problem(std::string_view s)
{
  for (auto p : {ProblemKind::LinearStochastic, ProblemKind::NonlinearStochastic,
                 ProblemKind::LinearDeterministic, ProblemKind::NonlinearDeterministic})
  {
    if (to_string(p) == s)
    {
      return p;
    }
  }
  throw ConfigError("problem", "unknown problem '" + std::string(s) + "'");
}

PreconditionerKind parse_preconditioner(std::string_view s)
{
  for (auto p : {PreconditionerKind::Ras1, PreconditionerKind::TwoGridLu,
                 PreconditionerKind::TwoGridV2, PreconditionerKind::TwoGridV3})
  {
    if (to_string(p) == s)
    {
      return p;
    }
  }
  throw ConfigError("preconditioner", "unknown preconditioner '" + std::string(s) + "'");
}

void set_config_value(RunConfig &cfg, std::string_view key, std::string_view value)
{
  if (key == "problem")
    cfg.problem = parse_problem(value);
  else if (key == "mesh_n")
    cfg.mesh_n = parse_int(key, value);
  else if (key == "M")
    cfg.M = parse_int(key, value);
  else if (key == "p_in")
    cfg.p_in = parse_int(key, value);
  else if (key == "p_out")
    cfg.p_out = parse_int(key, value);
  else if (key == "sigma")
    cfg.sigma = parse_double(key, value);
  else if (key == "bx")
    cfg.bx = parse_double(key, value);
  else if (key == "by")
    cfg.by = parse_double(key, value);
  else if (key == "g0")
    cfg.g0 = parse_double(key, value);
  else if (key == "nsub")
    cfg.nsub = parse_int(key, value);
  else if (key == "overlap")
    cfg.overlap = parse_int(key, value);
  else if (key == "preconditioner")
    cfg.preconditioner = parse_preconditioner(value);
  else if (key == "coarse_ratio")
    cfg.coarse_ratio = parse_double(key, value);
  else if (key == "outer_tol")
    cfg.outer_tol = parse_double(key, value);
  else if (key == "coarse_tol")
  {
    if (value == "default")
      cfg.coarse_tol.reset();
    else
      cfg.coarse_tol = parse_double(key, value);
  }
  else if (key == "picard_tol")
    cfg.picard_tol = parse_double(key, value);
  else if (key == "seed")
    cfg.seed = parse_u64(key, value);
  else if (key == "output_dir")
    cfg.output_dir = std::string(value);
  else if (key == "threads")
    cfg.threads = parse_int(key, value);
  else if (key == "mcs_samples")
    cfg.mcs_samples = parse_int(key, value);
  else
    throw ConfigError(std::string(key), "unknown key");
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text)
{
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string, std::less<>> seen;
  int lineno = 0;
  while (!text.empty())
  {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
    {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
    {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
    {
      throw ConfigError("line " + std::to_string(lineno), "missing key");
    }
    if (!seen.insert(key).second)
    {
      throw ConfigError(key, "duplicate key");
    }
    out.emplace_back(key, value);
  }
  return out;
}

RunConfig parse_config(std::string_view text)
{
  RunConfig cfg;
  for (const auto &[k, v] : parse_key_values(text))
  {
    set_config_value(cfg, k, v);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("config", "cannot read " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const RunConfig &cfg)
{
  std::ostringstream out;
  out << "problem = " << to_string(cfg.problem) << '\n'
      << "mesh_n = " << cfg.mesh_n << '\n'
      << "M = " << cfg.M << '\n'
      << "p_in = " << cfg.p_in << '\n'
      << "p_out = " << cfg.p_out << '\n'
      << "sigma = " << format_double(cfg.sigma) << '\n'
      << "bx = " << format_double(cfg.bx) << '\n'
      << "by = " << format_double(cfg.by) << '\n'
      << "g0 = " << format_double(cfg.g0) << '\n'
      << "nsub = " << cfg.nsub << '\n'
      << "overlap = " << cfg.overlap << '\n'
      << "preconditioner = " << to_string(cfg.preconditioner) << '\n'
      << "coarse_ratio = " << format_double(cfg.coarse_ratio) << '\n'
      << "outer_tol = " << format_double(cfg.outer_tol) << '\n'
      << "coarse_tol = " << (cfg.coarse_tol ? format_double(*cfg.coarse_tol) : "default") << '\n'
      << "picard_tol = " << format_double(cfg.picard_tol) << '\n'
      << "seed = " << cfg.seed << '\n'
      << "output_dir = " << cfg.output_dir << '\n'
      << "threads = " << cfg.threads << '\n'
      << "mcs_samples = " << cfg.mcs_samples << '\n';
  return out.str();
}

}  // namespace sgdd
