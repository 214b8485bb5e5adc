// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgdd
{

enum class ProblemKind
{
  LinearStochastic,
  NonlinearStochastic,
  LinearDeterministic,
  NonlinearDeterministic
};

enum class PreconditionerKind
{
  Ras1,
  TwoGridLu,
  TwoGridV2,
  TwoGridV3
};

/// Invalid configuration value; `field()` names the offending key.
class ConfigError : public std::invalid_argument
{
public:
  ConfigError(std::string field, const std::string &what)
    : std::invalid_argument(field + ": " + what), field_(std::move(field))
  {
  }
  const std::string &field() const { return field_; }

private:
  std::string field_;
};

struct RunConfig
{
  ProblemKind problem = ProblemKind::LinearStochastic;
  int mesh_n = 64;
  int M = 3;
  int p_in = 2;
  int p_out = 3;
  double sigma = 0.3;
  double bx = 1.0;
  double by = 1.0;
  double g0 = 0.0;
  int nsub = 4;
  int overlap = 1;
  PreconditionerKind preconditioner = PreconditionerKind::TwoGridV3;
  double coarse_ratio = 4.0;
  double outer_tol = 1e-5;
  /// Unset means the variant default.
  std::optional<double> coarse_tol;
  double picard_tol = 1e-6;
  std::uint64_t seed = 20240501;
  std::string output_dir = "sgdd_out";
  int threads = 1;
  int mcs_samples = 2000;

  bool stochastic() const
  {
    return problem == ProblemKind::LinearStochastic || problem == ProblemKind::NonlinearStochastic;
  }
  bool nonlinear() const
  {
    return problem == ProblemKind::NonlinearStochastic ||
           problem == ProblemKind::NonlinearDeterministic;
  }
  /// Fine-to-coarse refinement factor round(sqrt(coarse_ratio)).
  int refinement_factor() const;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  bool operator==(const RunConfig &) const = default;
};

std::string to_string(ProblemKind p);
std::string to_string(PreconditionerKind p);
ProblemKind parse_problem(std::string_view s);
PreconditionerKind parse_preconditioner(std::string_view s);

/// Applies one `key = value` assignment. Unknown keys throw ConfigError.
void set_config_value(RunConfig &cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; `#` starts a comment. The result is validated.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path &path);

/// Round-trippable text form with every key present.
std::string serialize(const RunConfig &cfg);

/// Splits `key = value` text into pairs, rejecting malformed and duplicate lines.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace sgdd
