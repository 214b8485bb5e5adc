// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sgdd/config.hpp"

namespace sgdd
{

enum class StudyKind
{
  Strong,
  Weak,
  RandomVars,
  Order,
  CoarseRatio,
  CondRatio
};

std::string to_string(StudyKind k);
StudyKind parse_study_kind(std::string_view s);

struct StudySpec
{
  StudyKind kind = StudyKind::Strong;
  std::vector<double> sweep;
  /// Preconditioners compared by strong and weak studies.
  std::vector<PreconditionerKind> preconditioners{PreconditionerKind::TwoGridV3};
  RunConfig base;
  std::filesystem::path output;

  void validate() const;
};

/// `study`, `sweep`, `preconditioners` and `output` keys plus any run
/// config key as a fixed parameter.
StudySpec parse_study_spec(std::string_view text);
StudySpec load_study_spec(const std::filesystem::path &path);

/// String table with a fixed header.
struct Table
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column_index(std::string_view name) const;
  std::vector<double> column(std::string_view name) const;
  /// Rows whose column `name` equals `value`.
  Table where(std::string_view name, std::string_view value) const;
  void write_csv(const std::filesystem::path &path, const RunConfig *cfg = nullptr) const;
};

/// Fixed mesh, subdomain sweep; an nsub = 1 baseline row is always included.
Table run_strong(const StudySpec &spec);
/// Paired (mesh_n, nsub) sweep holding nodes per subdomain near constant.
Table run_weak(const StudySpec &spec);
/// Sweep over M (RandomVars) or p_out (Order).
Table run_param_scaling(const StudySpec &spec);
/// Fixed fine mesh, sweep over the fine-to-coarse vertex ratio.
Table run_coarse_ratio(const StudySpec &spec);
/// Condition number ratio of the stochastic and deterministic penalty systems over M.
Table run_cond_ratio(const StudySpec &spec);

Table run_study(const StudySpec &spec);

/// Weak-scaling mesh for nsub given the base pair (n0, nsub0), rounded to even.
int weak_mesh_size(int n0, int nsub0, int nsub);

}  // namespace sgdd
