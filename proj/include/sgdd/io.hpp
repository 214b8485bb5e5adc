// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgdd/config.hpp"
#include "sgdd/mesh.hpp"
#include "sgdd/solvers.hpp"

namespace sgdd
{

struct NamedField
{
  std::string name;
  std::span<const double> values;
};

/// Legacy ASCII VTK unstructured grid with nodal scalar fields. `title`
/// becomes the header line (truncated to 255 characters).
void write_vtk(const std::filesystem::path &path, const TriMesh &mesh,
               const std::vector<NamedField> &fields, const std::string &title);

/// One-line form of the config for VTK titles; the output directory is omitted.
std::string config_title(const RunConfig &cfg);

/// Writes `# key = value` comment lines for every config entry.
void write_config_comment(std::ostream &out, const RunConfig &cfg);

/// node,x,y,mean,std table preceded by the config as comment lines.
void write_moments_csv(const std::filesystem::path &path, const TriMesh &mesh,
                       const Moments &mo, const RunConfig &cfg);

/// Residual history as iteration,rel_residual.
void write_residual_csv(const std::filesystem::path &path, std::span<const double> history);

/// JSON text of the report together with the resolved config.
std::string report_json(const SolveReport &report, const RunConfig &cfg);
std::string config_json(const RunConfig &cfg);

void write_text(const std::filesystem::path &path, const std::string &text);

}  // namespace sgdd
