#pragma once

#include "holelab/config.hpp"
#include "holelab/report.hpp"
#include "holelab/restriction.hpp"

#include <optional>
#include <string>
#include <vector>

namespace holelab {

struct RunResult {
  std::vector<Verdict> verdicts;
  std::vector<std::string> failures;
  std::vector<std::string> files;  ///< written artifacts, in order
  int exit_code = 0;               ///< 0 pass or inconclusive, 1 fail
};

/// Source G of the configuration.
TensorField make_source(const ExperimentConfig& c);
/// Hole-domain family of the configuration (epsilon from the config).
DomainSpec make_domain(const ExperimentConfig& c);
/// Perforated unit square with n = round(1/eps) cells per axis.
PerforatedDomain make_perforated(const ExperimentConfig& c, double eps);
SweepOptions make_sweep_options(const ExperimentConfig& c);
/// The [field] velocity of the configuration.
PointVector make_field(const ExperimentConfig& c);

struct RunOptions {
  std::optional<std::string> out_dir;   ///< overrides [output] dir
  std::optional<std::string> out_file;  ///< mesh or solution file for mesh/solve
  std::optional<std::string> mesh;      ///< solve on this mesh file
  /// restrict: extension | divfree | norm; only that group of checks runs.
  std::optional<std::string> verify;
};

/// Runs the experiment and writes <dir>/<name>.{csv,json,svg}; mesh and
/// solve write <name>.mesh or <name>.solution in place of the plot.
/// Errors propagate as exceptions.
RunResult run(const ExperimentConfig& c, const RunOptions& options = {});

}  // namespace holelab
