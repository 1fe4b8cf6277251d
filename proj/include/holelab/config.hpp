#pragma once

#include "holelab/geometry.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace holelab {

/// Version of the configuration schema printed by `lab --version`.
inline constexpr int config_schema_version = 1;

enum class ExperimentKind { mesh, solve, sweep, restrict, bogovskii };
enum class SweepKind { uniform, blowup, dual_blowup, rescaling, enlarging };

std::string to_string(ExperimentKind k);
std::string to_string(SweepKind k);

struct SourceConfig {
  std::string kind = "dipole";  ///< dipole | channel | pressure-only | expression
  std::array<std::string, 4> g{"0", "0", "0", "0"};  ///< G11 G12 G21 G22
  double bump_radius = 0.75;
  double bump_amplitude = 1.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::sweep;
  SweepKind sweep = SweepKind::uniform;
  std::string name;
  std::string anchor;
  std::uint64_t seed = 0;

  // domain
  OuterKind outer = OuterKind::square;
  double half_size = 2.0;
  HoleShape hole = HoleShape::disk(0.25);
  double epsilon = 0.5;
  bool perforated = false;
  double alpha = 1.0;
  double b1 = 0.375;
  double delta = 0.125;
  std::uint64_t rotation_seed = 0;  ///< 0: all rotations zero
  int n_hole = 32;
  double h_far = 0.25;
  int quad_degree = 6;

  SourceConfig source;

  std::vector<double> p_list{2.0};
  std::vector<double> eps_list;
  bool refinement_check = true;
  bool timing = false;

  std::array<std::string, 2> field{"sin(pi*x1)^2*sin(pi*x2)^2*(1+x1)", "sin(pi*x1)^2*sin(pi*x2)^2*cos(2*x2)"};
  std::string rhs_kind = "random-smooth";  ///< random-smooth | random-p1 | expression
  std::string rhs_expression;
  int rhs_count = 3;
  int rhs_modes = 3;

  /// Pass/fail thresholds; a check without its threshold is inconclusive.
  std::map<std::string, double> thresholds;

  std::string output_dir = "out";
  bool svg = true;

  std::optional<double> threshold(const std::string& key) const;
};

/// Parses INI text. Syntax errors carry the line number; unknown sections
/// or keys and every semantic problem are collected into one ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Reads `key = expression` lines (no sections) from a field or
/// right-hand-side file. Every key must be in `allowed`; each value must parse.
std::map<std::string, std::string> load_expression_file(const std::string& path,
                                                        const std::vector<std::string>& allowed);

/// Comma-separated constant expressions, e.g. "1/2, 1/4".
std::vector<double> parse_number_list(const std::string& text);

}  // namespace holelab
