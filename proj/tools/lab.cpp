#include "holelab/config.hpp"
#include "holelab/errors.hpp"
#include "holelab/runner.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>

namespace {

using namespace holelab;

void print_summary(const RunResult& r) {
  for (const auto& v : r.verdicts) std::cout << to_string(v.status) << "  " << v.check << "  [" << v.claim << "]\n";
  for (const auto& f : r.failures) std::cout << "failure  " << f << "\n";
  for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lab: Stokes experiments in domains with small holes"};
  app.set_version_flag("--version", "config schema " + std::to_string(config_schema_version));
  app.require_subcommand(1);

  std::string config_path, out, mesh_path, field_path, rhs_path, verify;
  bool verify_flag = false;

  auto* mesh = app.add_subcommand("mesh", "mesh the configured domain");
  mesh->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
  mesh->add_option("--out", out, "mesh file to write");

  auto* solve = app.add_subcommand("solve", "solve the Stokes problem on the configured domain");
  solve->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
  solve->add_option("--mesh", mesh_path, "mesh file (default: mesh from the config)")->check(CLI::ExistingFile);
  solve->add_option("--out", out, "solution file to write");

  auto* sweep = app.add_subcommand("sweep", "run an epsilon sweep");
  sweep->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "output directory (default: [output] dir)");

  auto* restrict = app.add_subcommand("restrict", "restriction operator checks");
  restrict->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
  restrict->add_option("--field", field_path, "file with u1 = ... and u2 = ...")->check(CLI::ExistingFile);
  restrict->add_option("--out", out, "output directory (default: [output] dir)");
  restrict->add_option("--verify", verify, "run only one group of checks")
      ->check(CLI::IsMember({"extension", "divfree", "norm"}));

  auto* bogovskii = app.add_subcommand("bogovskii", "Bogovskii operator checks");
  bogovskii->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
  bogovskii->add_option("--rhs", rhs_path, "file with f = ...")->check(CLI::ExistingFile);
  bogovskii->add_option("--out", out, "output directory (default: [output] dir)");
  bogovskii->add_flag("--verify", verify_flag, "emit JSON verdicts (always on)");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig c = load_config(config_path);
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const ExperimentKind expected = name == "mesh"        ? ExperimentKind::mesh
                                    : name == "solve"     ? ExperimentKind::solve
                                    : name == "sweep"     ? ExperimentKind::sweep
                                    : name == "restrict"  ? ExperimentKind::restrict
                                                          : ExperimentKind::bogovskii;
    if (c.kind != expected)
      throw ConfigError(config_path + ": experiment kind is " + to_string(c.kind) + ", not " + name);

    RunOptions o;
    if (!out.empty()) {
      if (name == "mesh" || name == "solve")
        o.out_file = out;
      else
        o.out_dir = out;
    }
    if (!mesh_path.empty()) o.mesh = mesh_path;
    if (!verify.empty()) o.verify = verify;
    if (!field_path.empty()) {
      const auto e = load_expression_file(field_path, {"u1", "u2"});
      c.field = {"0", "0"};
      if (e.count("u1")) c.field[0] = e.at("u1");
      if (e.count("u2")) c.field[1] = e.at("u2");
    }
    if (!rhs_path.empty()) {
      c.rhs_kind = "expression";
      c.rhs_expression = load_expression_file(rhs_path, {"f"}).at("f");
    }

    const RunResult r = run(c, o);
    print_summary(r);
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "lab: " << e.what() << "\n";
    return 2;
  }
}
