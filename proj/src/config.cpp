#include "holelab/config.hpp"

#include "holelab/errors.hpp"
#include "holelab/expression.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace holelab {

namespace pt = boost::property_tree;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::mesh: return "mesh";
    case ExperimentKind::solve: return "solve";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::restrict: return "restrict";
    case ExperimentKind::bogovskii: return "bogovskii";
  }
  return "?";
}

std::string to_string(SweepKind k) {
  switch (k) {
    case SweepKind::uniform: return "uniform";
    case SweepKind::blowup: return "blowup";
    case SweepKind::dual_blowup: return "dual-blowup";
    case SweepKind::rescaling: return "rescaling";
    case SweepKind::enlarging: return "enlarging";
  }
  return "?";
}

std::optional<double> ExperimentConfig::threshold(const std::string& key) const {
  auto it = thresholds.find(key);
  if (it == thresholds.end()) return std::nullopt;
  return it->second;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  int depth = 0;
  std::string item;
  auto flush = [&] {
    if (item.find_first_not_of(" \t") == std::string::npos) throw ConfigError("empty item in list \"" + text + "\"");
    out.push_back(parse_constant(item));
    item.clear();
  };
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0)
      flush();
    else
      item += c;
  }
  flush();
  return out;
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"experiment", {"kind", "sweep", "name", "anchor", "seed"}},
      {"domain",
       {"outer", "half_size", "hole", "hole_size", "hole_rotation", "epsilon", "type", "alpha", "b1", "delta",
        "rotation_seed", "n_hole", "h_far", "quad_degree"}},
      {"source", {"kind", "g11", "g12", "g21", "g22", "bump_radius", "bump_amplitude"}},
      {"sweep", {"p", "eps", "refinement_check", "timing"}},
      {"field", {"u1", "u2"}},
      {"rhs", {"kind", "count", "modes", "f"}},
      {"thresholds",
       {"band", "growth_slope", "discrepancy", "residual", "normalization", "duality", "extension", "divergence",
        "zero_extension", "energy"}},
      {"output", {"dir", "svg"}},
  };
  return s;
}

/// Collects errors so that every problem is reported at once.
struct Reader {
  const pt::ptree& tree;
  std::vector<std::string> errors;

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    auto sec = tree.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    std::string s = *v;
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }

  template <class F>
  void with(const std::string& section, const std::string& key, F&& f) {
    if (auto v = get(section, key)) {
      try {
        f(*v);
      } catch (const Error& e) {
        errors.push_back("[" + section + "] " + key + ": " + e.what());
      }
    }
  }

  void number(const std::string& section, const std::string& key, double& out) {
    with(section, key, [&](const std::string& v) { out = parse_constant(v); });
  }

  void integer(const std::string& section, const std::string& key, int& out) {
    with(section, key, [&](const std::string& v) {
      const double d = parse_constant(v);
      if (d != static_cast<int>(d)) throw ConfigError("expected an integer, got \"" + v + "\"");
      out = static_cast<int>(d);
    });
  }

  void boolean(const std::string& section, const std::string& key, bool& out) {
    with(section, key, [&](const std::string& v) {
      if (v == "true" || v == "yes" || v == "1")
        out = true;
      else if (v == "false" || v == "no" || v == "0")
        out = false;
      else
        throw ConfigError("expected true or false, got \"" + v + "\"");
    });
  }

  void expression(const std::string& section, const std::string& key, std::string& out) {
    with(section, key, [&](const std::string& v) {
      Expression::parse(v);
      out = v;
    });
  }
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  Reader r{tree, {}};
  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty())
        r.errors.push_back("key \"" + section + "\" outside of a section");
      else
        r.errors.push_back("unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) r.errors.push_back("unknown key [" + section + "] " + key);
  }

  ExperimentConfig c;
  bool have_kind = false;
  r.with("experiment", "kind", [&](const std::string& v) {
    if (v == "mesh") c.kind = ExperimentKind::mesh;
    else if (v == "solve") c.kind = ExperimentKind::solve;
    else if (v == "sweep") c.kind = ExperimentKind::sweep;
    else if (v == "restrict") c.kind = ExperimentKind::restrict;
    else if (v == "bogovskii") c.kind = ExperimentKind::bogovskii;
    else throw ConfigError("unknown experiment kind \"" + v + "\"");
    have_kind = true;
  });
  if (!have_kind && !r.get("experiment", "kind")) r.errors.push_back("[experiment] kind is required");
  bool have_sweep = false;
  r.with("experiment", "sweep", [&](const std::string& v) {
    if (v == "uniform") c.sweep = SweepKind::uniform;
    else if (v == "blowup") c.sweep = SweepKind::blowup;
    else if (v == "dual-blowup") c.sweep = SweepKind::dual_blowup;
    else if (v == "rescaling") c.sweep = SweepKind::rescaling;
    else if (v == "enlarging") c.sweep = SweepKind::enlarging;
    else throw ConfigError("unknown sweep \"" + v + "\"");
    have_sweep = true;
  });
  if (have_kind && c.kind == ExperimentKind::sweep && !have_sweep && !r.get("experiment", "sweep"))
    r.errors.push_back("[experiment] sweep is required for kind = sweep");
  if (auto v = r.get("experiment", "name")) c.name = *v;
  if (auto v = r.get("experiment", "anchor")) c.anchor = *v;
  r.with("experiment", "seed", [&](const std::string& v) {
    const double d = parse_constant(v);
    if (!(d >= 0.0) || d != static_cast<double>(static_cast<std::uint64_t>(d)))
      throw ConfigError("seed must be a nonnegative integer");
    c.seed = static_cast<std::uint64_t>(d);
  });

  r.with("domain", "outer", [&](const std::string& v) {
    if (v == "square") c.outer = OuterKind::square;
    else if (v == "disk") c.outer = OuterKind::disk;
    else throw ConfigError("outer must be square or disk");
  });
  r.number("domain", "half_size", c.half_size);
  std::string hole_kind = "disk";
  double hole_size = 0.25, hole_rotation = 0.0;
  r.with("domain", "hole", [&](const std::string& v) {
    if (v != "disk" && v != "square") throw ConfigError("hole must be disk or square");
    hole_kind = v;
  });
  r.number("domain", "hole_size", hole_size);
  r.number("domain", "hole_rotation", hole_rotation);
  try {
    c.hole = hole_kind == "disk" ? HoleShape::disk(hole_size) : HoleShape::square(hole_size, hole_rotation);
    c.hole.validate();
  } catch (const Error& e) {
    r.errors.push_back(std::string("[domain] hole: ") + e.what());
  }
  r.number("domain", "epsilon", c.epsilon);
  c.perforated = c.kind == ExperimentKind::restrict || c.kind == ExperimentKind::bogovskii;
  r.with("domain", "type", [&](const std::string& v) {
    if (v == "hole") c.perforated = false;
    else if (v == "perforated") c.perforated = true;
    else throw ConfigError("type must be hole or perforated");
  });
  r.number("domain", "alpha", c.alpha);
  r.number("domain", "b1", c.b1);
  r.number("domain", "delta", c.delta);
  r.with("domain", "rotation_seed", [&](const std::string& v) {
    const double d = parse_constant(v);
    if (!(d >= 0.0) || d != static_cast<double>(static_cast<std::uint64_t>(d)))
      throw ConfigError("rotation_seed must be a nonnegative integer");
    c.rotation_seed = static_cast<std::uint64_t>(d);
  });
  r.integer("domain", "n_hole", c.n_hole);
  r.number("domain", "h_far", c.h_far);
  r.integer("domain", "quad_degree", c.quad_degree);

  r.with("source", "kind", [&](const std::string& v) {
    if (v != "dipole" && v != "channel" && v != "pressure-only" && v != "expression")
      throw ConfigError("source kind must be dipole, channel, pressure-only or expression");
    c.source.kind = v;
  });
  const char* g_keys[4] = {"g11", "g12", "g21", "g22"};
  for (int i = 0; i < 4; ++i) r.expression("source", g_keys[i], c.source.g[i]);
  r.number("source", "bump_radius", c.source.bump_radius);
  r.number("source", "bump_amplitude", c.source.bump_amplitude);

  r.with("sweep", "p", [&](const std::string& v) { c.p_list = parse_number_list(v); });
  r.with("sweep", "eps", [&](const std::string& v) { c.eps_list = parse_number_list(v); });
  r.boolean("sweep", "refinement_check", c.refinement_check);
  r.boolean("sweep", "timing", c.timing);

  r.expression("field", "u1", c.field[0]);
  r.expression("field", "u2", c.field[1]);
  r.with("rhs", "kind", [&](const std::string& v) {
    if (v != "random-smooth" && v != "random-p1" && v != "expression")
      throw ConfigError("rhs kind must be random-smooth, random-p1 or expression");
    c.rhs_kind = v;
  });
  r.integer("rhs", "count", c.rhs_count);
  r.integer("rhs", "modes", c.rhs_modes);
  r.expression("rhs", "f", c.rhs_expression);

  if (auto sec = tree.get_child_optional("thresholds")) {
    for (const auto& [key, value] : *sec) {
      if (!schema().at("thresholds").count(key)) continue;
      r.with("thresholds", key, [&](const std::string& v) { c.thresholds[key] = parse_constant(v); });
    }
  }
  if (auto v = r.get("output", "dir")) c.output_dir = *v;
  r.boolean("output", "svg", c.svg);

  // semantic checks
  for (double p : c.p_list)
    if (!(p > 1.0)) r.errors.push_back("[sweep] p: exponent must exceed 1 (got " + std::to_string(p) + ")");
  if (c.p_list.empty()) r.errors.push_back("[sweep] p: list is empty");
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    if (!(c.eps_list[i] > 0.0 && c.eps_list[i] <= 1.0))
      r.errors.push_back("[sweep] eps: values must lie in (0, 1]");
    if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1]))
      r.errors.push_back("[sweep] eps: list must be strictly decreasing");
  }
  const bool needs_eps = c.kind == ExperimentKind::sweep || c.kind == ExperimentKind::restrict ||
                         c.kind == ExperimentKind::bogovskii;
  if (needs_eps && c.eps_list.empty()) r.errors.push_back("[sweep] eps is required for this experiment");
  if (c.kind == ExperimentKind::restrict || c.kind == ExperimentKind::bogovskii) {
    for (double e : c.eps_list) {
      const double n = 1.0 / e;
      if (std::abs(n - std::round(n)) > 1e-9) r.errors.push_back("[sweep] eps: perforated runs need eps = 1/n");
    }
  }
  const bool needs_anchor = c.kind == ExperimentKind::sweep || c.kind == ExperimentKind::restrict ||
                            c.kind == ExperimentKind::bogovskii;
  if (needs_anchor && c.anchor.empty()) r.errors.push_back("[experiment] anchor is required for verdicts");
  if (!(c.alpha >= 1.0)) r.errors.push_back("[domain] alpha must be at least 1");
  if (c.n_hole < 16 || c.n_hole % 8 != 0) r.errors.push_back("[domain] n_hole must be at least 16 and a multiple of 8");
  if (!(c.h_far > 0.0)) r.errors.push_back("[domain] h_far must be positive");
  if (c.quad_degree < 4) r.errors.push_back("[domain] quad_degree must be at least 4");
  if (c.rhs_count < 1) r.errors.push_back("[rhs] count must be positive");
  if (c.rhs_modes < 1) r.errors.push_back("[rhs] modes must be positive");
  if (c.rhs_kind == "expression" && c.rhs_expression.empty())
    r.errors.push_back("[rhs] f is required for kind = expression");
  if (c.source.kind == "expression" && !r.get("source", "g11") && !r.get("source", "g12") && !r.get("source", "g21") &&
      !r.get("source", "g22"))
    r.errors.push_back("[source] kind = expression needs at least one of g11, g12, g21, g22");

  if (c.name.empty()) c.name = c.kind == ExperimentKind::sweep ? to_string(c.sweep) : to_string(c.kind);

  if (!r.errors.empty()) {
    std::ostringstream os;
    os << r.errors.size() << " configuration error" << (r.errors.size() > 1 ? "s" : "") << ":";
    for (const auto& e : r.errors) os << "\n  " << e;
    throw ConfigError(os.str());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::map<std::string, std::string> load_expression_file(const std::string& path,
                                                        const std::vector<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(path + " line " + std::to_string(e.line()) + ": " + e.message());
  }
  std::map<std::string, std::string> out;
  std::vector<std::string> errors;
  for (const auto& [key, body] : tree) {
    if (!body.empty()) {
      errors.push_back("unexpected section [" + key + "]");
      continue;
    }
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      errors.push_back("unknown key " + key);
      continue;
    }
    const std::string v = body.data();
    try {
      Expression::parse(v);
      out[key] = v;
    } catch (const ConfigError& e) {
      errors.push_back(key + ": " + e.what());
    }
  }
  if (out.empty() && errors.empty()) errors.push_back("no expressions found");
  if (!errors.empty()) {
    std::string msg = path + ":";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return out;
}

}  // namespace holelab
