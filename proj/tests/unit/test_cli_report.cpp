#include <doctest.h>

#include "holelab/config.hpp"
#include "holelab/errors.hpp"
#include "holelab/expression.hpp"
#include "holelab/report.hpp"
#include "holelab/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace holelab;
namespace fs = std::filesystem;

namespace {

const char* minimal = R"(
[experiment]
kind = sweep
sweep = uniform
anchor = claim A

[sweep]
p = 2
eps = 1/2, 1/4
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("holelab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("cli_report") {

TEST_CASE("minimal sweep config and defaults") {
  const ExperimentConfig c = parse_config(minimal);
  CHECK(c.kind == ExperimentKind::sweep);
  CHECK(c.sweep == SweepKind::uniform);
  CHECK(c.name == "uniform");
  CHECK(c.anchor == "claim A");
  REQUIRE(c.eps_list.size() == 2);
  CHECK(c.eps_list[1] == 0.25);
  CHECK(c.p_list == std::vector<double>{2.0});
  CHECK(c.output_dir == "out");
  CHECK(!c.threshold("band"));
}

TEST_CASE("shipped configs parse") {
  for (const auto& e : fs::directory_iterator(HOLELAB_SOURCE_DIR "/configs")) {
    CAPTURE(e.path().string());
    if (e.path().extension() == ".ini") CHECK_NOTHROW(load_config(e.path().string()));
  }
}

TEST_CASE("semantic errors are all reported") {
  const std::string text = R"(
[experiment]
kind = sweep
sweep = uniform
anchor = a
colour = red

[sweep]
p = 1, 3
eps = 1/4, 1/2

[extras]
x = 1
)";
  const std::string msg = error_of(text);
  CHECK(msg.find("4 configuration errors") != std::string::npos);
  CHECK(msg.find("unknown key [experiment] colour") != std::string::npos);
  CHECK(msg.find("unknown section [extras]") != std::string::npos);
  CHECK(msg.find("exponent must exceed 1") != std::string::npos);
  CHECK(msg.find("strictly decreasing") != std::string::npos);
}

TEST_CASE("individual validation rules") {
  const std::string head = "[experiment]\nkind = sweep\nsweep = uniform\nanchor = a\n";
  CHECK(error_of(head + "[sweep]\np = 2\neps = 1.5\n").find("(0, 1]") != std::string::npos);
  CHECK(error_of(head + "[sweep]\np = 2\n").find("eps is required") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = sweep\nsweep = uniform\n[sweep]\np = 2\neps = 1/2\n").find("anchor") !=
        std::string::npos);
  CHECK(error_of(head + "[domain]\nn_hole = 20\n[sweep]\np = 2\neps = 1/2\n").find("multiple of 8") !=
        std::string::npos);
  CHECK(error_of("[experiment]\nkind = restrict\nanchor = a\n[sweep]\np = 2\neps = 0.3\n").find("eps = 1/n") !=
        std::string::npos);
  CHECK(error_of(head + "[sweep]\np = 2\neps = 1/2\ntiming = maybe\n").find("true or false") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = teleport\n").find("teleport") != std::string::npos);
  CHECK(error_of(head + "[source]\nkind = expression\n[sweep]\np = 2\neps = 1/2\n").find("g11") !=
        std::string::npos);
}

TEST_CASE("syntax errors carry the line number") {
  const std::string msg = error_of("[experiment]\nkind = sweep\nthis line is broken\n");
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("expressions: precedence, associativity and functions") {
  CHECK(parse_constant("1 + 2*3") == 7.0);
  CHECK(parse_constant("2^3^2") == 512.0);
  CHECK(parse_constant("-2^2") == -4.0);
  CHECK(parse_constant("(1+2)*3") == 9.0);
  CHECK(parse_constant("1/16") == 0.0625);
  CHECK(parse_constant("pos(-3) + max(1, 2) + min(4, 5)") == 6.0);
  CHECK(parse_constant("cos(pi)") == doctest::Approx(-1.0));
  CHECK(parse_constant("log(e)") == doctest::Approx(1.0));
  const Expression f = Expression::parse("x1^2 + 3*y - r");
  CHECK(f.uses_coordinates());
  CHECK(f(Point(3.0, 4.0)) == doctest::Approx(9 + 12 - 5));
  CHECK_THROWS_AS(f.constant(), ConfigError);
}

TEST_CASE("expression errors name the column") {
  try {
    Expression::parse("1 + * 2");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
  CHECK_THROWS_AS(Expression::parse("sin(x"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("foo(1)"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("z"), ConfigError);
  CHECK_THROWS_AS(Expression::parse(""), ConfigError);
}

TEST_CASE("number lists") {
  const auto v = parse_number_list("1/2, 1/4 ,0.125");
  CHECK(v == std::vector<double>{0.5, 0.25, 0.125});
  CHECK_THROWS_AS(parse_number_list("1/2,,1/4"), ConfigError);
  CHECK_THROWS_AS(parse_number_list("x"), ConfigError);
}

TEST_CASE("expression files") {
  const fs::path d = scratch("expr");
  {
    std::ofstream(d / "field.ini") << "; velocity\nu1 = x1*(1-x1)\nu2 = 0\n";
    std::ofstream(d / "bad.ini") << "u1 = 1 +\nw = 2\n";
  }
  const auto m = load_expression_file((d / "field.ini").string(), {"u1", "u2"});
  CHECK(m.at("u1") == "x1*(1-x1)");
  CHECK(m.at("u2") == "0");
  const std::string msg = [&] {
    try {
      load_expression_file((d / "bad.ini").string(), {"u1", "u2"});
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  }();
  CHECK(msg.find("u1") != std::string::npos);
  CHECK(msg.find("unknown key w") != std::string::npos);
  CHECK_THROWS_AS(load_expression_file((d / "missing.ini").string(), {"f"}), ConfigError);
}

TEST_CASE("decisions and exit codes") {
  CHECK(decide(1.0, true) == Status::pass);
  CHECK(decide(1.0, false) == Status::fail);
  CHECK(decide(std::nullopt, false) == Status::inconclusive);
  CHECK(decide(std::nullopt, true, Status::extrapolated) == Status::extrapolated);
  Verdict a, b;
  a.status = Status::pass;
  b.status = Status::inconclusive;
  CHECK(exit_code({a, b}) == 0);
  b.status = Status::extrapolated;
  CHECK(exit_code({a, b}) == 0);
  b.status = Status::fail;
  CHECK(exit_code({a, b}) == 1);
  CHECK(exit_code({}) == 0);
}

TEST_CASE("sweep csv has a frozen header and zero timing by default") {
  SweepRecord r;
  r.epsilon = 0.25;
  r.p = 2.0;
  r.norms.grad_velocity_lp = 1.5;
  r.ratio = 0.1;
  r.dofs = 42;
  r.seconds = 3.7;
  std::ostringstream os;
  write_sweep_csv(os, {r}, false);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header == "epsilon,p,grad_lp,pressure_lp,source_lp,ratio,dofs,seconds");
  CHECK(row.substr(row.rfind(',') + 1) == "0");
  CHECK(row.find(",42,") != std::string::npos);
}

TEST_CASE("verdict json lists thresholds and labels") {
  Verdict v;
  v.claim = "claim A";
  v.check = "uniform p=2";
  v.status = Status::fail;
  v.measured = {{"band", 1.7}};
  v.thresholds = {{"band", 1.2}};
  v.labels = {"note"};
  const auto j = nlohmann::json::parse(verdicts_json("sweep", "uniform", {v}, {"eps=0.5: diverged"}));
  CHECK(j["schema"] == config_schema_version);
  CHECK(j["verdicts"][0]["status"] == "fail");
  CHECK(j["verdicts"][0]["thresholds"]["band"] == 1.2);
  CHECK(j["verdicts"][0]["measured"]["band"] == 1.7);
  CHECK(j["verdicts"][0]["labels"][0] == "note");
  CHECK(j["failures"].size() == 1);
}

TEST_CASE("log-log plot is a standalone svg") {
  PlotSeries s{"ratio", {0.5, 0.25, 0.125}, {1.0, 1.1, 1.2}, 0.1};
  const std::string svg = loglog_svg("title", "ratio", {s});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("ratio") != std::string::npos);
}

TEST_CASE("runs are deterministic and write the declared files") {
  const std::string cfg = R"(
[experiment]
kind = sweep
sweep = uniform
anchor = claim A

[domain]
n_hole = 16
h_far = 0.5

[sweep]
p = 2
eps = 1/2, 1/4, 1/8, 1/16
refinement_check = false

[thresholds]
band = 1.5
)";
  const ExperimentConfig c = parse_config(cfg);
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  RunOptions oa, ob;
  oa.out_dir = a.string();
  ob.out_dir = b.string();
  const RunResult ra = run(c, oa), rb = run(c, ob);
  CHECK(ra.exit_code == 0);
  REQUIRE(ra.files.size() == 3);
  REQUIRE(ra.verdicts.size() == 1);
  CHECK(ra.verdicts[0].status == Status::pass);
  CHECK(ra.verdicts[0].claim == "claim A");
  for (const char* f : {"uniform.csv", "uniform.json", "uniform.svg"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

}  // TEST_SUITE
