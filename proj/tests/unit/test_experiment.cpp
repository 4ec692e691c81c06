#include "hardy/error.hpp"
#include "hardy/experiment.hpp"

#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <sys/wait.h>

using namespace hardy;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hardy_test_" + std::to_string(::getpid())) / name;
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, json j) {
  j["output"] = {{"csv", (dir / "out.csv").string()},
                 {"json", (dir / "out.json").string()},
                 {"svg_dir", (dir / "svg").string()}};
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

json interval_sweep() {
  return {{"experiment", "boundary-constant"},
          {"domain", "interval"},
          {"delta", {0.0}},
          {"r", {0.25}},
          {"h0", 1.0 / 64},
          {"levels", 4},
          {"mesh", {{"grading", 1.05}, {"depth", 80}}}};
}

struct Command {
  int status = -1;
  std::string output;
};

Command shell(const std::string& cmd) {
  Command c;
  FILE* pipe = ::popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 512> buf{};
  while (std::fgets(buf.data(), int(buf.size()), pipe)) c.output += buf.data();
  const int raw = ::pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

const char* tool() { return std::getenv("HARDY_TOOL"); }

}  // namespace

TEST_CASE("experiment kinds round trip", "[experiment]") {
  for (auto k : {ExperimentKind::BoundaryConstant, ExperimentKind::FullDomain, ExperimentKind::Local,
                 ExperimentKind::WeakCurve, ExperimentKind::CriticalAngle, ExperimentKind::Witness,
                 ExperimentKind::Verify1D, ExperimentKind::Semibounded,
                 ExperimentKind::ReferenceReport}) {
    CHECK(experiment_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(experiment_from_string("nonsense"), ValidationError);
}

TEST_CASE("csv format", "[experiment]") {
  ReportRow row;
  row.experiment = "boundary-constant";
  row.domain = "interval";
  row.delta = 0.1;
  row.r = 0.25;
  row.h = 1.0 / 64;
  row.level = "0";
  row.lambda_min = 0.3;
  row.constant = 1.0 / std::sqrt(0.3);
  row.residual = 1e-12;
  std::ostringstream out;
  write_csv({row}, out);
  const std::string s = out.str();
  std::istringstream in(s);
  std::string header, line, extra;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(header == "experiment,domain,delta,r,h,level,lambda_min,constant,reference,ref_citation,residual,certified,wall_ms");
  CHECK_FALSE(std::getline(in, extra));
  CHECK(line.find("0.10000000000000001") != std::string::npos);
  CHECK(line.find(",none,none,") != std::string::npos);
}

TEST_CASE("interval sweep config", "[experiment]") {
  const fs::path dir = scratch("sweep");
  std::ostringstream log;
  REQUIRE(run_config(write_config(dir, interval_sweep()), log) == 0);
  const auto rows = read_csv(dir / "out.csv");
  REQUIRE(rows.size() == 6);
  for (int k = 0; k < 4; ++k) CHECK(rows[1 + k][5] == std::to_string(k));
  CHECK(rows[5][5] == "extrapolated");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][8] == "2");
    CHECK(rows[i][9] != "none");
    if (rows[i][6] == "none") continue;
    const double lambda = std::stod(rows[i][6]);
    const double constant = std::stod(rows[i][7]);
    CHECK(std::abs(constant - 1 / std::sqrt(lambda)) <= 1e-15 * constant);
    CHECK(rows[i][12] == "0");
  }
  const json j = json::parse(slurp(dir / "out.json"));
  CHECK(j.at("rows").size() == 5);
  bool svg = false;
  for (const auto& e : fs::directory_iterator(dir / "svg")) svg |= e.path().extension() == ".svg";
  CHECK(svg);
}

TEST_CASE("reruns are byte identical", "[experiment][property]") {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  json cfg = interval_sweep();
  cfg["delta"] = {0.5, 3.0};
  std::ostringstream log;
  // identical output names so the JSON config echo matches
  const fs::path pa = write_config(a, cfg);
  REQUIRE(run_config(pa, log) == 0);
  const std::string csv = slurp(a / "out.csv"), js = slurp(a / "out.json");
  REQUIRE(run_config(pa, log) == 0);
  CHECK(slurp(a / "out.csv") == csv);
  CHECK(slurp(a / "out.json") == js);

  // threaded runs keep config order
  ::setenv("HARDY_THREADS", "2", 1);
  const fs::path pb = write_config(b, cfg);
  const int status = run_config(pb, log);
  ::unsetenv("HARDY_THREADS");
  REQUIRE(status == 0);
  CHECK(slurp(b / "out.csv") == csv);
}

TEST_CASE("invalid configs exit with status 2", "[experiment]") {
  const fs::path dir = scratch("invalid");
  json cfg = interval_sweep();
  cfg["delta"] = {1.0};
  std::ostringstream log;
  CHECK(run_config(write_config(dir, cfg), log) == 2);
  CHECK(log.str().find("exceptional") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out.csv"));

  json bad = interval_sweep();
  bad["levels"] = 0;
  std::ostringstream log2;
  CHECK(validate_config(write_config(dir, bad), log2) == 2);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "boundary-constant"}, {"domain", "nowhere"}}), Error);
}

TEST_CASE("critical-angle config reports the bisection trace", "[experiment]") {
  const fs::path dir = scratch("critical");
  json cfg = {{"experiment", "critical-angle"},
              {"domain", {{"key", "wedge-complement"}, {"alpha", 1.0}}},
              {"mesh", {{"grading", 1.5}, {"angular_depth", 30}, {"tangential_h", 0.1}}},
              {"critical",
               {{"lo", 0.5}, {"hi", 1.5}, {"tol_angle", 0.3}, {"margin", 0.0}, {"radius", 0.25},
                {"h", 0.05}, {"levels", 1}}}};
  std::ostringstream log;
  const int status = run_config(write_config(dir, cfg), log);
  INFO(log.str());
  CHECK(status == 0);
  const json j = json::parse(slurp(dir / "out.json"));
  REQUIRE(j.contains("trace"));
  REQUIRE(j.contains("angle"));
  CHECK(j.at("trace").size() >= 2);
  for (const auto& step : j.at("trace")) {
    CHECK(step.at("lo").get<double>() <= step.at("alpha").get<double>());
    CHECK(step.at("alpha").get<double>() <= step.at("hi").get<double>());
  }
  const double angle = j.at("angle").get<double>();
  CHECK(angle > 0.5);
  CHECK(angle < 1.5);
}

TEST_CASE("svg convergence plot", "[experiment]") {
  Series s;
  s.name = "plot";
  s.values = {1.90, 1.95, 1.98, 1.99};
  s.reference = 2.0;
  std::ostringstream out;
  write_svg(s, out);
  const std::string svg = out.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("viewBox=\"0 0 800 600\"") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  const std::regex poly("<polyline[^>]*points=\"([^\"]*)\"");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, poly));
  std::istringstream pts(m[1].str());
  std::vector<double> ys;
  std::string pt;
  while (pts >> pt) ys.push_back(std::stod(pt.substr(pt.find(',') + 1)));
  REQUIRE(ys.size() == 4);
  // increasing values are drawn upward
  for (std::size_t i = 1; i < ys.size(); ++i) CHECK(ys[i] < ys[i - 1]);

  Series plain = s;
  plain.reference.reset();
  std::ostringstream out2;
  write_svg(plain, out2);
  CHECK(out2.str().find("stroke-dasharray") == std::string::npos);
}

TEST_CASE("command line tool", "[experiment][cli]") {
  const char* exe = tool();
  if (!exe) SKIP("HARDY_TOOL not set");
  const std::string t = std::string("\"") + exe + "\"";

  const Command ref = shell(t + " reference --delta 1.5 --domain-class convex");
  CHECK(ref.status == 0);
  CHECK(ref.output.find("self_adjoint_sufficient false") != std::string::npos);
  CHECK(ref.output.find("necessary_met true") != std::string::npos);
  CHECK(ref.output.find("beta_star 0.0625") != std::string::npos);
  CHECK(shell(t + " reference --delta 1 --domain-class convex").status == 2);

  const Command list = shell(t + " list-domains");
  CHECK(list.status == 0);
  for (const char* key : {"interval", "disk", "square", "square-complement", "koch"}) {
    CHECK(list.output.find(key) != std::string::npos);
  }

  const fs::path dir = scratch("cli");
  json cfg = interval_sweep();
  cfg["levels"] = 2;
  const fs::path good = write_config(dir, cfg);
  CHECK(shell(t + " validate " + good.string()).status == 0);
  CHECK(shell(t + " run " + good.string()).status == 0);
  CHECK(fs::exists(dir / "out.csv"));
  cfg["delta"] = {1.0};
  const fs::path bad = write_config(scratch("cli_bad"), cfg);
  const Command v = shell(t + " validate " + bad.string());
  CHECK(v.status == 2);
  CHECK(v.output.find("exceptional") != std::string::npos);
}
