#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "maslov");
  std::ostringstream out, err;
  const int code = maslov::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "maslov_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  for (const auto& line : lines(text)) {
    if (line.rfind('#', 0) == 0) {
      csv.comments.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
    }
  }
  return csv;
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

class EnvGuard {
 public:
  EnvGuard(const char* name, const char* value) : name_(name) { setenv(name, value, 1); }
  ~EnvGuard() { unsetenv(name_); }

 private:
  const char* name_;
};

}  // namespace

TEST_CASE("trace: kdv7 at lambda = 0.15 with the default step") {
  const auto path = scratch("trace_kdv7.csv");
  const auto r = run({"trace", "--model", "kdv7", "--lambda", "0.15", "--x-range", "-20", "20", "--out", path.string()});
  CHECK(r.code == 0);
  const auto csv = parse_csv(slurp(path));
  CHECK(csv.rows.size() == 4001);
  REQUIRE(csv.header.size() == 3 + 3 + 3 + 18);
  CHECK(csv.header[0] == "x");
  CHECK(csv.header[1] == "theta");
  CHECK(csv.header[2] == "det_phase");
  CHECK(csv.header[6] == "mu_1");
  CHECK(csv.header[9] == "re_sigma_1_1");
  double max_jump = 0.0;
  for (std::size_t m = 1; m < csv.rows.size(); ++m)
    max_jump = std::max(max_jump, std::abs(std::stod(csv.rows[m][1]) - std::stod(csv.rows[m - 1][1])));
  CHECK(max_jump < std::numbers::pi);
  CHECK(std::stod(csv.rows.front()[0]) == -20.0);
  CHECK(std::stod(csv.rows.back()[0]) == 20.0);
  CHECK(any_contains(csv.comments, "radians"));
  CHECK(any_contains(csv.comments, "sign convention"));
  CHECK(any_contains(csv.comments, "crossings[unitary]"));
  CHECK(any_contains(csv.comments, "crossings[chart]"));
  CHECK(any_contains(csv.comments, "warning: far field at x_minus not hyperbolic"));
  // mu columns are clipped at 1 / chart_tol.
  for (const auto& row : csv.rows)
    for (int i = 6; i < 9; ++i) CHECK(std::abs(std::stod(row[i])) <= 1000.0);
}

TEST_CASE("trace: Poschl-Teller below the ground state records no crossings") {
  const auto r = run({"trace", "--model", "poschl_teller:2", "--lambda", "-5"});
  CHECK(r.code == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.rows.size() == 4001);
  CHECK(any_contains(csv.comments, "crossings[unitary]: count=0"));
  CHECK(any_contains(csv.comments, "crossings[chart]: count=0"));
  const auto at_minus_two = parse_csv(run({"trace", "--model", "poschl_teller:2", "--lambda", "-2"}).out);
  CHECK(any_contains(at_minus_two.comments, "crossings[unitary]: count=1 signed=1"));
}

TEST_CASE("trace: single-backend column sets") {
  const auto chart = parse_csv(run({"trace", "--model", "poschl_teller:1", "--lambda", "-2", "--backend", "chart"}).out);
  CHECK(chart.header == std::vector<std::string>{"x", "theta", "det_phase", "phase_1", "mu_1"});
  const auto unitary =
      parse_csv(run({"trace", "--model", "poschl_teller:1", "--lambda", "-2", "--backend", "unitary"}).out);
  CHECK(unitary.header ==
        std::vector<std::string>{"x", "theta", "det_phase", "phase_1", "re_sigma_1_1", "im_sigma_1_1"});
  CHECK(unitary.rows.back()[4] == "nan");
}

TEST_CASE("trace output is byte-identical across runs") {
  const std::vector<std::string> args{"trace", "--model", "poschl_teller:2", "--lambda", "-0.5", "--step", "0.02"};
  CHECK(run(args).out == run(args).out);
}

TEST_CASE("invalid backend is a config error naming the field") {
  const auto r = run({"trace", "--backend", "spline"});
  CHECK(r.code == 2);
  CHECK(r.err.find("'backend'") != std::string::npos);
  CHECK(r.err.find("spline") != std::string::npos);
}

TEST_CASE("other config errors") {
  CHECK(run({"trace", "--step", "-1"}).code == 2);
  CHECK(run({"trace", "--x-range", "5", "-5"}).code == 2);
  CHECK(run({"trace", "--lambda", "abc"}).code == 2);
  CHECK(run({"trace", "--model", "kdv5"}).code == 2);
  CHECK(run({"sweep", "--lambda-step", "0.1", "--lambda-count", "4"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("sweep: Poschl-Teller m = 2 over [-5, -0.2]") {
  const auto out = scratch("sweep_pt.csv");
  const auto r = run({"sweep", "--model", "poschl_teller:2", "--lambda-range", "-5", "-0.2", "--lambda-step", "0.1",
                      "--workers", "4", "--out", out.string()});
  CHECK(r.code == 0);
  const auto summary = nlohmann::json::parse(slurp(scratch("sweep_pt.json")));
  REQUIRE(summary["brackets"].size() == 2);
  CHECK(summary["brackets"][0]["lo"].get<double>() <= -4.0);
  CHECK(summary["brackets"][0]["hi"].get<double>() >= -4.0);
  CHECK(summary["brackets"][1]["lo"].get<double>() <= -1.0);
  CHECK(summary["brackets"][1]["hi"].get<double>() >= -1.0);
  CHECK(summary["monotone"].get<bool>());
  CHECK(summary["exit_code"].get<int>() == 0);
  const auto csv = parse_csv(slurp(out));
  CHECK(csv.rows.size() == 49);
  CHECK(csv.header[0] == "lambda");
  CHECK(csv.header[1] == "theta_end");
  CHECK(csv.header[2] == "crossing_count");
  CHECK(csv.header[3] == "end_flag");
  CHECK(csv.rows.front()[0] == "-5");
  CHECK(csv.rows.back()[0] == "-0.2");
  CHECK(r.err.find("2 bracket(s)") != std::string::npos);
}

TEST_CASE("sweep: lambda-count grid and skipped rows") {
  const auto r = run({"sweep", "--model", "poschl_teller:1", "--lambda-range", "-2.2", "0.5", "--lambda-count", "6",
                      "--step", "0.02"});
  CHECK(r.code == 0);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 6);
  CHECK(csv.rows[0][0] == "-2.2");
  CHECK(csv.rows[1][0] == "-1.66");
  CHECK(csv.rows[5][0] == "0.5");
  CHECK(csv.rows[5][4] == "skipped");
  CHECK(csv.rows[0][4] == "ok");
}

TEST_CASE("sweep: a row where the routes disagree exits with 3") {
  // lambda = -1 is exactly the eigenvalue; the crossing sits at x = +inf and
  // the order-1 unitary stepper places it inside the interval.
  const auto r = run({"sweep", "--model", "poschl_teller:1", "--lambda-range", "-2", "0.5", "--lambda-count", "6",
                      "--step", "0.02"});
  CHECK(r.code == 3);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 6);
  CHECK(csv.rows[2][0] == "-1");
  CHECK(csv.rows[2][9] == "1");
}

TEST_CASE("sweep: empty lambda grid") {
  CHECK(run({"sweep", "--lambda-range", "0.1", "-0.1"}).code == 2);
  CHECK(run({"sweep", "--lambda-count", "0"}).code == 2);
}

TEST_CASE("refine: Poschl-Teller eigenvalues") {
  const auto r = run({"refine", "--model", "poschl_teller:2", "--bracket", "-4.5", "-3.5", "--tol-lambda", "1e-4"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["lambda"].get<double>() + 4.0) < 1e-3);
  CHECK(j["nearest_known_eigenvalue"].get<double>() == -4.0);
  const auto e = nlohmann::json::parse(run({"refine", "--model", "poschl_teller:2", "--bracket", "-1.5", "-0.5"}).out);
  CHECK(std::abs(e["lambda"].get<double>() + 1.0) < 1e-3);
}

TEST_CASE("refine: precondition and model errors") {
  CHECK(run({"refine", "--model", "poschl_teller:2"}).code == 2);
  CHECK(run({"refine", "--model", "poschl_teller:2", "--bracket", "-3.5", "-1.5"}).code == 2);
  const auto r = run({"refine", "--model", "poschl_teller:2", "--bracket", "-0.5", "0.5"});
  CHECK(r.code == 4);
  CHECK(r.err.find("not hyperbolic") != std::string::npos);
}

TEST_CASE("selftest passes and reports defects; the corruption hook fails it") {
  const auto r = run({"selftest"});
  CHECK(r.code == 0);
  const auto report = lines(r.out);
  CHECK(report.size() == 5);
  for (const auto& line : report) {
    CHECK(line.rfind("PASS ", 0) == 0);
    CHECK(line.find("max_defect=") != std::string::npos);
  }
  const auto bad = run({"selftest", "--corrupt-tolerance"});
  CHECK(bad.code != 0);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("config file, environment and flag precedence") {
  const auto cfg = scratch("run.json");
  {
    std::ofstream f(cfg);
    f << R"({"model": "poschl_teller:1", "lambda": -2, "backend": "chart", "step": 0.05})";
  }
  const auto from_file = parse_csv(run({"trace", "--config", cfg.string()}).out);
  CHECK(from_file.rows.size() == 801);
  CHECK(from_file.header.back() == "mu_1");

  {
    EnvGuard env("MASLOV_BACKEND", "unitary");
    const auto from_env = parse_csv(run({"trace", "--config", cfg.string()}).out);
    CHECK(from_env.header.back() == "im_sigma_1_1");
    const auto from_flag = parse_csv(run({"trace", "--config", cfg.string(), "--backend", "both"}).out);
    CHECK(from_flag.header.size() == 7);
  }
  {
    EnvGuard env("MASLOV_BACKEND", "bogus");
    const auto r = run({"trace", "--config", cfg.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("'backend'") != std::string::npos);
  }
  {
    EnvGuard env("MASLOV_X_RANGE", "-10,10");
    CHECK(parse_csv(run({"trace", "--config", cfg.string()}).out).rows.size() == 401);
  }

  const auto broken = scratch("broken.json");
  {
    std::ofstream f(broken);
    f << "{\n  \"model\": \"kdv7\",\n  \"lambda\": ,\n}\n";
  }
  const auto r = run({"trace", "--config", broken.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find(":3:") != std::string::npos);

  const auto unknown = scratch("unknown.json");
  {
    std::ofstream f(unknown);
    f << R"({"lamda": 0.1})";
  }
  const auto u = run({"trace", "--config", unknown.string()});
  CHECK(u.code == 2);
  CHECK(u.err.find("'lamda'") != std::string::npos);
}

TEST_CASE("the executable reports exit codes") {
  const std::string exe = MASLOV_CLI_PATH;
  const int help = std::system((exe + " --help > /dev/null").c_str());
  CHECK(WEXITSTATUS(help) == 0);
  const int bad = std::system((exe + " trace --backend nope > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
}
