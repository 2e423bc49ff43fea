#include "cli.hpp"

#include <map>
#include <optional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "maslov/errors.hpp"

namespace maslov::cli {

namespace {

struct RawOptions {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::string>> pairs;
};

void add_options(CLI::App& app, RawOptions& raw) {
  const std::map<std::string, std::string> help{
      {"model", "kdv7 | poschl_teller:1 | poschl_teller:2 | poschl_teller:3"},
      {"lambda", "spectral parameter for trace"},
      {"lambda-range", "sweep range LO HI"},
      {"lambda-step", "sweep spacing"},
      {"lambda-count", "number of sweep points (alternative to --lambda-step)"},
      {"x-range", "integration interval X0 X1"},
      {"step", "x step (default (X1 - X0) / 4000)"},
      {"backend", "chart | unitary | both"},
      {"scheme", "unitary stepper: euler | midpoint"},
      {"chart-tol", "angular distance to -1 counted as singular (radians)"},
      {"unitary-tol", "unitary-symmetric invariant tolerance"},
      {"farfield-tol", "hyperbolicity threshold on |Re| of far-field eigenvalues"},
      {"out", "output file (default standard output)"},
      {"summary", "sweep JSON summary path (default OUT with .json)"},
      {"workers", "sweep threads"},
      {"bracket", "refine bracket LO HI"},
      {"tol-lambda", "refine stopping width"},
  };
  for (const auto& key : config_keys()) {
    const std::string flag = "--" + key;
    if (key == "lambda-range" || key == "x-range" || key == "bracket") {
      app.add_option(flag, raw.pairs[key], help.at(key))->expected(2)->allow_extra_args(false);
    } else {
      app.add_option(flag, raw.scalars[key], help.at(key));
    }
  }
}

int code(ExitCode c) { return static_cast<int>(c); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maslov index of Lagrangian paths via chart and unitary Riccati flows", "maslov"};
  app.require_subcommand(1);
  app.fallthrough();
  RawOptions raw;
  std::string config_path;
  bool corrupt = false;
  add_options(app, raw);
  app.add_option("--config", config_path, "JSON file with the same keys as the flags");
  auto* trace = app.add_subcommand("trace", "integrate one lambda and write per-sample CSV");
  auto* sweep = app.add_subcommand("sweep", "sweep lambda and detect eigenvalue brackets");
  auto* refine = app.add_subcommand("refine", "bisect an eigenvalue bracket");
  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  selftest->add_flag("--corrupt-tolerance", corrupt, "test hook: zero every threshold so each property fails");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return code(ExitCode::config);
  }

  try {
    nlohmann::json merged = nlohmann::json::object();
    if (!config_path.empty()) merged = load_config_file(config_path);
    const nlohmann::json env = environment_overrides();
    for (const auto& [key, value] : env.items()) merged[key] = value;
    for (const auto& key : config_keys()) {
      if (app.count("--" + key) == 0) continue;
      if (raw.pairs.count(key) != 0) {
        const auto& p = raw.pairs.at(key);
        merged[key] = parse_value(key, p.at(0) + "," + p.at(1));
      } else {
        merged[key] = parse_value(key, raw.scalars.at(key));
      }
    }
    RunConfig config = resolve_config(merged);
    config.corrupt_tolerance = corrupt;

    if (trace->parsed()) return code(cmd_trace(config, out, err));
    if (sweep->parsed()) return code(cmd_sweep(config, out, err));
    if (refine->parsed()) return code(cmd_refine(config, out, err));
    if (selftest->parsed()) return code(cmd_selftest(config, out, err));
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return code(ExitCode::config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return code(e.kind() == ErrorKind::invalid_argument ? ExitCode::config : ExitCode::model);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return code(ExitCode::failure);
  }
  return code(ExitCode::config);
}

}  // namespace maslov::cli
