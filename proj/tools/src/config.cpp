#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace maslov::cli {

namespace {

enum class KeyType { string, number, integer, pair };

struct KeyInfo {
  std::string name;
  KeyType type;
};

const std::vector<KeyInfo>& key_table() {
  static const std::vector<KeyInfo> table{
      {"model", KeyType::string},        {"lambda", KeyType::number},      {"lambda-range", KeyType::pair},
      {"lambda-step", KeyType::number},  {"lambda-count", KeyType::integer}, {"x-range", KeyType::pair},
      {"step", KeyType::number},         {"backend", KeyType::string},     {"scheme", KeyType::string},
      {"chart-tol", KeyType::number},    {"unitary-tol", KeyType::number}, {"farfield-tol", KeyType::number},
      {"out", KeyType::string},          {"summary", KeyType::string},     {"workers", KeyType::integer},
      {"bracket", KeyType::pair},        {"tol-lambda", KeyType::number},
  };
  return table;
}

const KeyInfo* find_key(const std::string& name) {
  for (const auto& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

[[noreturn]] void field_error(const std::string& key, const std::string& what) {
  throw ConfigError("config error: field '" + key + "': " + what);
}

double to_number(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  if (first < last && *first == '+') ++first;
  const auto [end, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || end != last) field_error(key, "expected a number, got '" + text + "'");
  return value;
}

double get_number(const nlohmann::json& merged, const std::string& key) {
  const auto& v = merged.at(key);
  if (!v.is_number()) field_error(key, "expected a number, got " + v.dump());
  const double d = v.get<double>();
  if (!std::isfinite(d)) field_error(key, "expected a finite number");
  return d;
}

long get_integer(const nlohmann::json& merged, const std::string& key) {
  const auto& v = merged.at(key);
  if (!v.is_number_integer()) {
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long>(v.get<double>());
    field_error(key, "expected an integer, got " + v.dump());
  }
  return v.get<long>();
}

std::string get_string(const nlohmann::json& merged, const std::string& key) {
  const auto& v = merged.at(key);
  if (!v.is_string()) field_error(key, "expected a string, got " + v.dump());
  return v.get<std::string>();
}

std::pair<double, double> get_pair(const nlohmann::json& merged, const std::string& key) {
  const auto& v = merged.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    field_error(key, "expected two numbers [lo, hi], got " + v.dump());
  const double lo = v[0].get<double>(), hi = v[1].get<double>();
  if (!std::isfinite(lo) || !std::isfinite(hi)) field_error(key, "expected finite numbers");
  return {lo, hi};
}

double positive(const std::string& key, double value) {
  if (!(value > 0.0)) field_error(key, "must be positive, got " + std::to_string(value));
  return value;
}

double round_lambda(double value) { return std::round(value * 1e12) / 1e12; }

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
  }();
  return names;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
    const auto line_start = text.rfind('\n', offset == 0 ? 0 : offset - 1);
    const auto column = offset - (line_start == std::string::npos ? 0 : line_start + 1) + 1;
    throw ConfigError("config error: " + path + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": invalid JSON");
  }
  if (!parsed.is_object()) throw ConfigError("config error: " + path + ": expected a JSON object");
  for (const auto& [key, value] : parsed.items()) {
    const KeyInfo* info = find_key(key);
    if (info == nullptr) field_error(key, "unknown key in " + path);
    if (info->type == KeyType::string && !value.is_string()) field_error(key, "expected a string in " + path);
  }
  return parsed;
}

nlohmann::json parse_value(const std::string& key, const std::string& raw) {
  const KeyInfo* info = find_key(key);
  if (info == nullptr) field_error(key, "unknown key");
  switch (info->type) {
    case KeyType::string:
      return raw;
    case KeyType::number:
      return to_number(key, raw);
    case KeyType::integer: {
      const double d = to_number(key, raw);
      if (std::floor(d) != d) field_error(key, "expected an integer, got '" + raw + "'");
      return static_cast<long>(d);
    }
    case KeyType::pair: {
      std::string text = raw;
      std::replace(text.begin(), text.end(), ',', ' ');
      std::istringstream parts(text);
      std::vector<std::string> fields;
      for (std::string f; parts >> f;) fields.push_back(f);
      if (fields.size() != 2) field_error(key, "expected two numbers 'lo,hi', got '" + raw + "'");
      return nlohmann::json::array({to_number(key, fields[0]), to_number(key, fields[1])});
    }
  }
  return nullptr;
}

nlohmann::json environment_overrides() {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& k : key_table()) {
    std::string var = "MASLOV_";
    for (const char c : k.name) var += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* value = std::getenv(var.c_str()); value != nullptr) {
      try {
        out[k.name] = parse_value(k.name, value);
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " (from " + var + ")");
      }
    }
  }
  return out;
}

RunConfig resolve_config(const nlohmann::json& merged) {
  RunConfig c;
  for (const auto& [key, value] : merged.items())
    if (find_key(key) == nullptr) field_error(key, "unknown key");
  auto has = [&](const std::string& key) { return merged.contains(key) && !merged.at(key).is_null(); };

  if (has("model")) c.model = get_string(merged, "model");
  const bool pt = c.model.rfind("poschl_teller:", 0) == 0;
  int pt_m = 0;
  if (pt) {
    const std::string tail = c.model.substr(14);
    if (tail == "1" || tail == "2" || tail == "3") pt_m = tail[0] - '0';
  }

  if (has("x-range")) std::tie(c.x_minus, c.x_plus) = get_pair(merged, "x-range");
  if (!(c.x_minus < c.x_plus)) field_error("x-range", "need lo < hi");
  c.step = has("step") ? positive("step", get_number(merged, "step")) : (c.x_plus - c.x_minus) / 4000.0;
  if (c.step > c.x_plus - c.x_minus) field_error("step", "larger than the x-range");

  // Model-dependent defaults: the paper's figure settings for kdv7, a range
  // below the continuum for the oracle model.
  if (pt) {
    c.lambda = -0.5;
    c.lambda_lo = -static_cast<double>(pt_m * pt_m) - 1.0;
    c.lambda_hi = -0.2;
    c.lambda_step = 0.05;
  } else {
    c.lambda = 0.15;
    c.lambda_lo = -0.3;
    c.lambda_hi = 0.15;
    c.lambda_step = 0.005;
  }
  if (has("lambda")) c.lambda = get_number(merged, "lambda");
  if (has("lambda-range")) std::tie(c.lambda_lo, c.lambda_hi) = get_pair(merged, "lambda-range");
  if (has("lambda-count")) {
    c.lambda_count = get_integer(merged, "lambda-count");
    c.lambda_step.reset();
  }
  if (has("lambda-step")) {
    if (has("lambda-count")) field_error("lambda-step", "give either lambda-step or lambda-count, not both");
    c.lambda_step = positive("lambda-step", get_number(merged, "lambda-step"));
  }

  if (has("backend")) {
    const std::string b = get_string(merged, "backend");
    if (b == "chart") c.backend = Backend::chart;
    else if (b == "unitary") c.backend = Backend::unitary;
    else if (b == "both") c.backend = Backend::both;
    else field_error("backend", "expected one of chart, unitary, both; got '" + b + "'");
  }
  if (has("scheme")) {
    const std::string s = get_string(merged, "scheme");
    if (s == "euler") c.scheme = UnitaryScheme::euler;
    else if (s == "midpoint") c.scheme = UnitaryScheme::midpoint;
    else field_error("scheme", "expected one of euler, midpoint; got '" + s + "'");
  }
  if (has("chart-tol")) c.tol.chart_tol = positive("chart-tol", get_number(merged, "chart-tol"));
  if (c.tol.chart_tol >= std::numbers::pi) field_error("chart-tol", "must be below pi radians");
  if (has("unitary-tol")) c.tol.unitary_invariant = positive("unitary-tol", get_number(merged, "unitary-tol"));
  if (has("farfield-tol")) c.tol.hyperbolicity = positive("farfield-tol", get_number(merged, "farfield-tol"));
  if (has("out")) c.out = get_string(merged, "out");
  if (has("summary")) c.summary = get_string(merged, "summary");
  if (has("workers")) {
    const long w = get_integer(merged, "workers");
    if (w < 1 || w > 1024) field_error("workers", "expected 1..1024, got " + std::to_string(w));
    c.workers = static_cast<unsigned>(w);
  }
  if (has("bracket")) {
    c.bracket = get_pair(merged, "bracket");
    if (!(c.bracket->first < c.bracket->second)) field_error("bracket", "need lo < hi");
  }
  if (has("tol-lambda")) c.tol_lambda = positive("tol-lambda", get_number(merged, "tol-lambda"));
  return c;
}

std::vector<double> x_grid(const RunConfig& config) {
  const double span = config.x_plus - config.x_minus;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(span / config.step)));
  return uniform_grid(config.x_minus, config.x_plus, steps);
}

std::vector<double> lambda_grid(const RunConfig& config) {
  std::vector<double> grid;
  const double lo = config.lambda_lo, hi = config.lambda_hi;
  if (config.lambda_count) {
    const long n = *config.lambda_count;
    if (n == 1 && lo <= hi) grid.push_back(lo);
    for (long i = 0; n > 1 && lo < hi && i < n; ++i) grid.push_back(round_lambda(lo + (hi - lo) * i / (n - 1)));
  } else if (lo <= hi) {
    const double step = *config.lambda_step;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) grid.push_back(round_lambda(lo + step * i));
  }
  if (grid.empty()) field_error("lambda-range", "empty lambda grid");
  return grid;
}

std::string backend_name(Backend backend) {
  switch (backend) {
    case Backend::chart: return "chart";
    case Backend::unitary: return "unitary";
    case Backend::both: return "both";
  }
  return "both";
}

std::string scheme_name(UnitaryScheme scheme) { return scheme == UnitaryScheme::midpoint ? "midpoint" : "euler"; }

}  // namespace maslov::cli
