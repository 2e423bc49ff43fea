#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "format.hpp"
#include "maslov/errors.hpp"
#include "maslov/models.hpp"

namespace maslov::cli {

namespace {

using nlohmann::json;

std::string quote(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string q = "\"";
  for (const char c : text) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

// Opens config.out, or hands back the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ConfigError("config error: field 'out': cannot write '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string describe_crossings(const CrossingReport& report) {
  std::ostringstream s;
  for (std::size_t i = 0; i < report.crossings.size(); ++i) {
    const auto& c = report.crossings[i];
    if (i > 0) s << ' ';
    s << format_double(c.x) << '(' << (c.direction > 0 ? "+" : "") << c.direction;
    if (c.multiplicity > 1) s << " x" << c.multiplicity;
    s << ')';
  }
  return s.str();
}

std::string config_line(const RunConfig& config, std::size_t steps) {
  std::ostringstream s;
  s << "# model=" << config.model << " x_range=[" << format_double(config.x_minus) << ','
    << format_double(config.x_plus) << "] steps=" << steps << " backend=" << backend_name(config.backend)
    << " scheme=" << scheme_name(config.scheme) << " chart_tol=" << format_double(config.tol.chart_tol);
  return s.str();
}

// Continuous version of -2 tr arctan(s): remove the 2 pi drops at crossings.
std::vector<double> unwound_chart_theta(const ChartPath& path, double theta0) {
  std::vector<double> theta(path.charts.size());
  double previous_raw = theta_from_chart(path.charts.front());
  theta[0] = theta0;
  for (std::size_t m = 1; m < path.charts.size(); ++m) {
    const double raw = theta_from_chart(path.charts[m]);
    theta[m] = theta[m - 1] + wrap_angle(raw - previous_raw);
    previous_raw = raw;
  }
  return theta;
}

std::string summary_path(const RunConfig& config) {
  if (!config.summary.empty()) return config.summary;
  if (config.out.empty()) return {};
  std::filesystem::path p(config.out);
  p.replace_extension(".json");
  if (p == std::filesystem::path(config.out)) p += ".summary.json";
  return p.string();
}

}  // namespace

ExitCode cmd_trace(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Model model = make_model(config.model, config.x_minus, config.x_plus);
  const CoefficientField& field = model.field;
  const double lambda = config.lambda;
  const auto grid = x_grid(config);
  const auto& tol = config.tol;
  const Eigen::Index n = field.n;
  std::vector<std::string> warnings;

  const auto a_minus = field.far_minus(lambda);
  auto policy = CenterPolicy::reject;
  if (!is_hyperbolic(a_minus, tol)) {
    policy = CenterPolicy::complete;
    warnings.push_back(
        "far field at x_minus not hyperbolic (lambda in essential spectrum); start frame = unstable directions "
        "completed by centre directions, not an invariant subspace");
  }
  const LagrangianFrame frame0 = farfield_frame(a_minus, Side::unstable, tol, policy);
  const UnitarySymmetric u0 = cayley_from_frame(frame0);
  const double theta0 = det_phase(u0.matrix());
  std::optional<UnitarySymmetric> reference_end;
  if (is_hyperbolic(field.far_plus(lambda), tol)) {
    reference_end = cayley_from_frame(farfield_frame(field.far_plus(lambda), Side::stable, tol));
  }

  const bool want_chart = config.backend != Backend::unitary;
  const bool want_unitary = config.backend != Backend::chart;
  UnitaryOptions uopt;
  uopt.scheme = config.scheme;

  std::optional<UnitaryPath> upath;
  std::optional<ChartPath> cpath;
  CrossingReport ureport, creport;
  if (want_unitary) {
    upath = integrate_unitary(field, lambda, grid, u0, theta0, uopt);
    ureport = detect_crossings(*upath, tol);
  }
  if (want_chart) {
    cpath = integrate_chart(field, lambda, grid, chart_from_frame(frame0, tol), tol);
    creport = detect_chart_crossings(*cpath, tol);
  }
  const std::vector<double> theta = want_unitary ? upath->theta.theta : unwound_chart_theta(*cpath, theta0);
  const auto phases = want_unitary ? path_phases(*upath) : path_phases(*cpath);

  Sink sink(config.out, out);
  std::ostream& csv = sink.get();
  csv << "# maslov trace\n"
      << config_line(config, grid.size() - 1) << " lambda=" << format_double(lambda) << '\n'
      << "# units: x [length]; theta, det_phase, phase_* [radians]; mu_* [dimensionless, clipped at +-1/chart_tol]; "
         "re_sigma_*, im_sigma_* [dimensionless, step from this row to the next]\n"
      << "# sign convention: " << kSignConvention << "\n"
      << "# theta0: principal value of -i log det u at x_minus\n";
  std::vector<std::string> header{"x", "theta", "det_phase"};
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("phase_" + std::to_string(i + 1));
  if (want_chart)
    for (Eigen::Index i = 0; i < n; ++i) header.push_back("mu_" + std::to_string(i + 1));
  if (want_unitary)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const std::string ij = std::to_string(i + 1) + "_" + std::to_string(j + 1);
        header.push_back("re_sigma_" + ij);
        header.push_back("im_sigma_" + ij);
      }
  write_csv_row(csv, header);

  const double clip = 1.0 / tol.chart_tol;
  std::vector<std::string> row;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    row.clear();
    row.push_back(format_double(grid[m]));
    row.push_back(format_double(theta[m]));
    const ComplexMatrix u = want_unitary ? upath->u[m].matrix() : cayley(cpath->charts[m]).matrix();
    row.push_back(format_double(wrap_angle(std::arg(u.determinant()))));
    for (const double ph : phases[m]) row.push_back(format_double(ph));
    if (want_chart)
      for (Eigen::Index i = 0; i < n; ++i)
        row.push_back(format_double(std::clamp(cpath->eigen_trace.mu[m](i), -clip, clip)));
    if (want_unitary) {
      const bool has_step = m + 1 < grid.size();
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const Complex z = has_step ? upath->sigma_steps[m].matrix()(i, j) : Complex(std::nan(""), std::nan(""));
          row.push_back(format_double(z.real()));
          row.push_back(format_double(z.imag()));
        }
    }
    write_csv_row(csv, row);
  }

  for (const auto& w : ureport.warnings) warnings.push_back("unitary: " + w);
  for (const auto& w : creport.warnings) warnings.push_back("chart: " + w);
  auto footer = [&](const std::string& name, const CrossingReport& report) {
    const auto index = maslov_index(report.crossings);
    csv << "# crossings[" << name << "]: count=" << index.unsigned_count << " signed=" << index.signed_index
        << (index.sign_incomplete ? " sign_incomplete" : "") << " at x=" << describe_crossings(report) << '\n';
    return index.unsigned_count;
  };
  int ucount = -1, ccount = -1;
  if (want_unitary) ucount = footer("unitary", ureport);
  if (want_chart) ccount = footer("chart", creport);
  if (want_unitary) {
    csv << "# max_unitarity_defect=" << format_double(upath->max_unitarity_defect)
        << " max_symmetry_defect=" << format_double(upath->max_symmetry_defect)
        << " reprojections=" << upath->reprojections << '\n';
  }
  if (want_chart) csv << "# max_chart_symmetry_defect=" << format_double(cpath->max_symmetry_defect) << '\n';
  if (reference_end) {
    const UnitarySymmetric u_end = want_unitary ? upath->u.back() : cayley(cpath->charts.back());
    const double gap = intersection_gap(u_end, *reference_end);
    csv << "# end_gap=" << format_double(gap) << " end_flag=" << (gap < tol.end_gap ? 1 : 0) << '\n';
  } else {
    csv << "# end_gap=n/a (far field at x_plus not hyperbolic)\n";
  }
  for (const auto& w : warnings) csv << "# warning: " << w << '\n';
  for (const auto& w : warnings) err << "warning: " << w << '\n';

  if (want_chart && want_unitary && ucount != ccount) {
    csv << "# disagreement: chart and unitary crossing counts differ\n";
    err << "error: chart and unitary crossing counts differ (" << ccount << " vs " << ucount << ")\n";
    return ExitCode::disagreement;
  }
  return ExitCode::ok;
}

ExitCode cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Model model = make_model(config.model, config.x_minus, config.x_plus);
  const auto lambdas = lambda_grid(config);
  const auto grid = x_grid(config);
  SweepOptions options;
  options.backend = config.backend;
  options.tol = config.tol;
  options.unitary.scheme = config.scheme;
  options.workers = config.workers;
  const SweepTable table = sweep_lambda(model.field, lambdas, grid, options);

  int ok = 0, skipped = 0, failed = 0, max_count = -1;
  for (const auto& r : table.rows) {
    if (r.status == RowStatus::ok) {
      ++ok;
      max_count = std::max(max_count, r.crossing_count);
    }
    skipped += r.status == RowStatus::skipped;
    failed += r.status == RowStatus::failed;
  }
  ExitCode code = ExitCode::ok;
  if (failed > 0) code = ExitCode::model;
  if (table.any_disagreement) code = ExitCode::disagreement;

  {
    Sink sink(config.out, out);
    std::ostream& csv = sink.get();
    csv << "# maslov sweep\n"
        << config_line(config, grid.size() - 1) << '\n'
        << "# units: lambda [spectral parameter]; theta_end [radians] at x_plus; end_gap [dimensionless]\n"
        << "# sign convention: " << kSignConvention << "\n";
    write_csv_row(csv, {"lambda", "theta_end", "crossing_count", "end_flag", "status", "chart_count", "unitary_count",
                        "signed_index", "end_gap", "disagreement", "note"});
    for (const auto& r : table.rows) {
      const bool has = r.status == RowStatus::ok;
      const char* status = r.status == RowStatus::ok ? "ok" : r.status == RowStatus::skipped ? "skipped" : "failed";
      write_csv_row(csv, {format_double(r.lambda), has ? format_double(r.theta_end) : "",
                          has ? std::to_string(r.crossing_count) : "", has ? std::to_string(r.end_flag ? 1 : 0) : "",
                          status, r.chart_count >= 0 ? std::to_string(r.chart_count) : "",
                          r.unitary_count >= 0 ? std::to_string(r.unitary_count) : "",
                          has ? std::to_string(r.signed_index) : "", has ? format_double(r.end_gap) : "",
                          std::to_string(r.disagreement ? 1 : 0), quote(r.note)});
    }
  }

  json summary;
  summary["command"] = "sweep";
  summary["model"] = config.model;
  summary["lambda_range"] = {config.lambda_lo, config.lambda_hi};
  summary["lambda_count"] = lambdas.size();
  summary["x_range"] = {config.x_minus, config.x_plus};
  summary["x_steps"] = grid.size() - 1;
  summary["backend"] = backend_name(config.backend);
  summary["scheme"] = scheme_name(config.scheme);
  summary["sign_convention"] = kSignConvention;
  summary["brackets"] = json::array();
  for (const auto& b : table.detected_eigenvalues)
    summary["brackets"].push_back({{"lo", b.lo}, {"hi", b.hi}, {"multiplicity", b.multiplicity}});
  summary["bracket_count"] = table.detected_eigenvalues.size();
  summary["monotone"] = table.monotone;
  summary["any_disagreement"] = table.any_disagreement;
  summary["rows_ok"] = ok;
  summary["rows_skipped"] = skipped;
  summary["rows_failed"] = failed;
  summary["max_crossing_count"] = max_count;
  summary["known_eigenvalues"] = model.known_eigenvalues;
  summary["exit_code"] = static_cast<int>(code);
  if (const auto path = summary_path(config); !path.empty()) {
    std::ofstream js(path);
    if (!js) throw ConfigError("config error: field 'summary': cannot write '" + path + "'");
    js << summary.dump(2) << '\n';
  }

  err << "sweep: " << table.detected_eigenvalues.size() << " bracket(s)";
  for (const auto& b : table.detected_eigenvalues) err << " [" << format_double(b.lo) << ", " << format_double(b.hi) << ']';
  err << "; rows ok=" << ok << " skipped=" << skipped << " failed=" << failed
      << "; max crossing count=" << max_count << '\n';
  if (table.any_disagreement) err << "error: chart and unitary crossing counts disagree on some rows\n";
  if (!table.monotone) err << "warning: crossing count not monotone in lambda\n";
  return code;
}

ExitCode cmd_refine(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (!config.bracket) throw ConfigError("config error: field 'bracket': required for refine");
  const Model model = make_model(config.model, config.x_minus, config.x_plus);
  SweepOptions options;
  options.backend = config.backend;
  options.tol = config.tol;
  options.unitary.scheme = config.scheme;
  const auto result = refine_eigenvalue(model.field, config.bracket->first, config.bracket->second, x_grid(config),
                                        config.tol_lambda, options);
  json j;
  j["command"] = "refine";
  j["model"] = config.model;
  j["bracket"] = {config.bracket->first, config.bracket->second};
  j["tol_lambda"] = config.tol_lambda;
  j["lambda"] = result.lambda;
  j["lo"] = result.lo;
  j["hi"] = result.hi;
  j["count_lo"] = result.count_lo;
  j["count_hi"] = result.count_hi;
  j["iterations"] = result.iterations;
  j["disagreements"] = result.disagreements;
  if (!model.known_eigenvalues.empty()) {
    const auto nearest = *std::min_element(model.known_eigenvalues.begin(), model.known_eigenvalues.end(),
                                           [&](double a, double b) {
                                             return std::abs(a - result.lambda) < std::abs(b - result.lambda);
                                           });
    j["nearest_known_eigenvalue"] = nearest;
    j["error_vs_known"] = std::abs(result.lambda - nearest);
  }
  Sink sink(config.out, out);
  sink.get() << j.dump(2) << '\n';
  err << "refine: lambda* = " << format_double(result.lambda) << " in [" << format_double(result.lo) << ", "
      << format_double(result.hi) << "]\n";
  return ExitCode::ok;
}

namespace {

struct Property {
  std::string name;
  double defect;
  double threshold;
};

double selftest_trace_formula() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> entry(-5.0, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    RealMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = entry(rng);
    const SymmetricChart s(m);
    worst = std::max(worst, std::abs(wrap_angle(det_phase(cayley(s).matrix()) - theta_from_chart(s))));
  }
  return worst;
}

// Frames with planted rank(q) = n - k, as (O C g, (O S + M O C) g).
double selftest_theorem1() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), angle(-1.2, 1.2);
  const Eigen::Index n = 4;
  int mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index k = trial % 4;
    RealMatrix r(n, n), g(n, n), shear(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        r(i, j) = unit(rng);
        g(i, j) = unit(rng) + (i == j ? 3.0 : 0.0);
      }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) shear(i, j) = shear(j, i) = unit(rng);
    const RealMatrix o = Eigen::HouseholderQR<RealMatrix>(r).householderQ() * RealMatrix::Identity(n, n);
    RealVector c(n), sn(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double phi = i < k ? std::numbers::pi / 2 : angle(rng);
      c(i) = i < k ? 0.0 : std::cos(phi);
      sn(i) = std::sin(phi);
    }
    const RealMatrix oc = o * c.asDiagonal();
    const LagrangianFrame frame(RealMatrix(oc * g), RealMatrix((o * sn.asDiagonal() + shear * oc) * g));
    const double eps = 1e-6;
    const RealMatrix q = std::cos(eps) * frame.q() - std::sin(eps) * frame.p();
    const RealMatrix p = std::sin(eps) * frame.q() + std::cos(eps) * frame.p();
    const int singular = singular_eigenvalue_count(chart_from_frame(LagrangianFrame::unchecked(q, p)));
    const int via_unitary = singular_eigenvalue_count(cayley_from_frame(frame));
    if (singular != k || via_unitary != k || total_frame_rank_loss(frame) != k ||
        total_frame_matrix_rank_loss(frame) != k)
      ++mismatches;
  }
  return mismatches;
}

}  // namespace

ExitCode cmd_selftest(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<Property> properties;
  properties.push_back({"trace_formula", selftest_trace_formula(), 1e-10});

  {
    const auto field = kdv7_field();
    const double lambda = 0.15;
    const auto frame0 = farfield_frame(field.far_minus(lambda), Side::unstable, kDefaultTolerances, CenterPolicy::complete);
    UnitaryOptions options;
    options.reproject = false;
    const auto path = integrate_unitary(field, lambda, uniform_grid(-20.0, 20.0, 10000), cayley_from_frame(frame0),
                                       std::nullopt, options);
    properties.push_back({"unitarity_drift", std::max(path.max_unitarity_defect, path.max_symmetry_defect), 1e-9});
    double circle = 0.0;
    for (std::size_t m = 0; m < path.u.size(); ++m)
      circle = std::max(circle, std::abs(std::exp(Complex(0.0, path.theta.theta[m])) - path.u[m].matrix().determinant()));
    properties.push_back({"circle_consistency", circle, 1e-7});
  }

  properties.push_back({"theorem1_equivalence", selftest_theorem1(), 0.5});

  {
    int worst = 0;
    const auto grid = uniform_grid(-20.0, 20.0, 4000);
    const auto pt = poschl_teller_field(2);
    const auto kdv = kdv7_field();
    for (const double lambda : {-5.0, -2.0, -0.5}) {
      const auto row = evaluate_lambda(pt, lambda, grid);
      worst = std::max(worst, row.status == RowStatus::ok ? std::abs(row.chart_count - row.unitary_count) : 1);
    }
    for (const double lambda : {-0.2, -0.05}) {
      const auto row = evaluate_lambda(kdv, lambda, grid);
      worst = std::max(worst, row.status == RowStatus::ok ? std::abs(row.chart_count - row.unitary_count) : 1);
    }
    properties.push_back({"backend_agreement", static_cast<double>(worst), 0.5});
  }

  bool all = true;
  for (auto& p : properties) {
    if (config.corrupt_tolerance) p.threshold = 0.0;
    const bool pass = p.defect < p.threshold;
    all = all && pass;
    out << (pass ? "PASS " : "FAIL ") << p.name << " max_defect=" << format_double(p.defect)
        << " threshold=" << format_double(p.threshold) << '\n';
  }
  if (!all) err << "selftest: failures\n";
  return all ? ExitCode::ok : ExitCode::failure;
}

}  // namespace maslov::cli
