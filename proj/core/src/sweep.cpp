#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "maslov/crossings.hpp"
#include "maslov/errors.hpp"

namespace maslov {

SweepRow evaluate_lambda(const CoefficientField& field, double lambda, const std::vector<double>& x_grid,
                         const SweepOptions& options) {
  SweepRow row;
  row.lambda = lambda;
  const auto& tol = options.tol;

  const SymplecticCoefficients a_minus = field.far_minus(lambda);
  const SymplecticCoefficients a_plus = field.far_plus(lambda);
  if (!is_hyperbolic(a_minus, tol) || !is_hyperbolic(a_plus, tol)) {
    row.status = RowStatus::skipped;
    row.note = "far-field not hyperbolic (lambda may be in essential spectrum)";
    return row;
  }

  try {
    const LagrangianFrame frame0 = farfield_frame(a_minus, Side::unstable, tol);
    const UnitarySymmetric reference_end = cayley_from_frame(farfield_frame(a_plus, Side::stable, tol));

    const bool want_chart = options.backend != Backend::unitary;
    const bool want_unitary = options.backend != Backend::chart;

    if (want_chart) {
      const SymmetricChart s0 = chart_from_frame(frame0, tol);
      const ChartPath chart = integrate_chart(field, lambda, x_grid, s0, tol);
      const auto result = maslov_index(detect_chart_crossings(chart, tol).crossings);
      row.chart_count = result.unsigned_count;
      row.crossing_count = result.unsigned_count;
      row.signed_index = result.signed_index;
      // -2 tr arctan(s) drops 2 pi at each +1 crossing; unwind it and start
      // from the same theta0 as the unitary route.
      const double theta0 = det_phase(cayley(s0).matrix());
      row.theta_end = theta_from_chart(chart.charts.back()) + (theta0 - theta_from_chart(s0)) +
                      2.0 * std::numbers::pi * result.signed_index;
      row.end_gap = intersection_gap(cayley(chart.charts.back()), reference_end);
    }
    if (want_unitary) {
      const UnitaryPath path =
          integrate_unitary(field, lambda, x_grid, cayley_from_frame(frame0), std::nullopt, options.unitary);
      const auto report = detect_crossings(path, tol);
      const auto result = maslov_index(report.crossings);
      row.unitary_count = result.unsigned_count;
      row.crossing_count = result.unsigned_count;
      row.signed_index = result.signed_index;
      row.theta_end = path.theta.theta.back();
      row.end_gap = intersection_gap(path.u.back(), reference_end);
      if (!report.warnings.empty()) row.note = report.warnings.front();
    }
    row.end_flag = row.end_gap < tol.end_gap;
    if (want_chart && want_unitary && row.chart_count != row.unitary_count) {
      row.disagreement = true;
      row.note = "chart and unitary crossing counts disagree";
    }
  } catch (const Error& e) {
    row.status = RowStatus::failed;
    row.note = e.what();
  }
  return row;
}

std::vector<EigenvalueBracket> brackets_from_rows(const std::vector<SweepRow>& rows, bool* monotone) {
  std::vector<EigenvalueBracket> brackets;
  bool mono = true;
  const SweepRow* previous = nullptr;
  for (const auto& row : rows) {
    if (row.status != RowStatus::ok) continue;
    if (previous != nullptr) {
      const int jump = row.crossing_count - previous->crossing_count;
      if (jump > 0) brackets.push_back({previous->lambda, row.lambda, jump});
      if (jump < 0) mono = false;
    }
    previous = &row;
  }
  if (monotone != nullptr) *monotone = mono;
  return brackets;
}

SweepTable sweep_lambda(const CoefficientField& field, const std::vector<double>& lambdas,
                        const std::vector<double>& x_grid, const SweepOptions& options) {
  if (lambdas.empty()) throw Error(ErrorKind::invalid_argument, "sweep_lambda: empty lambda grid");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) {
      throw Error(ErrorKind::invalid_argument, "sweep_lambda: lambdas must be strictly increasing");
    }
  }
  SweepTable table;
  table.lambdas = lambdas;
  table.rows.resize(lambdas.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < lambdas.size(); i = next++) {
      try {
        table.rows[i] = evaluate_lambda(field, lambdas[i], x_grid, options);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(lambdas.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& row : table.rows) table.any_disagreement = table.any_disagreement || row.disagreement;
  table.detected_eigenvalues = brackets_from_rows(table.rows, &table.monotone);
  return table;
}

RefineResult refine_eigenvalue(const CoefficientField& field, double lo, double hi, const std::vector<double>& x_grid,
                               double tol_lambda, const SweepOptions& options) {
  if (!(lo < hi)) throw Error(ErrorKind::invalid_argument, "refine_eigenvalue: need lo < hi");
  if (!(tol_lambda > 0.0)) throw Error(ErrorKind::invalid_argument, "refine_eigenvalue: tolerance must be positive");

  int disagreements = 0;
  auto count_at = [&](double lambda) {
    const SweepRow row = evaluate_lambda(field, lambda, x_grid, options);
    if (row.status != RowStatus::ok) {
      throw Error(ErrorKind::model, "refine_eigenvalue: lambda = " + std::to_string(lambda) + ": " + row.note);
    }
    if (row.disagreement) ++disagreements;
    return row.crossing_count;
  };

  RefineResult result;
  result.lo = lo;
  result.hi = hi;
  result.count_lo = count_at(lo);
  result.count_hi = count_at(hi);
  if (result.count_lo == result.count_hi) {
    throw Error(ErrorKind::invalid_argument,
                "refine_eigenvalue: crossing counts at the bracket ends agree; no eigenvalue bracketed");
  }
  while (result.hi - result.lo >= tol_lambda) {
    const double mid = 0.5 * (result.lo + result.hi);
    const int count = count_at(mid);
    if (count == result.count_lo) {
      result.lo = mid;
    } else {
      result.hi = mid;
      result.count_hi = count;
    }
    ++result.iterations;
  }
  result.lambda = 0.5 * (result.lo + result.hi);
  result.disagreements = disagreements;
  return result;
}

}  // namespace maslov
