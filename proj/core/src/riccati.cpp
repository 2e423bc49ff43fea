#include "maslov/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maslov/errors.hpp"

namespace maslov {

namespace {

RealMatrix riccati_raw(const SymmetricChart& s, const SymplecticCoefficients& a) {
  const RealMatrix& m = s.matrix();
  return a.c() + a.d() * m - m * (a.a() + a.b() * m);
}

double singular_threshold(double chart_tol) { return 1.0 / std::tan(0.5 * chart_tol); }

void append_sample(ChartPath& path, double x, const SymmetricChart& s, double chart_tol) {
  const auto eig = sym_eig(s.symmetric());
  const double threshold = singular_threshold(chart_tol);
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(eig.eigenvalues.size()));
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    flags[static_cast<std::size_t>(i)] = std::abs(eig.eigenvalues(i)) > threshold ? 1 : 0;
  }
  path.grid.push_back(x);
  path.charts.push_back(s);
  path.eigen_trace.grid.push_back(x);
  path.eigen_trace.mu.push_back(eig.eigenvalues);
  path.eigen_trace.singular_flags.push_back(std::move(flags));
}

}  // namespace

RealSymmetric riccati_rhs(const SymmetricChart& s, const SymplecticCoefficients& a) {
  if (s.size() != a.n()) throw Error(ErrorKind::invalid_argument, "riccati_rhs: dimension mismatch");
  return RealSymmetric(riccati_raw(s, a));
}

double riccati_rhs_symmetry_defect(const SymmetricChart& s, const SymplecticCoefficients& a) {
  return symmetry_defect(riccati_raw(s, a));
}

MobiusResult mobius_step(const SymmetricChart& s, const RealMatrix& phi, const Tolerances& tol) {
  const auto n = s.size();
  if (phi.rows() != 2 * n || phi.cols() != 2 * n) {
    throw Error(ErrorKind::invalid_argument, "mobius_step: propagator has the wrong size");
  }
  if (symplectic_defect(phi) > tol.symplectic * std::max(1.0, max_abs(phi) * max_abs(phi))) {
    throw Error(ErrorKind::structure, "mobius_step: propagator is not symplectic");
  }
  const RealMatrix& m = s.matrix();
  const RealMatrix numerator = phi.bottomLeftCorner(n, n) + phi.bottomRightCorner(n, n) * m;
  const RealMatrix denominator = phi.topLeftCorner(n, n) + phi.topRightCorner(n, n) * m;

  const double cond = condition_number(denominator);
  if (!(cond < tol.mobius_singular_condition)) {
    throw Error(ErrorKind::numerical, "mobius_step: denominator singular at this sample");
  }
  // s' D = N  <=>  D^T s'^T = N^T
  const RealMatrix next = denominator.transpose().partialPivLu().solve(numerator.transpose()).transpose();

  MobiusResult out;
  out.symmetry_defect = symmetry_defect(next) / std::max(1.0, max_abs(next));
  out.chart = SymmetricChart(next);
  out.factor_condition = cond;
  out.ill_conditioned = cond > 1.0 / tol.chart_tol;
  return out;
}

RealMatrix midpoint_propagator(const CoefficientField& field, double lambda, double x0, double x1) {
  const double h = x1 - x0;
  return mat_exp(RealMatrix(h * field.evaluate(x0 + 0.5 * h, lambda).full()));
}

ChartPath integrate_chart(const CoefficientField& field, double lambda, const std::vector<double>& grid,
                          const SymmetricChart& s0, const Tolerances& tol) {
  if (grid.empty()) throw Error(ErrorKind::invalid_argument, "integrate_chart: empty grid");
  if (s0.size() != field.n) throw Error(ErrorKind::invalid_argument, "integrate_chart: s0 has the wrong size");
  for (std::size_t m = 1; m < grid.size(); ++m) {
    if (!(grid[m] > grid[m - 1])) {
      throw Error(ErrorKind::invalid_argument, "integrate_chart: grid must be strictly increasing");
    }
  }
  const double slack = 1e-12 * std::max(1.0, field.x_plus - field.x_minus);
  if (grid.front() < field.x_minus - slack || grid.back() > field.x_plus + slack) {
    throw Error(ErrorKind::invalid_argument, "integrate_chart: grid leaves [x_minus, x_plus]");
  }

  ChartPath path;
  path.grid.reserve(grid.size());
  path.charts.reserve(grid.size());
  append_sample(path, grid.front(), s0, tol.chart_tol);
  path.shifted_sample.push_back(0);
  path.ill_conditioned.push_back(0);

  SymmetricChart state = s0;
  double x_state = grid.front();
  for (std::size_t m = 0; m + 1 < grid.size(); ++m) {
    const double target = grid[m + 1];
    const double h = target - grid[m];
    MobiusResult result;
    bool shifted = false;
    try {
      result = mobius_step(state, midpoint_propagator(field, lambda, x_state, target), tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numerical) throw;
      // The sample sits on the singular set; it is isolated, so a quarter step
      // back is regular.
      shifted = true;
      const double moved = target - 0.25 * h;
      result = mobius_step(state, midpoint_propagator(field, lambda, x_state, moved), tol);
      x_state = moved;
    }
    if (!shifted) x_state = target;
    state = result.chart;
    path.max_symmetry_defect = std::max(path.max_symmetry_defect, result.symmetry_defect);
    append_sample(path, target, state, tol.chart_tol);
    path.shifted_sample.push_back(shifted ? 1 : 0);
    path.ill_conditioned.push_back(result.ill_conditioned ? 1 : 0);
  }
  return path;
}

int singular_eigenvalue_count(const SymmetricChart& s, double chart_tol) {
  const auto eig = sym_eig(s.symmetric());
  const double threshold = singular_threshold(chart_tol);
  return static_cast<int>((eig.eigenvalues.array().abs() > threshold).count());
}

double theta_from_chart(const SymmetricChart& s) {
  const auto eig = sym_eig(s.symmetric());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) sum += std::atan(eig.eigenvalues(i));
  return -2.0 * sum;
}

std::vector<double> chart_phases(const RealVector& mu) {
  std::vector<double> phases(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) phases[static_cast<std::size_t>(i)] = -2.0 * std::atan(mu(i));
  return phases;
}

}  // namespace maslov
