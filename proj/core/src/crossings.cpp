#include "maslov/crossings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>

#include "maslov/errors.hpp"

namespace maslov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circular_distance(double a, double b) { return std::abs(wrap_angle(b - a)); }

// Index of the branch of the circle cut at pi that an (unwrapped) angle lies on.
double branch(double angle) { return std::floor((angle + kPi) / kTwoPi); }

// Assignment of previous phases to current ones minimising the largest move
// (sum of moves breaks ties). Exhaustive for n <= 6, greedy beyond.
std::vector<std::size_t> match_phases(const std::vector<double>& previous, const std::vector<double>& current) {
  const std::size_t n = previous.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n > 6) {
    std::vector<std::uint8_t> used(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = n;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double d = circular_distance(previous[i], current[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      used[best] = 1;
      perm[i] = best;
    }
    return perm;
  }
  std::vector<std::size_t> best = perm;
  double best_max = std::numeric_limits<double>::infinity();
  double best_sum = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = circular_distance(previous[i], current[perm[i]]);
      worst = std::max(worst, d);
      sum += d;
    }
    if (worst < best_max - 1e-15 || (worst <= best_max + 1e-15 && sum < best_sum)) {
      best_max = worst;
      best_sum = sum;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double min_separation(const std::vector<double>& phases) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phases.size(); ++i) {
    for (std::size_t j = i + 1; j < phases.size(); ++j) sep = std::min(sep, circular_distance(phases[i], phases[j]));
  }
  return sep;
}

}  // namespace

CrossingReport detect_phase_crossings(const std::vector<double>& grid, const std::vector<std::vector<double>>& phases,
                                      const Tolerances& tol, std::size_t first, std::size_t last) {
  if (grid.size() != phases.size()) {
    throw Error(ErrorKind::invalid_argument, "detect_phase_crossings: grid and phase samples differ in length");
  }
  CrossingReport report;
  if (grid.empty()) return report;
  last = std::min(last, grid.size() - 1);
  if (first >= last) return report;

  std::vector<double> tracked = phases[first];
  for (double& p : tracked) p = wrap_angle(p);

  for (std::size_t m = first; m < last; ++m) {
    std::vector<double> current = phases[m + 1];
    if (current.size() != tracked.size()) {
      throw Error(ErrorKind::invalid_argument, "detect_phase_crossings: phase count changes along the path");
    }
    for (double& p : current) p = wrap_angle(p);
    const auto perm = match_phases(tracked, current);
    const bool close_pair = min_separation(current) < tol.phase_resolution;

    const double h = grid[m + 1] - grid[m];
    int up = 0, down = 0, unknown = 0;
    double x_up = 0.0, x_down = 0.0, x_unknown = 0.0;
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      const double a = tracked[i];
      const double delta = wrap_angle(current[perm[i]] - a);
      const double b = a + delta;
      const double jump = branch(b) - branch(a);
      if (jump == 0.0) continue;
      const double cut = jump > 0.0 ? kTwoPi * branch(b) - kPi : kTwoPi * branch(a) - kPi;
      const double x = grid[m] + (delta != 0.0 ? (cut - a) / delta : 0.0) * h;
      const bool ambiguous = close_pair || std::abs(delta) > tol.phase_match_max;
      if (ambiguous) {
        ++unknown;
        x_unknown += x;
      } else if (jump > 0.0) {
        ++up;
        x_up += x;
      } else {
        ++down;
        x_down += x;
      }
    }
    if (up > 0) report.crossings.push_back({x_up / up, up, +1});
    if (down > 0) report.crossings.push_back({x_down / down, down, -1});
    if (unknown > 0) {
      report.crossings.push_back({x_unknown / unknown, unknown, 0});
      report.warnings.push_back("ambiguous phase matching near x = " + std::to_string(x_unknown / unknown) +
                                "; crossing direction undetermined");
    }
    for (std::size_t i = 0; i < tracked.size(); ++i) tracked[i] = current[perm[i]];
  }
  return report;
}

std::vector<std::vector<double>> path_phases(const UnitaryPath& path) {
  std::vector<std::vector<double>> phases;
  phases.reserve(path.u.size());
  for (const auto& u : path.u) phases.push_back(unitary_eigenphases(u.matrix()));
  return phases;
}

std::vector<std::vector<double>> path_phases(const ChartPath& path) {
  std::vector<std::vector<double>> phases;
  phases.reserve(path.eigen_trace.mu.size());
  for (const auto& mu : path.eigen_trace.mu) phases.push_back(chart_phases(mu));
  return phases;
}

CrossingReport detect_crossings(const UnitaryPath& path, const Tolerances& tol) {
  for (std::size_t m = 0; m + 1 < path.u.size(); ++m) {
    if (max_abs(ComplexMatrix(path.u[m + 1].matrix() - path.u[m].matrix())) >= tol.step_adequacy) {
      throw Error(ErrorKind::numerical, "detect_crossings: consecutive samples too far apart near x = " +
                                            std::to_string(path.grid[m]));
    }
  }
  return detect_phase_crossings(path.grid, path_phases(path), tol);
}

CrossingReport detect_chart_crossings(const ChartPath& path, const Tolerances& tol) {
  return detect_phase_crossings(path.grid, path_phases(path), tol);
}

MaslovResult maslov_index(const std::vector<CrossingRecord>& crossings) {
  MaslovResult result;
  result.crossings = crossings;
  for (const auto& c : crossings) {
    result.unsigned_count += c.multiplicity;
    result.signed_index += c.direction * c.multiplicity;
    if (c.direction == 0) result.sign_incomplete = true;
  }
  return result;
}

double intersection_gap(const UnitarySymmetric& u1, const UnitarySymmetric& u2) {
  Eigen::JacobiSVD<ComplexMatrix> svd(u1.matrix() - u2.matrix());
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1);
}

}  // namespace maslov
