#pragma once

// Riccati flow of the chart s = p q^{-1}, integrated through chart
// singularities by the Mobius action of midpoint-frozen exponentials.

#include <cstdint>
#include <vector>

#include "maslov/chart.hpp"
#include "maslov/system.hpp"

namespace maslov {

/// c + d s - s (a + b s), symmetrized.
RealSymmetric riccati_rhs(const SymmetricChart& s, const SymplecticCoefficients& a);

/// Pre-symmetrization defect of riccati_rhs, for diagnostics.
double riccati_rhs_symmetry_defect(const SymmetricChart& s, const SymplecticCoefficients& a);

struct MobiusResult {
  SymmetricChart chart;
  double factor_condition = 1.0;   // cond(Phi11 + Phi12 s)
  double symmetry_defect = 0.0;    // before symmetrization, relative to max(1, |s'|)
  bool ill_conditioned = false;    // factor_condition > 1 / chart_tol
};

/// s' = (Phi21 + Phi22 s)(Phi11 + Phi12 s)^{-1}. Throws ErrorKind::numerical
/// when the denominator is singular to working precision (the caller moves
/// the sample, see integrate_chart).
MobiusResult mobius_step(const SymmetricChart& s, const RealMatrix& phi,
                         const Tolerances& tol = kDefaultTolerances);

/// exp((x1 - x0) A((x0 + x1) / 2, lambda)).
RealMatrix midpoint_propagator(const CoefficientField& field, double lambda, double x0, double x1);

struct EigenTrace {
  std::vector<double> grid;
  std::vector<RealVector> mu;                             // ascending per sample
  std::vector<std::vector<std::uint8_t>> singular_flags;  // |mu_i| > cot(chart_tol / 2)
};

struct ChartPath {
  std::vector<double> grid;
  std::vector<SymmetricChart> charts;
  EigenTrace eigen_trace;
  /// Sample sat on a singularity and was recorded at x_m - h/4 instead.
  std::vector<std::uint8_t> shifted_sample;
  /// Mobius denominator condition exceeded 1 / chart_tol on the step into this sample.
  std::vector<std::uint8_t> ill_conditioned;
  double max_symmetry_defect = 0.0;
};

/// Integrates s along grid (strictly increasing, inside [x_minus, x_plus]).
/// Each step composes Phi_m = exp(h A(x_m + h/2, lambda)) with mobius_step,
/// so the path passes through points where an eigenvalue of s is infinite.
ChartPath integrate_chart(const CoefficientField& field, double lambda, const std::vector<double>& grid,
                          const SymmetricChart& s0, const Tolerances& tol = kDefaultTolerances);

/// Number of eigenvalues of Cay(s) within chart_tol (radians) of -1, i.e.
/// |mu_i| > cot(chart_tol / 2).
int singular_eigenvalue_count(const SymmetricChart& s, double chart_tol = kDefaultTolerances.chart_tol);

/// -2 tr arctan(s): the angle to the standard reference plane.
double theta_from_chart(const SymmetricChart& s);

/// Eigenphases of Cay(s), -2 arctan(mu_i), in the order of ascending mu.
std::vector<double> chart_phases(const RealVector& mu);

}  // namespace maslov
