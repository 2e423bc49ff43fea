#pragma once

// Cayley image of the chart flow on unitary symmetric matrices, its pullback
// to the unitary Lie algebra and the exponential (Munthe-Kaas) steppers.

#include <optional>
#include <vector>

#include "maslov/chart.hpp"
#include "maslov/system.hpp"

namespace maslov {

/// u with u u^dag = I and u = u^T.
class UnitarySymmetric {
 public:
  UnitarySymmetric() = default;

  /// Validates both invariants against tol; throws ErrorKind::structure.
  static UnitarySymmetric checked(ComplexMatrix u, double tol = kDefaultTolerances.unitary_invariant);
  /// Stores u as is. Steppers use this and report drift separately.
  static UnitarySymmetric unchecked(ComplexMatrix u);

  const ComplexMatrix& matrix() const noexcept { return u_; }
  Eigen::Index size() const noexcept { return u_.rows(); }

 private:
  explicit UnitarySymmetric(ComplexMatrix u) : u_(std::move(u)) {}
  ComplexMatrix u_;
};

/// Element of u(n): sigma^dag = -sigma.
class SkewHermitian {
 public:
  SkewHermitian() = default;
  /// Replaces m by (m - m^dag) / 2. Throws when the correction exceeds tol
  /// (relative to max(1, |m|)); pass a negative tol to skip the check.
  static SkewHermitian project(const ComplexMatrix& m, double tol = kDefaultTolerances.skew_hermitian);
  static SkewHermitian zero(Eigen::Index n);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index size() const noexcept { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

/// Cay(s) = (I - i s)(I + i s)^{-1}.
UnitarySymmetric cayley(const SymmetricChart& s);

/// (q - i p)(q + i p)^{-1}; equals cayley(chart_from_frame(f)) where the chart
/// exists and stays defined when q is singular.
UnitarySymmetric cayley_from_frame(const LagrangianFrame& frame);

/// s = -i (I - u)(I + u)^{-1}. Throws "plane on the train; chart undefined"
/// when an eigenvalue of u is within minus_one_gap of -1.
SymmetricChart inverse_cayley(const UnitarySymmetric& u, double minus_one_gap = kDefaultTolerances.minus_one_gap);

/// Number of eigenvalues of u within chart_tol radians of -1.
int singular_eigenvalue_count(const UnitarySymmetric& u, double chart_tol = kDefaultTolerances.chart_tol);

struct RotatedCoefficients {
  ComplexMatrix C;  // (a - d - i(b + c)) / 2, symmetric
  ComplexMatrix D;  // (a + d + i(b - c)) / 2, skew-Hermitian
};

RotatedCoefficients rotated_coefficients(const SymplecticCoefficients& a);

/// C + D u - u (conj(D) + conj(C) u): the flow of Cay(s) induced by the chart flow.
ComplexMatrix unitary_riccati_rhs(const UnitarySymmetric& u, const RotatedCoefficients& r);

/// xi = D - (u conj(C) - C u^dag) / 2, so that du/dx = xi u - u conj(xi).
SkewHermitian xi_field(const UnitarySymmetric& u, const RotatedCoefficients& r);

/// Truncated dexp^{-1}: sum_{k <= order} B_k / k! ad_sigma^k xi, B_1 = -1/2.
SkewHermitian dexpinv(const SkewHermitian& sigma, const SkewHermitian& xi, int order);

/// g u g^T with g = exp(sigma).
ComplexMatrix group_action(const SkewHermitian& sigma, const ComplexMatrix& u);

/// Nearest unitary (polar factor) followed by symmetric averaging.
UnitarySymmetric project_unitary_symmetric(const ComplexMatrix& u);

enum class UnitaryScheme {
  euler,     // sigma = h xi(x_m, u_m)
  midpoint,  // explicit midpoint Runge-Kutta-Munthe-Kaas, order 2
};

struct UnitaryOptions {
  UnitaryScheme scheme = UnitaryScheme::euler;
  bool reproject = true;
  double reproject_threshold = kDefaultTolerances.reproject_threshold;
  int dexpinv_order = 2;  // used by the midpoint scheme
};

struct EmkStep {
  SkewHermitian sigma;     // the Lie-algebra increment of this step
  UnitarySymmetric u_next;
  double defect_before_projection = 0.0;  // max of unitarity and symmetry defects
  bool reprojected = false;
};

/// One step from (x_m, u_m) with step h. The Euler scheme is
///   sigma = h (D - (u C* - C u^dag) / 2) at x_m,   u' = e^sigma u e^{sigma^T}.
EmkStep emk_step(const UnitarySymmetric& u, double x, double h, const CoefficientField& field, double lambda,
                 const UnitaryOptions& options = {});

struct ThetaTrace {
  std::vector<double> grid;
  std::vector<double> theta;  // continuous, radians
  double theta0 = 0.0;
};

struct UnitaryPath {
  std::vector<double> grid;
  std::vector<UnitarySymmetric> u;
  std::vector<SkewHermitian> sigma_steps;  // sigma_steps[m] takes sample m to m + 1
  ThetaTrace theta;
  double max_unitarity_defect = 0.0;
  double max_symmetry_defect = 0.0;
  int reprojections = 0;
};

/// Repeated emk_step with theta_{m+1} = theta_m - 2i tr sigma_m. theta0
/// defaults to the principal value of -i log det u0. Throws
/// ErrorKind::numerical when a step moves theta by pi or more.
UnitaryPath integrate_unitary(const CoefficientField& field, double lambda, const std::vector<double>& grid,
                              const UnitarySymmetric& u0, std::optional<double> theta0 = std::nullopt,
                              const UnitaryOptions& options = {});

}  // namespace maslov
