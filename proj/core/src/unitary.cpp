#include "maslov/unitary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "maslov/errors.hpp"

namespace maslov {

namespace {

constexpr Complex kI{0.0, 1.0};

ComplexMatrix complex_identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y) { return x * y - y * x; }

// B_k / k! for k = 0..8.
constexpr std::array<double, 9> kBernoulliOverFactorial = {
    1.0, -0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0, 1.0 / 30240.0, 0.0, -1.0 / 1209600.0,
};

}  // namespace

UnitarySymmetric UnitarySymmetric::checked(ComplexMatrix u, double tol) {
  if (u.rows() != u.cols()) throw Error(ErrorKind::invalid_argument, "UnitarySymmetric: matrix is not square");
  if (!all_finite(u)) throw Error(ErrorKind::invalid_argument, "UnitarySymmetric: non-finite entries");
  if (unitarity_defect(u) >= tol) throw Error(ErrorKind::structure, "UnitarySymmetric: matrix is not unitary");
  if (symmetry_defect(u) >= tol) throw Error(ErrorKind::structure, "UnitarySymmetric: matrix is not symmetric");
  return UnitarySymmetric(std::move(u));
}

UnitarySymmetric UnitarySymmetric::unchecked(ComplexMatrix u) { return UnitarySymmetric(std::move(u)); }

SkewHermitian SkewHermitian::project(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::invalid_argument, "SkewHermitian: matrix is not square");
  const ComplexMatrix sum = m + m.adjoint();
  if (tol >= 0.0 && 0.5 * max_abs(sum) > tol * std::max(1.0, max_abs(m))) {
    throw Error(ErrorKind::structure, "SkewHermitian: matrix is not skew-Hermitian");
  }
  SkewHermitian out;
  out.m_ = 0.5 * (m - m.adjoint());
  return out;
}

SkewHermitian SkewHermitian::zero(Eigen::Index n) {
  SkewHermitian out;
  out.m_ = ComplexMatrix::Zero(n, n);
  return out;
}

UnitarySymmetric cayley(const SymmetricChart& s) {
  const auto n = s.size();
  const ComplexMatrix is = kI * s.matrix().cast<Complex>();
  const ComplexMatrix minus = complex_identity(n) - is;
  const ComplexMatrix plus = complex_identity(n) + is;
  // I - is and I + is commute, so either side of the quotient works; solve on
  // the right: u (I + is) = I - is.
  const ComplexMatrix u = plus.transpose().partialPivLu().solve(minus.transpose()).transpose();
  return UnitarySymmetric::unchecked(0.5 * (u + u.transpose()));
}

UnitarySymmetric cayley_from_frame(const LagrangianFrame& frame) {
  const ComplexMatrix minus = frame.q().cast<Complex>() - kI * frame.p().cast<Complex>();
  const ComplexMatrix plus = frame.q().cast<Complex>() + kI * frame.p().cast<Complex>();
  const ComplexMatrix u = plus.transpose().partialPivLu().solve(minus.transpose()).transpose();
  return UnitarySymmetric::unchecked(0.5 * (u + u.transpose()));
}

SymmetricChart inverse_cayley(const UnitarySymmetric& u, double minus_one_gap) {
  const auto n = u.size();
  for (double phase : unitary_eigenphases(u.matrix())) {
    if (std::abs(std::polar(1.0, phase) + 1.0) < minus_one_gap) {
      throw Error(ErrorKind::numerical, "plane on the train; chart undefined");
    }
  }
  const ComplexMatrix minus = complex_identity(n) - u.matrix();
  const ComplexMatrix plus = complex_identity(n) + u.matrix();
  const ComplexMatrix s = -kI * plus.transpose().partialPivLu().solve(minus.transpose()).transpose();
  if (max_abs(ComplexMatrix(s.imag().cast<Complex>())) > 1e-9 * std::max(1.0, max_abs(s))) {
    throw Error(ErrorKind::structure, "inverse_cayley: result is not real (u not unitary symmetric)");
  }
  return SymmetricChart(RealMatrix(s.real()));
}

int singular_eigenvalue_count(const UnitarySymmetric& u, double chart_tol) {
  int count = 0;
  for (double phase : unitary_eigenphases(u.matrix())) {
    if (std::numbers::pi - std::abs(phase) < chart_tol) ++count;
  }
  return count;
}

RotatedCoefficients rotated_coefficients(const SymplecticCoefficients& a) {
  RotatedCoefficients r;
  r.C = 0.5 * ((a.a() - a.d()).cast<Complex>() - kI * (a.b() + a.c()).cast<Complex>());
  r.D = 0.5 * ((a.a() + a.d()).cast<Complex>() + kI * (a.b() - a.c()).cast<Complex>());
  return r;
}

ComplexMatrix unitary_riccati_rhs(const UnitarySymmetric& u, const RotatedCoefficients& r) {
  const ComplexMatrix& m = u.matrix();
  return r.C + r.D * m - m * (r.D.conjugate() + r.C.conjugate() * m);
}

SkewHermitian xi_field(const UnitarySymmetric& u, const RotatedCoefficients& r) {
  const ComplexMatrix& m = u.matrix();
  const ComplexMatrix xi = r.D - 0.5 * (m * r.C.conjugate() - r.C * m.adjoint());
  return SkewHermitian::project(xi, 1e-9);
}

SkewHermitian dexpinv(const SkewHermitian& sigma, const SkewHermitian& xi, int order) {
  if (order < 0 || order > 8) throw Error(ErrorKind::invalid_argument, "dexpinv: order must be in [0, 8]");
  ComplexMatrix term = xi.matrix();
  ComplexMatrix sum = term;
  for (int k = 1; k <= order; ++k) {
    term = commutator(sigma.matrix(), term);
    if (kBernoulliOverFactorial[static_cast<std::size_t>(k)] != 0.0) {
      sum += kBernoulliOverFactorial[static_cast<std::size_t>(k)] * term;
    }
  }
  return SkewHermitian::project(sum, -1.0);
}

ComplexMatrix group_action(const SkewHermitian& sigma, const ComplexMatrix& u) {
  const ComplexMatrix g = mat_exp(sigma.matrix());
  return g * u * g.transpose();
}

UnitarySymmetric project_unitary_symmetric(const ComplexMatrix& u) {
  Eigen::JacobiSVD<ComplexMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix polar = svd.matrixU() * svd.matrixV().adjoint();
  return UnitarySymmetric::unchecked(0.5 * (polar + polar.transpose()));
}

namespace {

SkewHermitian xi_at(const CoefficientField& field, double x, double lambda, const UnitarySymmetric& u) {
  return xi_field(u, rotated_coefficients(field.evaluate(x, lambda)));
}

}  // namespace

EmkStep emk_step(const UnitarySymmetric& u, double x, double h, const CoefficientField& field, double lambda,
                 const UnitaryOptions& options) {
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "emk_step: step must be positive");
  EmkStep out;
  const SkewHermitian k1 = xi_at(field, x, lambda, u);
  if (options.scheme == UnitaryScheme::euler) {
    out.sigma = SkewHermitian::project(h * k1.matrix(), -1.0);
  } else {
    const SkewHermitian half = SkewHermitian::project(0.5 * h * k1.matrix(), -1.0);
    const auto u_half = UnitarySymmetric::unchecked(group_action(half, u.matrix()));
    const SkewHermitian k2 = dexpinv(half, xi_at(field, x + 0.5 * h, lambda, u_half), options.dexpinv_order);
    out.sigma = SkewHermitian::project(h * k2.matrix(), -1.0);
  }
  const ComplexMatrix next = group_action(out.sigma, u.matrix());
  out.defect_before_projection = std::max(unitarity_defect(next), symmetry_defect(next));
  if (options.reproject && out.defect_before_projection > options.reproject_threshold) {
    out.u_next = project_unitary_symmetric(next);
    out.reprojected = true;
  } else {
    out.u_next = UnitarySymmetric::unchecked(next);
  }
  return out;
}

UnitaryPath integrate_unitary(const CoefficientField& field, double lambda, const std::vector<double>& grid,
                              const UnitarySymmetric& u0, std::optional<double> theta0,
                              const UnitaryOptions& options) {
  if (grid.empty()) throw Error(ErrorKind::invalid_argument, "integrate_unitary: empty grid");
  if (u0.size() != field.n) throw Error(ErrorKind::invalid_argument, "integrate_unitary: u0 has the wrong size");

  UnitaryPath path;
  path.grid = grid;
  path.u.reserve(grid.size());
  path.sigma_steps.reserve(grid.size() - 1);
  path.theta.grid = grid;
  path.theta.theta0 = theta0.value_or(det_phase(u0.matrix()));
  path.theta.theta.reserve(grid.size());
  path.theta.theta.push_back(path.theta.theta0);
  path.u.push_back(u0);

  for (std::size_t m = 0; m + 1 < grid.size(); ++m) {
    const double h = grid[m + 1] - grid[m];
    if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "integrate_unitary: grid must be strictly increasing");
    EmkStep step = emk_step(path.u.back(), grid[m], h, field, lambda, options);
    // tr sigma is purely imaginary; theta moves by 2 Im tr sigma.
    const double dtheta = 2.0 * step.sigma.matrix().trace().imag();
    if (!(std::abs(dtheta) < std::numbers::pi)) {
      throw Error(ErrorKind::numerical, "integrate_unitary: theta moved by pi or more in one step; reduce the step");
    }
    path.theta.theta.push_back(path.theta.theta.back() + dtheta);
    path.max_unitarity_defect = std::max(path.max_unitarity_defect, unitarity_defect(step.u_next.matrix()));
    path.max_symmetry_defect = std::max(path.max_symmetry_defect, symmetry_defect(step.u_next.matrix()));
    if (step.reprojected) ++path.reprojections;
    path.sigma_steps.push_back(std::move(step.sigma));
    path.u.push_back(std::move(step.u_next));
  }
  return path;
}

}  // namespace maslov
