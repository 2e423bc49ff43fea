#include "maslov/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "maslov/errors.hpp"

namespace maslov {

RealSymmetric::RealSymmetric(const RealMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::invalid_argument, "RealSymmetric: matrix is not square");
  }
  m_ = 0.5 * (m + m.transpose());
}

RealSymmetric RealSymmetric::zero(Eigen::Index n) { return RealSymmetric(RealMatrix::Zero(n, n)); }

RealSymmetric RealSymmetric::identity(Eigen::Index n) {
  return RealSymmetric(RealMatrix::Identity(n, n));
}

RealSymmetric RealSymmetric::diagonal(const RealVector& d) {
  return RealSymmetric(RealMatrix(d.asDiagonal()));
}

EigenDecomposition sym_eig(const RealSymmetric& m) {
  if (!all_finite(m.matrix())) {
    throw Error(ErrorKind::invalid_argument, "sym_eig: non-finite input");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "sym_eig: QR iteration did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix mat_exp(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::invalid_argument, "mat_exp: matrix is not square");
  if (!all_finite(m)) throw Error(ErrorKind::invalid_argument, "mat_exp: non-finite input");
  return m.exp();
}

RealMatrix mat_exp(const RealMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::invalid_argument, "mat_exp: matrix is not square");
  if (!all_finite(m)) throw Error(ErrorKind::invalid_argument, "mat_exp: non-finite input");
  return m.exp();
}

RealSymmetric sym_arctan(const RealSymmetric& s) {
  const auto eig = sym_eig(s);
  const RealVector angles = eig.eigenvalues.unaryExpr([](double mu) { return std::atan(mu); });
  return RealSymmetric(eig.eigenvectors * angles.asDiagonal() * eig.eigenvectors.transpose());
}

std::vector<double> unitary_eigenphases(const ComplexMatrix& u) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(u, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "unitary_eigenphases: Schur iteration did not converge");
  }
  std::vector<double> phases;
  phases.reserve(static_cast<std::size_t>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) phases.push_back(std::arg(solver.eigenvalues()(i)));
  std::sort(phases.begin(), phases.end());
  return phases;
}

double det_phase(const ComplexMatrix& u, double unitarity_tol) {
  if (u.rows() != u.cols()) throw Error(ErrorKind::invalid_argument, "det_phase: matrix is not square");
  if (!all_finite(u)) throw Error(ErrorKind::invalid_argument, "det_phase: non-finite input");
  if (unitarity_defect(u) >= unitarity_tol) {
    throw Error(ErrorKind::structure, "det_phase: matrix is not unitary");
  }
  double sum = 0.0;
  for (double phase : unitary_eigenphases(u)) sum += phase;
  return wrap_angle(sum);
}

double max_abs(const RealMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double unitarity_defect(const ComplexMatrix& u) {
  return max_abs(ComplexMatrix(u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols())));
}

double symmetry_defect(const ComplexMatrix& u) { return max_abs(ComplexMatrix(u - u.transpose())); }

double symmetry_defect(const RealMatrix& m) { return max_abs(RealMatrix(m - m.transpose())); }

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(angle, two_pi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

bool all_finite(const RealMatrix& m) { return m.allFinite(); }

bool all_finite(const ComplexMatrix& m) {
  return m.real().allFinite() && m.imag().allFinite();
}

RealVector singular_values(const RealMatrix& m) {
  Eigen::JacobiSVD<RealMatrix> svd(m);
  return svd.singularValues();
}

int numerical_rank(const RealMatrix& m, double rel_tol) {
  const RealVector sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rel_tol * sv(0);
  return static_cast<int>((sv.array() > cut).count());
}

double condition_number(const RealMatrix& m) {
  const RealVector sv = singular_values(m);
  if (sv.size() == 0) return 1.0;
  const double smallest = sv(sv.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

}  // namespace maslov
