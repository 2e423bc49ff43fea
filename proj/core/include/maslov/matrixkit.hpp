#pragma once

// Dense real/complex kernels shared by the rest of the library.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "maslov/tolerances.hpp"

namespace maslov {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Real symmetric n x n matrix. The constructor replaces its argument by
/// (M + M^T)/2, so entries(i, j) == entries(j, i) holds bit for bit.
class RealSymmetric {
 public:
  RealSymmetric() = default;
  explicit RealSymmetric(const RealMatrix& m);

  static RealSymmetric zero(Eigen::Index n);
  static RealSymmetric identity(Eigen::Index n);
  static RealSymmetric diagonal(const RealVector& d);

  const RealMatrix& matrix() const noexcept { return m_; }
  Eigen::Index size() const noexcept { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  RealMatrix m_;
};

struct EigenDecomposition {
  RealVector eigenvalues;   // ascending
  RealMatrix eigenvectors;  // orthonormal columns
};

EigenDecomposition sym_eig(const RealSymmetric& m);

/// Matrix exponential by scaling-and-squaring with a diagonal Pade
/// approximant (degree picked from Higham's backward-error table on ||M||_1).
/// The backward error is bounded by unit roundoff for the chosen degree.
ComplexMatrix mat_exp(const ComplexMatrix& m);
RealMatrix mat_exp(const RealMatrix& m);

/// V arctan(L) V^T, spectrum in (-pi/2, pi/2).
RealSymmetric sym_arctan(const RealSymmetric& s);

/// Principal argument of det(u), summed from eigenvalue arguments and wrapped
/// to (-pi, pi].
double det_phase(const ComplexMatrix& u, double unitarity_tol = kDefaultTolerances.det_phase_unitarity);

/// Arguments of the eigenvalues of a unitary matrix, each in (-pi, pi],
/// sorted ascending.
std::vector<double> unitary_eigenphases(const ComplexMatrix& u);

double max_abs(const RealMatrix& m);
double max_abs(const ComplexMatrix& m);
double unitarity_defect(const ComplexMatrix& u);  // ||u u^dag - I||_max
double symmetry_defect(const ComplexMatrix& u);   // ||u - u^T||_max
double symmetry_defect(const RealMatrix& m);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double angle);

bool all_finite(const RealMatrix& m);
bool all_finite(const ComplexMatrix& m);

/// Singular values, descending.
RealVector singular_values(const RealMatrix& m);

/// Number of singular values above rel_tol * sigma_max.
int numerical_rank(const RealMatrix& m, double rel_tol);

/// 2-norm condition number; +inf for a singular matrix.
double condition_number(const RealMatrix& m);

}  // namespace maslov
