#pragma once

// Symplectic coefficient fields A(x, lambda), Lagrangian frames and the
// operations that connect them to the chart.

#include <functional>
#include <string>
#include <vector>

#include "maslov/chart.hpp"
#include "maslov/matrixkit.hpp"
#include "maslov/tolerances.hpp"

namespace maslov {

/// A = [[a, b], [c, d]] in sp(2n): b and c symmetric, a = -d^T.
class SymplecticCoefficients {
 public:
  SymplecticCoefficients() = default;

  Eigen::Index n() const noexcept { return a_.rows(); }
  const RealMatrix& a() const noexcept { return a_; }
  const RealMatrix& b() const noexcept { return b_; }
  const RealMatrix& c() const noexcept { return c_; }
  const RealMatrix& d() const noexcept { return d_; }

  /// The assembled 2n x 2n matrix.
  RealMatrix full() const;

 private:
  friend SymplecticCoefficients validate_coefficients(const RealMatrix&, const RealMatrix&,
                                                      const RealMatrix&, const RealMatrix&, double);
  RealMatrix a_, b_, c_, d_;
};

/// Symmetrizes b and c and replaces d by -a^T. Throws ErrorKind::structure
/// ("not in sp(R^2n)") when any of those corrections exceeds tol.
SymplecticCoefficients validate_coefficients(const RealMatrix& a, const RealMatrix& b,
                                             const RealMatrix& c, const RealMatrix& d,
                                             double tol = kDefaultTolerances.coefficient_structure);

SymplecticCoefficients validate_coefficients(const RealMatrix& full,
                                             double tol = kDefaultTolerances.coefficient_structure);

/// A coefficient field x -> A(x, lambda) on a truncated line, constant in the
/// far field. evaluate must be a pure function of (x, lambda).
struct CoefficientField {
  Eigen::Index n = 0;
  std::function<SymplecticCoefficients(double x, double lambda)> evaluate;
  double x_minus = 0.0;
  double x_plus = 0.0;
  std::function<SymplecticCoefficients(double lambda)> far_minus;
  std::function<SymplecticCoefficients(double lambda)> far_plus;
  /// How far evaluate(x_minus/x_plus) may sit from the far-field limits.
  double farfield_tol = 1e-8;
};

/// max(||A(x_minus) - A_minus||, ||A(x_plus) - A_plus||) entrywise.
double farfield_deviation(const CoefficientField& field, double lambda);

/// A frame (q, p)^T spanning a Lagrangian plane.
class LagrangianFrame {
 public:
  LagrangianFrame() = default;
  /// Checks q^T p = p^T q and full stacked rank; throws ErrorKind::structure.
  LagrangianFrame(RealMatrix q, RealMatrix p, const Tolerances& tol = kDefaultTolerances);

  /// No invariant checks. For frames produced by operations that preserve them.
  static LagrangianFrame unchecked(RealMatrix q, RealMatrix p);

  const RealMatrix& q() const noexcept { return q_; }
  const RealMatrix& p() const noexcept { return p_; }
  Eigen::Index n() const noexcept { return q_.rows(); }
  RealMatrix stacked() const;

  double lagrangian_defect() const;

 private:
  RealMatrix q_, p_;
};

/// The fixed plane intersections are counted against, spanned by (q0, p0)^T.
class ReferencePlane {
 public:
  ReferencePlane(RealMatrix q0, RealMatrix p0, const Tolerances& tol = kDefaultTolerances);

  /// q0 = 0, p0 = I.
  static ReferencePlane standard(Eigen::Index n);

  const RealMatrix& q0() const noexcept { return frame_.q(); }
  const RealMatrix& p0() const noexcept { return frame_.p(); }
  const LagrangianFrame& frame() const noexcept { return frame_; }

 private:
  explicit ReferencePlane(LagrangianFrame f) : frame_(std::move(f)) {}
  LagrangianFrame frame_;
};

struct NormalizedProblem {
  LagrangianFrame frame;
  CoefficientField field;
  RealMatrix transform;  // T with (q', p') = T (q, p)
};

/// Carries ref to the standard reference plane with the symplectic shear
/// T = [[I, -q0 p0^{-1}], [0, I]]: q' = q - q0 p0^{-1} p, p' = p, and the
/// field becomes T A T^{-1}. The reference block is brought to (0, I) by the
/// column scaling p0^{-1}, which does not touch the frame.
///
/// A singular p0 is rejected; pre-apply J = [[0, -I], [I, 0]] to both frame
/// and reference (see rotate_by_j) and normalize the rotated pair instead.
NormalizedProblem normalize_reference(const LagrangianFrame& frame, const ReferencePlane& ref,
                                      const CoefficientField& field,
                                      const Tolerances& tol = kDefaultTolerances);

/// (q, p) -> (-p, q).
LagrangianFrame rotate_by_j(const LagrangianFrame& frame);

/// n - rank(q).
int total_frame_rank_loss(const LagrangianFrame& frame, double rel_tol = kDefaultTolerances.rank_threshold);

/// 2n - rank([[q, 0], [p, I]]), computed from the full total frame matrix.
int total_frame_matrix_rank_loss(const LagrangianFrame& frame,
                                 double rel_tol = kDefaultTolerances.rank_threshold);

enum class Side { unstable, stable };

enum class CenterPolicy {
  reject,    // a far field with eigenvalues on the imaginary axis is an error
  complete,  // fill missing dimensions with Re(v) of each centre eigenvector
};

/// Orthonormal frame of the n-dimensional invariant subspace of A_inf with
/// Re > 0 (unstable) or Re < 0 (stable). Complex pairs x +- iy contribute
/// columns (x, y). Eigenvalues are ordered by Re descending, then Im
/// ascending.
///
/// With CenterPolicy::complete a non-hyperbolic A_inf yields the strictly
/// unstable (stable) eigenvectors plus Re(v) for one member of each centre
/// pair; the result is Lagrangian but only the hyperbolic part is invariant.
LagrangianFrame farfield_frame(const SymplecticCoefficients& a_inf, Side side,
                               const Tolerances& tol = kDefaultTolerances,
                               CenterPolicy policy = CenterPolicy::reject);

/// True when no eigenvalue of A_inf has |Re| < tol.hyperbolicity.
bool is_hyperbolic(const SymplecticCoefficients& a_inf, const Tolerances& tol = kDefaultTolerances);

/// s = p q^{-1}, symmetrized. Throws "plane outside top cell" for singular q.
SymmetricChart chart_from_frame(const LagrangianFrame& frame, const Tolerances& tol = kDefaultTolerances);

/// The frame (I, s)^T of a chart point.
LagrangianFrame frame_from_chart(const SymmetricChart& s);

/// n + 1 equally spaced points from x0 to x1.
std::vector<double> uniform_grid(double x0, double x1, std::size_t steps);

/// J = [[0, -I], [I, 0]] of size 2n.
RealMatrix symplectic_j(Eigen::Index n);

/// ||Phi^T J Phi - J||_max.
double symplectic_defect(const RealMatrix& phi);

}  // namespace maslov
