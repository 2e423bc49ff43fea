#include "maslov/system.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "maslov/errors.hpp"

namespace maslov {

SymmetricChart::SymmetricChart(RealSymmetric s) : s_(std::move(s)) {
  if (!all_finite(s_.matrix())) {
    throw Error(ErrorKind::invalid_argument, "SymmetricChart: non-finite entries");
  }
}

RealMatrix SymplecticCoefficients::full() const {
  const auto n = this->n();
  RealMatrix m(2 * n, 2 * n);
  m << a_, b_, c_, d_;
  return m;
}

SymplecticCoefficients validate_coefficients(const RealMatrix& a, const RealMatrix& b,
                                             const RealMatrix& c, const RealMatrix& d, double tol) {
  const auto n = a.rows();
  for (const RealMatrix* block : {&a, &b, &c, &d}) {
    if (block->rows() != n || block->cols() != n) {
      throw Error(ErrorKind::invalid_argument, "validate_coefficients: blocks must all be n x n");
    }
    if (!all_finite(*block)) {
      throw Error(ErrorKind::invalid_argument, "validate_coefficients: non-finite entries");
    }
  }
  const double b_defect = symmetry_defect(b);
  const double c_defect = symmetry_defect(c);
  const double ad_defect = max_abs(RealMatrix(a + d.transpose()));
  if (b_defect > tol || c_defect > tol || ad_defect > tol) {
    throw Error(ErrorKind::structure,
                "not in sp(R^2n): |b - b^T| = " + std::to_string(b_defect) +
                    ", |c - c^T| = " + std::to_string(c_defect) +
                    ", |a + d^T| = " + std::to_string(ad_defect));
  }
  SymplecticCoefficients out;
  out.a_ = a;
  out.b_ = 0.5 * (b + b.transpose());
  out.c_ = 0.5 * (c + c.transpose());
  out.d_ = -a.transpose();
  return out;
}

SymplecticCoefficients validate_coefficients(const RealMatrix& full, double tol) {
  if (full.rows() != full.cols() || full.rows() % 2 != 0) {
    throw Error(ErrorKind::invalid_argument, "validate_coefficients: expected a 2n x 2n matrix");
  }
  const auto n = full.rows() / 2;
  return validate_coefficients(full.topLeftCorner(n, n), full.topRightCorner(n, n),
                               full.bottomLeftCorner(n, n), full.bottomRightCorner(n, n), tol);
}

double farfield_deviation(const CoefficientField& field, double lambda) {
  const double left =
      max_abs(RealMatrix(field.evaluate(field.x_minus, lambda).full() - field.far_minus(lambda).full()));
  const double right =
      max_abs(RealMatrix(field.evaluate(field.x_plus, lambda).full() - field.far_plus(lambda).full()));
  return std::max(left, right);
}

LagrangianFrame::LagrangianFrame(RealMatrix q, RealMatrix p, const Tolerances& tol)
    : q_(std::move(q)), p_(std::move(p)) {
  if (q_.rows() != q_.cols() || p_.rows() != q_.rows() || p_.cols() != q_.cols()) {
    throw Error(ErrorKind::invalid_argument, "LagrangianFrame: q and p must both be n x n");
  }
  if (!all_finite(q_) || !all_finite(p_)) {
    throw Error(ErrorKind::invalid_argument, "LagrangianFrame: non-finite entries");
  }
  const RealVector sv = singular_values(stacked());
  if (sv(0) == 0.0 || sv(sv.size() - 1) <= tol.frame_rank * sv(0)) {
    throw Error(ErrorKind::structure, "LagrangianFrame: stacked (q, p) is rank deficient");
  }
  if (lagrangian_defect() > tol.lagrangian * std::max(1.0, sv(0) * sv(0))) {
    throw Error(ErrorKind::structure, "LagrangianFrame: q^T p is not symmetric (plane is not Lagrangian)");
  }
}

LagrangianFrame LagrangianFrame::unchecked(RealMatrix q, RealMatrix p) {
  LagrangianFrame f;
  f.q_ = std::move(q);
  f.p_ = std::move(p);
  return f;
}

RealMatrix LagrangianFrame::stacked() const {
  RealMatrix m(2 * n(), n());
  m << q_, p_;
  return m;
}

double LagrangianFrame::lagrangian_defect() const {
  return max_abs(RealMatrix(q_.transpose() * p_ - p_.transpose() * q_));
}

ReferencePlane::ReferencePlane(RealMatrix q0, RealMatrix p0, const Tolerances& tol)
    : frame_(std::move(q0), std::move(p0), tol) {}

ReferencePlane ReferencePlane::standard(Eigen::Index n) {
  return ReferencePlane(LagrangianFrame::unchecked(RealMatrix::Zero(n, n), RealMatrix::Identity(n, n)));
}

namespace {

RealMatrix conjugate(const RealMatrix& t, const RealMatrix& t_inv, const RealMatrix& a) {
  return t * a * t_inv;
}

}  // namespace

NormalizedProblem normalize_reference(const LagrangianFrame& frame, const ReferencePlane& ref,
                                      const CoefficientField& field, const Tolerances& tol) {
  const auto n = frame.n();
  if (ref.q0().rows() != n) {
    throw Error(ErrorKind::invalid_argument, "normalize_reference: frame and reference sizes differ");
  }
  if (condition_number(ref.p0()) >= tol.reference_condition) {
    throw Error(ErrorKind::numerical, "reference not normalizable; pre-rotate");
  }
  // m = q0 p0^{-1} is symmetric for a Lagrangian reference.
  const RealMatrix m_raw = ref.p0().transpose().partialPivLu().solve(ref.q0().transpose()).transpose();
  const RealMatrix m = 0.5 * (m_raw + m_raw.transpose());

  RealMatrix t = RealMatrix::Identity(2 * n, 2 * n);
  t.topRightCorner(n, n) = -m;
  RealMatrix t_inv = RealMatrix::Identity(2 * n, 2 * n);
  t_inv.topRightCorner(n, n) = m;

  NormalizedProblem out;
  out.frame = LagrangianFrame::unchecked(frame.q() - m * frame.p(), frame.p());
  out.transform = t;
  out.field = field;
  const double structure_tol = tol.coefficient_structure * std::max(1.0, max_abs(m) * max_abs(m));
  auto evaluate = field.evaluate;
  out.field.evaluate = [evaluate, t, t_inv, structure_tol](double x, double lambda) {
    return validate_coefficients(conjugate(t, t_inv, evaluate(x, lambda).full()), structure_tol);
  };
  auto far_minus = field.far_minus;
  out.field.far_minus = [far_minus, t, t_inv, structure_tol](double lambda) {
    return validate_coefficients(conjugate(t, t_inv, far_minus(lambda).full()), structure_tol);
  };
  auto far_plus = field.far_plus;
  out.field.far_plus = [far_plus, t, t_inv, structure_tol](double lambda) {
    return validate_coefficients(conjugate(t, t_inv, far_plus(lambda).full()), structure_tol);
  };
  return out;
}

LagrangianFrame rotate_by_j(const LagrangianFrame& frame) {
  return LagrangianFrame::unchecked(-frame.p(), frame.q());
}

int total_frame_rank_loss(const LagrangianFrame& frame, double rel_tol) {
  return static_cast<int>(frame.n()) - numerical_rank(frame.q(), rel_tol);
}

int total_frame_matrix_rank_loss(const LagrangianFrame& frame, double rel_tol) {
  const auto n = frame.n();
  RealMatrix total = RealMatrix::Zero(2 * n, 2 * n);
  total.topLeftCorner(n, n) = frame.q();
  total.bottomLeftCorner(n, n) = frame.p();
  total.bottomRightCorner(n, n) = RealMatrix::Identity(n, n);
  return static_cast<int>(2 * n) - numerical_rank(total, rel_tol);
}

namespace {

struct EigenPair {
  Complex value;
  ComplexVector vector;
};

std::vector<EigenPair> ordered_eigenpairs(const RealMatrix& m) {
  Eigen::EigenSolver<RealMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "farfield_frame: eigen-decomposition did not converge");
  }
  std::vector<EigenPair> pairs;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    pairs.push_back({solver.eigenvalues()(i), solver.eigenvectors().col(i)});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& l, const EigenPair& r) {
    if (l.value.real() != r.value.real()) return l.value.real() > r.value.real();
    return l.value.imag() < r.value.imag();
  });
  return pairs;
}

// Eigenvalues closer than this to the real axis are treated as real.
constexpr double kRealAxis = 1e-12;

}  // namespace

bool is_hyperbolic(const SymplecticCoefficients& a_inf, const Tolerances& tol) {
  Eigen::EigenSolver<RealMatrix> solver(a_inf.full(), /*computeEigenvectors=*/false);
  const auto& values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i).real()) < tol.hyperbolicity) return false;
  }
  return true;
}

LagrangianFrame farfield_frame(const SymplecticCoefficients& a_inf, Side side, const Tolerances& tol,
                               CenterPolicy policy) {
  const auto n = a_inf.n();
  const double sign = side == Side::unstable ? 1.0 : -1.0;
  const auto pairs = ordered_eigenpairs(a_inf.full());

  std::vector<RealVector> columns;
  std::vector<RealVector> centre;
  bool has_centre = false;
  for (const auto& pair : pairs) {
    const double re = pair.value.real();
    const double im = pair.value.imag();
    const double scale = std::max(1.0, std::abs(pair.value));
    if (std::abs(re) < tol.hyperbolicity) {
      has_centre = true;
      if (policy == CenterPolicy::reject) break;
      if (std::abs(im) <= kRealAxis * scale) {
        throw Error(ErrorKind::model, "far-field has a zero eigenvalue; centre completion impossible");
      }
      if (im < 0.0) centre.push_back(pair.vector.real());
      continue;
    }
    if (sign * re <= 0.0) continue;
    if (std::abs(im) <= kRealAxis * scale) {
      columns.push_back(pair.vector.real());
    } else if (im < 0.0) {
      columns.push_back(pair.vector.real());
      columns.push_back(pair.vector.imag());
    }
  }
  if (has_centre && policy == CenterPolicy::reject) {
    throw Error(ErrorKind::model, "far-field not hyperbolic (lambda may be in essential spectrum)");
  }
  columns.insert(columns.end(), centre.begin(), centre.end());
  if (static_cast<Eigen::Index>(columns.size()) != n) {
    throw Error(ErrorKind::structure, "farfield_frame: invariant subspace has dimension " +
                                          std::to_string(columns.size()) + ", expected " +
                                          std::to_string(n));
  }
  RealMatrix basis(2 * n, n);
  for (Eigen::Index j = 0; j < n; ++j) basis.col(j) = columns[static_cast<std::size_t>(j)];
  Eigen::HouseholderQR<RealMatrix> qr(basis);
  const RealMatrix q_factor = qr.householderQ() * RealMatrix::Identity(2 * n, n);
  return LagrangianFrame(q_factor.topRows(n), q_factor.bottomRows(n), tol);
}

SymmetricChart chart_from_frame(const LagrangianFrame& frame, const Tolerances& tol) {
  if (condition_number(frame.q()) >= tol.chart_condition) {
    throw Error(ErrorKind::numerical, "plane outside top cell (q is singular); chart undefined");
  }
  // s q = p  <=>  q^T s^T = p^T
  const RealMatrix s = frame.q().transpose().partialPivLu().solve(frame.p().transpose()).transpose();
  if (symmetry_defect(s) > tol.chart_symmetry * std::max(1.0, max_abs(s))) {
    throw Error(ErrorKind::structure, "chart_from_frame: p q^{-1} is not symmetric (frame not Lagrangian)");
  }
  return SymmetricChart(s);
}

LagrangianFrame frame_from_chart(const SymmetricChart& s) {
  return LagrangianFrame::unchecked(RealMatrix::Identity(s.size(), s.size()), s.matrix());
}

std::vector<double> uniform_grid(double x0, double x1, std::size_t steps) {
  if (steps == 0) throw Error(ErrorKind::invalid_argument, "uniform_grid: need at least one step");
  std::vector<double> grid(steps + 1);
  const double h = (x1 - x0) / static_cast<double>(steps);
  for (std::size_t m = 0; m <= steps; ++m) grid[m] = x0 + h * static_cast<double>(m);
  grid.back() = x1;
  return grid;
}

RealMatrix symplectic_j(Eigen::Index n) {
  RealMatrix j = RealMatrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -RealMatrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = RealMatrix::Identity(n, n);
  return j;
}

double symplectic_defect(const RealMatrix& phi) {
  const RealMatrix j = symplectic_j(phi.rows() / 2);
  return max_abs(RealMatrix(phi.transpose() * j * phi - j));
}

}  // namespace maslov
