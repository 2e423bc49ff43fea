#pragma once

#include <numbers>

namespace maslov {

/// Every numerical threshold used by the library, in one place. The CLI and
/// the test suites construct the same record, so a tolerance changed here is
/// changed everywhere.
struct Tolerances {
  // matrixkit
  double eig_orthogonality = 1e-12;      // ||V^T V - I||_max
  double eig_reconstruction = 1e-10;     // ||M - V L V^T||_max relative to ||M||_max
  double det_phase_unitarity = 1e-8;     // precondition of det_phase

  // system
  double coefficient_structure = 1e-10;  // b = b^T, c = c^T, a = -d^T
  double lagrangian = 1e-10;             // q^T p = p^T q
  double frame_rank = 1e-10;             // stacked (q, p) smallest/largest singular value
  double rank_threshold = 1e-8;          // rank cut-off relative to sigma_max
  double hyperbolicity = 1e-8;           // |Re nu| below this is "on the imaginary axis"
  double reference_condition = 1e12;     // max cond(p0) for normalize_reference
  double chart_condition = 1e12;         // max cond(q) for chart_from_frame
  double chart_symmetry = 1e-8;          // defect of p q^{-1} before symmetrization

  // riccati
  double chart_tol = 1e-3;               // radians from -1 on the Cayley circle
  double mobius_singular_condition = 1e14;
  double symplectic = 1e-8;              // Phi^T J Phi = J

  // unitary
  double unitary_invariant = 1e-10;      // u u^dag = I and u = u^T
  double minus_one_gap = 1e-8;           // inverse_cayley precondition
  double skew_hermitian = 1e-12;
  double reproject_threshold = 1e-12;    // polar re-projection trigger

  // crossings
  double phase_match_max = std::numbers::pi / 4;  // nearest-phase matching rejection
  double phase_resolution = 1e-9;        // two eigenphases closer than this are ambiguous
  double step_adequacy = 0.5;            // ||u_{m+1} - u_m||_max between samples
  double end_gap = 1e-2;                 // far-field intersection flag at x_plus
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace maslov
