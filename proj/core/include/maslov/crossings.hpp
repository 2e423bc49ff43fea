#pragma once

// Crossings of a path of Lagrangian planes with the reference plane, the
// Maslov index assembled from them, and the spectral-parameter sweep.
//
// Sign convention: an eigenphase of u increasing through pi (eigenvalue of
// u passing -1 counter-clockwise) is a +1 crossing.

#include <string>
#include <vector>

#include "maslov/riccati.hpp"
#include "maslov/unitary.hpp"

namespace maslov {

inline constexpr const char* kSignConvention =
    "eigenphase of Cay(s) increasing through pi counts +1";

struct CrossingRecord {
  double x = 0.0;
  int multiplicity = 1;
  int direction = 0;  // -1, +1, or 0 when the phase tracking was ambiguous
};

struct CrossingReport {
  std::vector<CrossingRecord> crossings;
  std::vector<std::string> warnings;
};

/// Tracks eigenphases (radians, any order per sample) from sample to sample
/// by nearest-phase matching and records every passage through pi.
/// Samples [first, last] of grid/phases are used; last = npos means the end.
CrossingReport detect_phase_crossings(const std::vector<double>& grid,
                                      const std::vector<std::vector<double>>& phases,
                                      const Tolerances& tol = kDefaultTolerances, std::size_t first = 0,
                                      std::size_t last = static_cast<std::size_t>(-1));

/// Crossings of a unitary path: eigenphases of u_m through pi. Throws
/// ErrorKind::numerical when consecutive samples differ by step_adequacy or more.
CrossingReport detect_crossings(const UnitaryPath& path, const Tolerances& tol = kDefaultTolerances);

/// Crossings of a chart path: eigenvalues of s passing through infinity,
/// read as the phases -2 arctan(mu_i) of Cay(s) passing pi.
CrossingReport detect_chart_crossings(const ChartPath& path, const Tolerances& tol = kDefaultTolerances);

/// Eigenphases for every sample of a path.
std::vector<std::vector<double>> path_phases(const UnitaryPath& path);
std::vector<std::vector<double>> path_phases(const ChartPath& path);

struct MaslovResult {
  std::vector<CrossingRecord> crossings;
  int unsigned_count = 0;
  int signed_index = 0;
  bool sign_incomplete = false;  // some crossing had direction 0
  ThetaTrace theta_trace;
};

MaslovResult maslov_index(const std::vector<CrossingRecord>& crossings);

/// dim(L1 ∩ L2) detector: smallest singular value of u1 - u2.
double intersection_gap(const UnitarySymmetric& u1, const UnitarySymmetric& u2);

enum class Backend { chart, unitary, both };

struct SweepOptions {
  Backend backend = Backend::both;
  Tolerances tol = kDefaultTolerances;
  UnitaryOptions unitary;
  unsigned workers = 1;
};

enum class RowStatus { ok, skipped, failed };

struct SweepRow {
  double lambda = 0.0;
  RowStatus status = RowStatus::ok;
  std::string note;
  int crossing_count = -1;   // unitary count when available, chart count otherwise
  int chart_count = -1;
  int unitary_count = -1;
  int signed_index = 0;
  double theta_end = 0.0;    // theta(x_plus); unitary route, or chart route for backend = chart
  double end_gap = 0.0;      // intersection_gap with the stable plane of A(+inf)
  bool end_flag = false;     // end_gap < tol.end_gap
  bool disagreement = false; // backend = both and the counts differ
};

struct EigenvalueBracket {
  double lo = 0.0;
  double hi = 0.0;
  int multiplicity = 1;  // increment of the crossing count across the bracket
};

struct SweepTable {
  std::vector<double> lambdas;
  std::vector<SweepRow> rows;
  std::vector<EigenvalueBracket> detected_eigenvalues;
  bool any_disagreement = false;
  bool monotone = true;  // crossing count non-decreasing over consecutive ok rows
};

/// Crossing counts and end angle for one spectral parameter value.
SweepRow evaluate_lambda(const CoefficientField& field, double lambda, const std::vector<double>& x_grid,
                         const SweepOptions& options = {});

/// Rows are computed on options.workers threads and assembled in lambda
/// order; the table does not depend on scheduling.
SweepTable sweep_lambda(const CoefficientField& field, const std::vector<double>& lambdas,
                        const std::vector<double>& x_grid, const SweepOptions& options = {});

/// Brackets from consecutive ok rows where the crossing count increments.
std::vector<EigenvalueBracket> brackets_from_rows(const std::vector<SweepRow>& rows, bool* monotone = nullptr);

struct RefineResult {
  double lambda = 0.0;  // midpoint of the final bracket
  double lo = 0.0;
  double hi = 0.0;
  int count_lo = 0;
  int count_hi = 0;
  int iterations = 0;
  int disagreements = 0;  // evaluations where the two routes counted differently
};

/// Bisection on the crossing-count jump between lo and hi. Throws
/// ErrorKind::invalid_argument when the counts at the ends agree.
/// Within O(h) of an eigenvalue the chart and unitary routes may place the
/// jump at slightly different lambda; such evaluations are counted in
/// disagreements and the bisection follows crossing_count.
RefineResult refine_eigenvalue(const CoefficientField& field, double lo, double hi,
                               const std::vector<double>& x_grid, double tol_lambda,
                               const SweepOptions& options = {});

}  // namespace maslov
