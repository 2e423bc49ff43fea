#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "maslov/errors.hpp"
#include "maslov/models.hpp"
#include "maslov/system.hpp"
#include "maslov/unitary.hpp"

using namespace maslov;

namespace {

int svd_rank(const RealMatrix& m) {
  const RealVector sv = Eigen::JacobiSVD<RealMatrix>(m).singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-8 * sv(0)) ++r;
  return r;
}

RealMatrix block(const RealMatrix& tl, const RealMatrix& tr, const RealMatrix& bl, const RealMatrix& br) {
  RealMatrix m(tl.rows() + bl.rows(), tl.cols() + tr.cols());
  m << tl, tr, bl, br;
  return m;
}

CoefficientField constant_field(const SymplecticCoefficients& a) {
  CoefficientField field;
  field.n = a.n();
  field.evaluate = [a](double, double) { return a; };
  field.far_minus = [a](double) { return a; };
  field.far_plus = [a](double) { return a; };
  field.x_minus = -1.0;
  field.x_plus = 1.0;
  return field;
}

double invariant_residual(const RealMatrix& a, const RealMatrix& f) {
  return max_abs(RealMatrix(a * f - f * (f.transpose() * a * f)));
}

}  // namespace

TEST_CASE("validate_coefficients: canonical block accepted") {
  const RealMatrix z = RealMatrix::Zero(2, 2), eye = RealMatrix::Identity(2, 2);
  const auto a = validate_coefficients(z, eye, eye, z);
  CHECK(a.n() == 2);
  CHECK(symplectic_defect(mat_exp(RealMatrix(0.3 * a.full()))) < 1e-12);
}

TEST_CASE("validate_coefficients: asymmetric b rejected") {
  const RealMatrix z = RealMatrix::Zero(2, 2), eye = RealMatrix::Identity(2, 2);
  RealMatrix b = eye;
  b(0, 1) = 1e-3;
  try {
    validate_coefficients(z, b, eye, z);
    FAIL("expected structure error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::structure);
    CHECK(std::string(e.what()).find("not in sp(R^2n)") != std::string::npos);
  }
}

TEST_CASE("validate_coefficients: d must equal -a^T") {
  const RealMatrix z = RealMatrix::Zero(2, 2);
  RealMatrix a = RealMatrix::Identity(2, 2);
  CHECK_THROWS_AS(validate_coefficients(a, z, z, a), Error);
  CHECK_NOTHROW(validate_coefficients(a, z, z, RealMatrix(-a.transpose())));
}

TEST_CASE("validate_coefficients: tiny asymmetry is symmetrized exactly") {
  const RealMatrix z = RealMatrix::Zero(2, 2);
  RealMatrix b = RealMatrix::Identity(2, 2);
  b(0, 1) = 1e-12;
  const auto a = validate_coefficients(z, b, z, z);
  CHECK(a.b()(0, 1) == a.b()(1, 0));
}

TEST_CASE("validate_coefficients: full-matrix overload round-trips") {
  testgen::Rng rng(21);
  const auto a = testgen::random_coefficients(rng, 3);
  const auto b = validate_coefficients(a.full());
  CHECK(max_abs(RealMatrix(a.full() - b.full())) == 0.0);
  RealMatrix broken = a.full();
  broken(0, 0) += 1e-3;
  CHECK_THROWS_AS(validate_coefficients(broken), Error);
}

TEST_CASE("validate_coefficients: random sp(2n) elements generate symplectic flows") {
  testgen::Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testgen::random_coefficients(rng, 1 + trial % 4);
    CHECK(symplectic_defect(mat_exp(RealMatrix(0.5 * a.full()))) < 1e-10);
  }
}

TEST_CASE("KdV7 blocks at (0, 0) are accepted with the expected c-block entry") {
  const Kdv7Params params;
  const auto a = kdv7_coefficients(0.0, 0.0, params);
  CHECK(a.n() == 3);
  CHECK(kdv7_wave(0.0, params) == doctest::Approx(2.0 * params.amplitude));
  CHECK(a.c()(0, 0) == doctest::Approx(params.c_wave - 2.0 * params.amplitude).epsilon(1e-14));
}

TEST_CASE("LagrangianFrame invariants") {
  const RealMatrix eye = RealMatrix::Identity(2, 2), z = RealMatrix::Zero(2, 2);
  CHECK_NOTHROW(LagrangianFrame(eye, z));
  RealMatrix p(2, 2);
  p << 0.0, 1.0, -1.0, 0.0;
  CHECK_THROWS_AS(LagrangianFrame(eye, p), Error);
  CHECK_THROWS_AS(LagrangianFrame(z, z), Error);
}

TEST_CASE("normalize_reference: standard plane leaves frame and field unchanged") {
  testgen::Rng rng(23);
  const auto frame = testgen::random_frame(rng, 3);
  const auto a = testgen::random_coefficients(rng, 3);
  const auto out = normalize_reference(frame, ReferencePlane::standard(3), constant_field(a));
  CHECK(max_abs(RealMatrix(out.frame.q() - frame.q())) == 0.0);
  CHECK(max_abs(RealMatrix(out.frame.p() - frame.p())) == 0.0);
  CHECK(max_abs(RealMatrix(out.field.evaluate(0.0, 0.0).full() - a.full())) < 1e-15);
}

TEST_CASE("normalize_reference: q0 = I, p0 = I gives q' = q - p, p' = p") {
  testgen::Rng rng(24);
  const auto frame = testgen::random_frame(rng, 2);
  const RealMatrix eye = RealMatrix::Identity(2, 2);
  const auto out = normalize_reference(frame, ReferencePlane(eye, eye), constant_field(testgen::random_coefficients(rng, 2)));
  CHECK(max_abs(RealMatrix(out.frame.q() - (frame.q() - frame.p()))) < 1e-14);
  CHECK(max_abs(RealMatrix(out.frame.p() - frame.p())) < 1e-14);
}

TEST_CASE("normalize_reference: total frame rank, Lagrangian property and conjugated field") {
  testgen::Rng rng(25);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + trial % 4;
    const auto ref_frame = testgen::random_frame(rng, n);
    // (g, s g) has p0 = s g; swap roles so q0 is generic and p0 invertible.
    const ReferencePlane ref(ref_frame.p(), ref_frame.q());
    const auto frame = testgen::frame_with_rank_loss(rng, n, trial % (n + 1));
    const auto a = testgen::random_coefficients(rng, n);
    const auto out = normalize_reference(frame, ref, constant_field(a));

    const RealMatrix eye = RealMatrix::Identity(n, n), z = RealMatrix::Zero(n, n);
    const int before = svd_rank(block(frame.q(), ref.q0(), frame.p(), ref.p0()));
    const int after = svd_rank(block(out.frame.q(), z, out.frame.p(), eye));
    CHECK(before == after);

    const RealMatrix qp = out.frame.q().transpose() * out.frame.p();
    CHECK(max_abs(RealMatrix(qp - qp.transpose())) < 1e-9);

    // The transformed field generates the transformed flow.
    const RealMatrix& t = out.transform;
    CHECK(symplectic_defect(t) < 1e-9);
    const RealMatrix conj = t * a.full() * t.inverse();
    CHECK(max_abs(RealMatrix(out.field.evaluate(0.0, 0.0).full() - conj)) < 1e-9);
  }
}

TEST_CASE("normalize_reference: singular p0 rejected, rotation escape hatch works") {
  testgen::Rng rng(26);
  const RealMatrix eye = RealMatrix::Identity(2, 2), z = RealMatrix::Zero(2, 2);
  const ReferencePlane dirichlet(eye, z);
  const auto frame = testgen::random_frame(rng, 2);
  const auto field = constant_field(testgen::random_coefficients(rng, 2));
  try {
    normalize_reference(frame, dirichlet, field);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("reference not normalizable; pre-rotate") != std::string::npos);
  }
  const auto rotated_ref = rotate_by_j(dirichlet.frame());
  CHECK(max_abs(RealMatrix(rotated_ref.q())) == 0.0);
  const auto out = normalize_reference(rotate_by_j(frame), ReferencePlane(rotated_ref.q(), rotated_ref.p()), field);
  CHECK(out.frame.lagrangian_defect() < 1e-12);
}

TEST_CASE("total_frame_rank_loss") {
  const RealMatrix eye = RealMatrix::Identity(2, 2), z = RealMatrix::Zero(2, 2);
  CHECK(total_frame_rank_loss(LagrangianFrame(eye, z)) == 0);

  RealMatrix q = RealMatrix::Zero(2, 2), p = RealMatrix::Zero(2, 2);
  q(0, 0) = 1.0;
  p(1, 1) = 1.0;
  const LagrangianFrame one(q, p);
  CHECK(total_frame_rank_loss(one) == 1);
  CHECK(total_frame_matrix_rank_loss(one) == 1);

  testgen::Rng rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const auto frame = testgen::frame_with_rank_loss(rng, 4, 2);
    CHECK(total_frame_rank_loss(frame) == 2);
    CHECK(total_frame_matrix_rank_loss(frame) == 2);
    CHECK(4 - svd_rank(frame.q()) == 2);
  }
}

TEST_CASE("farfield_frame: n = 1 analytic case") {
  RealMatrix a(2, 2);
  a << 0.0, 1.0, 1.0, 0.0;
  const auto a_inf = validate_coefficients(a);
  const auto unstable = farfield_frame(a_inf, Side::unstable);
  CHECK(std::abs(unstable.q()(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(chart_from_frame(unstable).matrix()(0, 0) == doctest::Approx(1.0));
  const auto stable = farfield_frame(a_inf, Side::stable);
  CHECK(chart_from_frame(stable).matrix()(0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("farfield_frame: invariant subspaces of random hyperbolic fields") {
  testgen::Rng rng(28);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = testgen::random_coefficients(rng, 1 + trial % 4);
    if (!is_hyperbolic(a)) continue;
    for (const auto side : {Side::unstable, Side::stable}) {
      const auto f = farfield_frame(a, side).stacked();
      CHECK(max_abs(RealMatrix(f.transpose() * f - RealMatrix::Identity(f.cols(), f.cols()))) < 1e-12);
      CHECK(invariant_residual(a.full(), f) < 1e-9);
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("farfield_frame: KdV7") {
  for (const double lambda : {-0.3, -0.1, 0.0, 0.01}) {
    const auto a = kdv7_farfield(lambda);
    REQUIRE(is_hyperbolic(a));
    for (const auto side : {Side::unstable, Side::stable}) {
      const auto frame = farfield_frame(a, side);
      CHECK(invariant_residual(a.full(), frame.stacked()) < 1e-10);
      CHECK(frame.lagrangian_defect() < 1e-10);
    }
  }
  // lambda = 0.15 lies in the essential spectrum: a centre pair appears.
  const auto centre = kdv7_farfield(0.15);
  CHECK_FALSE(is_hyperbolic(centre));
  try {
    farfield_frame(centre, Side::unstable);
    FAIL("expected model error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::model);
    CHECK(std::string(e.what()).find("far-field not hyperbolic") != std::string::npos);
  }
  const auto completed = farfield_frame(centre, Side::unstable, kDefaultTolerances, CenterPolicy::complete);
  CHECK(completed.lagrangian_defect() < 1e-10);
  CHECK(total_frame_matrix_rank_loss(completed) <= 3);
}

TEST_CASE("chart_from_frame") {
  const RealMatrix eye = RealMatrix::Identity(2, 2), z = RealMatrix::Zero(2, 2);
  CHECK(max_abs(chart_from_frame(LagrangianFrame(eye, z)).matrix()) == 0.0);
  const RealMatrix h = RealMatrix::Constant(1, 1, 1.0 / std::sqrt(2.0));
  CHECK(chart_from_frame(LagrangianFrame(h, h)).matrix()(0, 0) == doctest::Approx(1.0));

  testgen::Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    const auto frame = testgen::random_frame(rng, n);
    const auto s = chart_from_frame(frame);
    const ComplexMatrix u = cayley(s).matrix();
    CHECK(unitarity_defect(u) < 1e-10);
    CHECK(max_abs(ComplexMatrix(u - u.transpose())) < 1e-10);

    const RealMatrix g = testgen::random_invertible(rng, n);
    const auto gauged = chart_from_frame(LagrangianFrame(RealMatrix(frame.q() * g), RealMatrix(frame.p() * g)));
    CHECK(max_abs(RealMatrix(gauged.matrix() - s.matrix())) < 1e-9);
  }
}

TEST_CASE("chart_from_frame: singular q rejected") {
  RealMatrix q = RealMatrix::Zero(2, 2), p = RealMatrix::Zero(2, 2);
  q(0, 0) = 1.0;
  p(1, 1) = 1.0;
  try {
    chart_from_frame(LagrangianFrame(q, p));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("plane outside top cell") != std::string::npos);
  }
}

TEST_CASE("frame_from_chart round trip and uniform_grid") {
  testgen::Rng rng(30);
  const SymmetricChart s(testgen::random_symmetric(rng, 3));
  CHECK(max_abs(RealMatrix(chart_from_frame(frame_from_chart(s)).matrix() - s.matrix())) < 1e-14);
  const auto grid = uniform_grid(-20.0, 20.0, 4000);
  CHECK(grid.size() == 4001);
  CHECK(grid.front() == -20.0);
  CHECK(grid.back() == 20.0);
  CHECK(grid[2000] == doctest::Approx(0.0));
}

TEST_CASE("farfield_deviation of bundled models is within their declared tolerance") {
  const auto kdv = kdv7_field();
  CHECK(farfield_deviation(kdv, 0.0) <= kdv.farfield_tol);
  const auto pt = poschl_teller_field(2);
  CHECK(farfield_deviation(pt, -2.0) <= pt.farfield_tol);
}
