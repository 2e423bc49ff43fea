#include "maslov/models.hpp"

#include <cmath>

#include "maslov/errors.hpp"

namespace maslov {

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

RealMatrix kdv7_full(double potential_term, const Kdv7Params& params) {
  RealMatrix a = RealMatrix::Zero(6, 6);
  a(0, 4) = -1.0;
  a(1, 3) = -1.0;
  a(1, 4) = -1.0;
  a(2, 5) = 1.0 / params.sigma7;
  a(3, 0) = potential_term;
  a(4, 2) = -1.0;
  a(5, 1) = -1.0;
  a(5, 2) = 1.0;
  return a;
}

}  // namespace

double kdv7_wave(double x, const Kdv7Params& params) {
  const double s = sech(params.width * x);
  const double s2 = s * s;
  return params.amplitude * (s2 * s2 * s2 + s2 * s2);
}

SymplecticCoefficients kdv7_coefficients(double x, double lambda, const Kdv7Params& params) {
  return validate_coefficients(kdv7_full(-lambda + params.c_wave - kdv7_wave(x, params), params));
}

SymplecticCoefficients kdv7_farfield(double lambda, const Kdv7Params& params) {
  return validate_coefficients(kdv7_full(-lambda + params.c_wave, params));
}

CoefficientField kdv7_field(double x_minus, double x_plus, const Kdv7Params& params) {
  CoefficientField field;
  field.n = 3;
  field.x_minus = x_minus;
  field.x_plus = x_plus;
  field.evaluate = [params](double x, double lambda) { return kdv7_coefficients(x, lambda, params); };
  field.far_minus = [params](double lambda) { return kdv7_farfield(lambda, params); };
  field.far_plus = field.far_minus;
  // U*(+-20) is about 6.6e-4 with the default constants.
  field.farfield_tol = 2.0 * std::max(kdv7_wave(x_minus, params), kdv7_wave(x_plus, params)) + 1e-12;
  return field;
}

SturmLiouvilleParams poschl_teller_params(int m) {
  if (m < 1 || m > 3) throw Error(ErrorKind::invalid_argument, "poschl_teller: m must be 1, 2 or 3");
  SturmLiouvilleParams params;
  const double strength = static_cast<double>(m * (m + 1));
  params.potential = [strength](double x) {
    const double s = sech(x);
    return -strength * s * s;
  };
  params.lambda_min = -static_cast<double>(m * m) - 1.0;
  params.lambda_max = 0.0;
  for (int j = m; j >= 1; --j) params.eigenvalues.push_back(-static_cast<double>(j * j));
  return params;
}

CoefficientField sturm_liouville_field(const SturmLiouvilleParams& params, double x_minus, double x_plus) {
  const RealMatrix zero = RealMatrix::Zero(1, 1);
  const RealMatrix one = RealMatrix::Ones(1, 1);
  CoefficientField field;
  field.n = 1;
  field.x_minus = x_minus;
  field.x_plus = x_plus;
  auto potential = params.potential;
  field.evaluate = [potential, zero, one](double x, double lambda) {
    return validate_coefficients(zero, one, RealMatrix::Constant(1, 1, potential(x) - lambda), zero);
  };
  field.far_minus = [zero, one](double lambda) {
    return validate_coefficients(zero, one, RealMatrix::Constant(1, 1, -lambda), zero);
  };
  field.far_plus = field.far_minus;
  field.farfield_tol = 2.0 * std::max(std::abs(potential(x_minus)), std::abs(potential(x_plus))) + 1e-12;
  return field;
}

CoefficientField poschl_teller_field(int m, double x_minus, double x_plus) {
  return sturm_liouville_field(poschl_teller_params(m), x_minus, x_plus);
}

Model make_model(const std::string& name, double x_minus, double x_plus) {
  if (!(x_minus < x_plus)) throw Error(ErrorKind::invalid_argument, "make_model: need x_minus < x_plus");
  if (name == "kdv7") return {name, kdv7_field(x_minus, x_plus), {}};
  const std::string prefix = "poschl_teller:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string tail = name.substr(prefix.size());
    if (tail.size() == 1 && tail[0] >= '1' && tail[0] <= '3') {
      const int m = tail[0] - '0';
      return {name, poschl_teller_field(m, x_minus, x_plus), poschl_teller_params(m).eigenvalues};
    }
  }
  throw Error(ErrorKind::invalid_argument,
              "unknown model '" + name + "' (expected kdv7 or poschl_teller:1|2|3)");
}

std::vector<std::string> model_names() { return {"kdv7", "poschl_teller:1", "poschl_teller:2", "poschl_teller:3"}; }

}  // namespace maslov
