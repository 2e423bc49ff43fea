#pragma once

// Bundled coefficient fields.
//
// kdv7: linearisation about the solitary wave of the seventh-order KdV
// equation U_t - c U_x + U U_x + U_xxx - U_xxxxx + sigma7 U_xxxxxxx = 0, in the
// variables (q, p) = (U, U'' - sigma7 U'''', U'', U' - U''' + sigma7 U^(5), -U', sigma7 U''').
// The coefficient named sigma7 here is unrelated to the Lie-algebra variable
// sigma of the unitary stepper.
//
// poschl_teller:m: -psi'' + V psi = lambda psi with V = -m(m+1) sech^2 x,
// eigenvalues -j^2 for j = 1..m.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "maslov/system.hpp"

namespace maslov {

struct Kdv7Params {
  double c_wave = 71000.0 / (2159.0 * 2159.0);
  double sigma7 = 0.2159;
  double amplitude = 1039500.0 / (2159.0 * 2159.0);
  double width = std::sqrt(25.0 / 2159.0);
};

/// U*(x) = a (sech^6 kx + sech^4 kx).
double kdv7_wave(double x, const Kdv7Params& params = {});

/// The 6 x 6 coefficient matrix at (x, lambda), n = 3.
SymplecticCoefficients kdv7_coefficients(double x, double lambda, const Kdv7Params& params = {});

/// Far-field coefficients (U* = 0).
SymplecticCoefficients kdv7_farfield(double lambda, const Kdv7Params& params = {});

CoefficientField kdv7_field(double x_minus = -20.0, double x_plus = 20.0, const Kdv7Params& params = {});

struct SturmLiouvilleParams {
  std::function<double(double)> potential;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::vector<double> eigenvalues;  // closed form when known, ascending
};

SturmLiouvilleParams poschl_teller_params(int m);

/// a = 0, b = 1, c = V(x) - lambda, d = 0.
CoefficientField sturm_liouville_field(const SturmLiouvilleParams& params, double x_minus, double x_plus);

/// m in {1, 2, 3}.
CoefficientField poschl_teller_field(int m, double x_minus = -20.0, double x_plus = 20.0);

struct Model {
  std::string name;
  CoefficientField field;
  std::vector<double> known_eigenvalues;  // empty when no closed form exists
};

/// "kdv7" or "poschl_teller:m". Throws ErrorKind::invalid_argument for an
/// unknown name.
Model make_model(const std::string& name, double x_minus = -20.0, double x_plus = 20.0);

std::vector<std::string> model_names();

}  // namespace maslov
