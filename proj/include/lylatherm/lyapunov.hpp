#pragma once

#include <stdexcept>
#include <utility>

#include "lylatherm/numerics.hpp"
#include "lylatherm/thermo.hpp"

namespace lylatherm {

// V_L = ||e||^2 / 2 + ||theta_tilde||^2 / (2 gamma).
double lyapunov_value(const Vector& e, const Vector& theta_tilde, double gamma);

double rayleigh_lower(double gamma);  // alpha_1 = min(1, 1/gamma) / 2
double rayleigh_upper(double gamma);  // alpha_2 = max(1, 1/gamma) / 2

/// rho(s) = rho_1(s) s with rho_1(s) = a2 (s + x_d_bar)^2 + a1 (s + x_d_bar) + a0.
/// Strictly increasing on s >= 0 for nonnegative, not-all-zero coefficients.
struct RemainderPolynomial {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double desired_bound = 0.0;

  double rho1(double s) const;
  double rho(double s) const { return rho1(s) * s; }
  // Solves rho(s) = value for s >= 0 by bracketing and bisection.
  double inverse(double value) const;
};

struct LyapunovConstants {
  double gamma = 1.0;
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  RemainderPolynomial rho;
  double lambda = 0.0;

  double alpha1() const { return rayleigh_lower(gamma); }
  double alpha2() const { return rayleigh_upper(gamma); }
  // Radius of the domain D: rho^{-1}(b0 - b2).
  double domain_radius() const;
  // [alpha2 b1 / b2, alpha1 domain_radius^2]; first > second when empty.
  std::pair<double, double> lambda_interval() const;
};

class InfeasibleConstantsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// theta = V0 / (alpha1 R^2) + (V0 / lambda) exp(-b1 t) + alpha2 b1 / (lambda b2),
// R = rho^{-1}(b0 - b2). Throws InfeasibleConstantsError when the lambda
// interval is empty or lambda lies outside it.
double escape_risk(const LyapunovConstants& c, double v0, double t);

struct GainConditionResult {
  bool satisfied = false;
  double lhs = 0.0;     // b0
  double rhs = 0.0;     // rho(sqrt(a2/a1 ||z||^2 + a2/a1 b1/b2)) + b2
  double margin = 0.0;  // lhs - rhs
};

GainConditionResult gain_condition_check(const LyapunovConstants& c, double z0_norm);

// b0 and b1 assembled from the controller gains, the mu bound constants,
// the search radius and the approximation residual bound eps_bar.
struct DerivedRates {
  double b0 = 0.0;
  double b1 = 0.0;
};
DerivedRates derive_rates(const Gains& gains, Index p, double theta_bar, const MuBoundConstants& mu_bounds,
                          double eps_bar);

}  // namespace lylatherm
