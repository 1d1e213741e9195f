#include "lylatherm/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lylatherm {

double lyapunov_value(const Vector& e, const Vector& theta_tilde, double gamma) {
  return 0.5 * e.squaredNorm() + theta_tilde.squaredNorm() / (2.0 * gamma);
}

double rayleigh_lower(double gamma) { return 0.5 * std::min(1.0, 1.0 / gamma); }

double rayleigh_upper(double gamma) { return 0.5 * std::max(1.0, 1.0 / gamma); }

double RemainderPolynomial::rho1(double s) const {
  const double shifted = s + desired_bound;
  return a2 * shifted * shifted + a1 * shifted + a0;
}

double RemainderPolynomial::inverse(double value) const {
  if (value < 0.0) throw InfeasibleConstantsError("rho inverse of a negative value");
  if (value == 0.0) return 0.0;
  if (rho1(0.0) <= 0.0 && a1 <= 0.0 && a2 <= 0.0) {
    throw InfeasibleConstantsError("rho is not invertible (all coefficients zero)");
  }
  double hi = 1.0;
  while (rho(hi) < value) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw InfeasibleConstantsError("rho inverse did not bracket");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (rho(mid) < value ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double LyapunovConstants::domain_radius() const {
  if (!(b0 > b2)) {
    throw InfeasibleConstantsError("domain radius requires b0 > b2 (b0 = " + std::to_string(b0) +
                                   ", b2 = " + std::to_string(b2) + ")");
  }
  return rho.inverse(b0 - b2);
}

std::pair<double, double> LyapunovConstants::lambda_interval() const {
  const double r = domain_radius();
  return {alpha2() * b1 / b2, alpha1() * r * r};
}

double escape_risk(const LyapunovConstants& c, double v0, double t) {
  if (!(c.gamma > 0.0) || !(c.b2 > 0.0) || !(c.lambda > 0.0) || c.b1 < 0.0 || v0 < 0.0) {
    throw InfeasibleConstantsError("escape_risk: constants must be positive");
  }
  const auto [lo, hi] = c.lambda_interval();
  if (lo > hi) throw InfeasibleConstantsError("escape_risk: lambda interval is empty");
  if (c.lambda < lo || c.lambda > hi) {
    throw InfeasibleConstantsError("escape_risk: lambda outside [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]");
  }
  const double r = c.domain_radius();
  return v0 / (c.alpha1() * r * r) + (v0 / c.lambda) * std::exp(-c.b1 * t) +
         c.alpha2() * c.b1 / (c.lambda * c.b2);
}

GainConditionResult gain_condition_check(const LyapunovConstants& c, double z0_norm) {
  const double ratio = c.alpha2() / c.alpha1();
  const double offset = c.b2 > 0.0 ? ratio * c.b1 / c.b2 : (c.b1 == 0.0 ? 0.0 : INFINITY);
  GainConditionResult r;
  r.lhs = c.b0;
  r.rhs = c.rho.rho(std::sqrt(ratio * z0_norm * z0_norm + offset)) + c.b2;
  r.margin = r.lhs - r.rhs;
  r.satisfied = r.margin >= 0.0;
  return r;
}

DerivedRates derive_rates(const Gains& gains, Index p, double theta_bar, const MuBoundConstants& mu_bounds,
                          double eps_bar) {
  const double pk = static_cast<double>(p + 1) * gains.k_T;
  const double coupling = 0.5 * gains.gamma * (mu_bounds.c1 * theta_bar + mu_bounds.c0) * theta_bar * pk;
  DerivedRates r;
  r.b0 = std::min(0.5 * gains.k_e - gains.gamma * mu_bounds.c2 * pk * theta_bar - coupling,
                  0.5 * gains.sigma);
  r.b1 = eps_bar * eps_bar / (2.0 * gains.k_e) + coupling + 0.5 * gains.sigma * theta_bar * theta_bar;
  return r;
}

}  // namespace lylatherm
