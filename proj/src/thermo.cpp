#include "lylatherm/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace lylatherm {

void Gains::validate(bool allow_zero_diffusion) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("gains: gamma must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("gains: sigma must be positive");
  if (!(k_e > 0.0)) throw std::invalid_argument("gains: k_e must be positive");
  if (allow_zero_diffusion ? !(k_T >= 0.0) : !(k_T > 0.0)) {
    throw std::invalid_argument("gains: k_T must be positive");
  }
}

TemperatureLaw TemperatureLaw::mu2(double scale) {
  TemperatureLaw law;
  law.kind = TemperatureKind::Mu2;
  law.scale = scale;
  law.quadratic = 0.0;
  return law;
}

TemperatureLaw TemperatureLaw::mu3(double quadratic, double scale) {
  TemperatureLaw law;
  law.kind = TemperatureKind::Mu3;
  law.scale = scale;
  law.quadratic = quadratic;
  return law;
}

TemperatureLaw TemperatureLaw::mu4(double quadratic, double scale) {
  TemperatureLaw law;
  law.kind = TemperatureKind::Mu4;
  law.scale = scale;
  law.quadratic = quadratic;
  return law;
}

TemperatureLaw TemperatureLaw::custom(MuFn mu, JacobianFn jacobian) {
  if (!mu || !jacobian) throw std::invalid_argument("custom temperature law needs mu and Jacobian");
  TemperatureLaw law;
  law.kind = TemperatureKind::Custom;
  law.custom_mu = std::move(mu);
  law.custom_jacobian = std::move(jacobian);
  return law;
}

namespace {

// Scalar multiplier m with mu = m * e for the built-in laws.
double mu_factor(const TemperatureLaw& law, const Vector& x, const Vector& theta) {
  switch (law.kind) {
    case TemperatureKind::Mu2:
      return law.scale;
    case TemperatureKind::Mu3:
      return law.quadratic * x.squaredNorm() + law.scale;
    case TemperatureKind::Mu4:
      return law.quadratic * theta.squaredNorm() + law.scale;
    case TemperatureKind::Custom:
      break;
  }
  throw std::logic_error("mu_factor called on a custom law");
}

}  // namespace

Vector mu(const TemperatureLaw& law, const Vector& x, const Vector& theta, const Vector& e) {
  if (law.kind == TemperatureKind::Custom) return law.custom_mu(x, theta, e);
  return mu_factor(law, x, theta) * e;
}

double temperature(const TemperatureLaw& law, const Vector& x, const Vector& theta, const Vector& e) {
  const double t = law.kind == TemperatureKind::Custom ? e.dot(law.custom_mu(x, theta, e))
                                                       : mu_factor(law, x, theta) * e.squaredNorm();
  return std::max(t, 0.0);
}

Matrix mu_jacobian(const TemperatureLaw& law, const Vector& x, const Vector& theta, const Vector& e) {
  switch (law.kind) {
    case TemperatureKind::Mu2:
    case TemperatureKind::Mu3:
      return Matrix::Zero(e.size(), theta.size());
    case TemperatureKind::Mu4:
      return 2.0 * law.quadratic * e * theta.transpose();
    case TemperatureKind::Custom:
      return law.custom_jacobian(x, theta, e);
  }
  return {};
}

Vector mu_jacobian_transpose_times(const TemperatureLaw& law, const Vector& x, const Vector& theta,
                                   const Vector& e, const Vector& v) {
  switch (law.kind) {
    case TemperatureKind::Mu2:
    case TemperatureKind::Mu3:
      return Vector::Zero(theta.size());
    case TemperatureKind::Mu4:
      return (2.0 * law.quadratic * e.dot(v)) * theta;
    case TemperatureKind::Custom:
      return law.custom_jacobian(x, theta, e).transpose() * v;
  }
  return {};
}

MuBoundConstants mu_bound_constants(const TemperatureLaw& law, double theta_bar) {
  if (law.kind == TemperatureKind::Mu4) return {0.0, 0.0, 2.0 * law.quadratic * theta_bar};
  if (law.kind == TemperatureKind::Custom) {
    throw std::invalid_argument("mu_bound_constants: custom laws must supply their own constants");
  }
  return {};
}

double internal_energy(const Vector& e, const Vector& e_dot, const Vector& theta, double sigma) {
  require_size(e_dot, e.size(), "internal_energy e_dot");
  return e.dot(e_dot) + 0.5 * sigma * theta.squaredNorm();
}

Vector drift(const Matrix& weight_jacobian, const TemperatureLaw& law, const Gains& gains,
             const Vector& x, const Vector& theta, const Vector& e) {
  if (weight_jacobian.rows() != e.size() || weight_jacobian.cols() != theta.size()) {
    throw std::invalid_argument("drift: weight Jacobian shape does not match (e, theta)");
  }
  Vector result = weight_jacobian.transpose() * e;
  if (gains.k_T != 0.0) {
    result += gains.compensation(theta.size()) * mu_jacobian_transpose_times(law, x, theta, e, e);
  }
  result -= gains.sigma * theta;
  return result;
}

Vector drift(const Network& net, const ConvexBall& ball, const TemperatureLaw& law, const Gains& gains,
             const Vector& x, const Vector& theta, const Vector& e) {
  if (contains(ball, theta) == Membership::Outside) {
    throw ProjectionDomainError("drift: theta_hat lies outside the boundary layer");
  }
  require_size(e, net.shape.output_size(), "drift tracking error");
  return drift(weight_jacobian(net.shape, theta, x), law, gains, x, theta, e);
}

double diffusion_coefficient(const TemperatureLaw& law, const Gains& gains, const Vector& x,
                             const Vector& theta, const Vector& e) {
  if (gains.k_T == 0.0) return 0.0;
  return std::sqrt(gains.k_T * temperature(law, x, theta, e));
}

CustomLawCheck validate_custom_law(const TemperatureLaw& law, Index n, Index p, RandomSource& rng,
                                   int samples, double tolerance) {
  CustomLawCheck check;
  if (law.kind != TemperatureKind::Custom) return check;
  for (int s = 0; s < samples; ++s) {
    Vector x(n), theta(p), e(n);
    for (Index i = 0; i < n; ++i) x[i] = rng.normal();
    for (Index i = 0; i < p; ++i) theta[i] = rng.normal();
    for (Index i = 0; i < n; ++i) e[i] = rng.normal();
    const Matrix analytic = law.custom_jacobian(x, theta, e);
    const Matrix numeric = finite_diff_jacobian(
        [&](const Vector& th) { return law.custom_mu(x, th, e); }, theta, 1e-6);
    const double scale = std::max(1.0, numeric.cwiseAbs().maxCoeff());
    check.max_relative_error =
        std::max(check.max_relative_error, (analytic - numeric).cwiseAbs().maxCoeff() / scale);
  }
  check.ok = check.max_relative_error <= tolerance;
  if (!check.ok) {
    std::cerr << "warning: custom temperature law Jacobian deviates from finite differences"
              << " (max relative error " << check.max_relative_error << ")\n";
  }
  return check;
}

}  // namespace lylatherm
