#include "lylatherm/plant.hpp"

#include <cmath>

namespace lylatherm {

Vector plant_drift(const Vector& x) {
  require_size(x, kPlantDim, "plant state");
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  Vector f(kPlantDim);
  f[0] = 5.0 * std::tanh(50.0 * x1) * x5 * x5 + std::cos(x4);
  f[1] = std::cos(20.0 * x3) + 2.0 * std::sin(x1 * x2) * std::sin(x4 * x5);
  f[2] = 10.0 * std::exp(-25.0 * x4 * x4) * x3 - 0.1 * x3 * x3 * x3;
  f[3] = 2.0 * std::sin(15.0 * (x1 * x5 - x2 * x3));
  f[4] = -x1 * x5 + 5.0 * std::tanh(20.0 * (x2 - x4));
  return f;
}

DesiredState desired(double t) {
  DesiredState d{Vector(kPlantDim), Vector(kPlantDim)};
  d.position << std::sin(2.0 * t), -std::cos(t), std::sin(3.0 * t) + std::cos(-2.0 * t),
      std::sin(t) - std::cos(-0.5 * t), std::sin(-t);
  d.velocity << 2.0 * std::cos(2.0 * t), std::sin(t), 3.0 * std::cos(3.0 * t) + 2.0 * std::sin(-2.0 * t),
      std::cos(t) - 0.5 * std::sin(-0.5 * t), -std::cos(-t);
  return d;
}

double desired_position_bound() { return std::sqrt(11.0); }

double desired_velocity_bound() { return std::sqrt(33.25); }

Vector tracking_error(const Vector& x, double t) {
  require_size(x, kPlantDim, "plant state");
  return x - desired(t).position;
}

Matrix right_pseudo_inverse(const Matrix& g) {
  const Matrix gram = g * g.transpose();
  Eigen::FullPivLU<Matrix> lu(gram);
  if (!lu.isInvertible()) {
    throw SingularEffectivenessError("control effectiveness g g^T is singular");
  }
  return g.transpose() * lu.inverse();
}

Vector control_input(const Network& net, const TemperatureLaw& law, const Gains& gains,
                     const Vector& x, const Vector& theta, double t,
                     const std::optional<Matrix>& effectiveness) {
  require_size(x, kPlantDim, "plant state");
  const DesiredState d = desired(t);
  const Vector e = x - d.position;
  Vector v = d.velocity - gains.k_e * e - forward(net.shape, theta, x);
  if (gains.k_T != 0.0) v -= gains.compensation(theta.size()) * mu(law, x, theta, e);
  if (!effectiveness) return v;
  return right_pseudo_inverse(*effectiveness) * v;
}

}  // namespace lylatherm
