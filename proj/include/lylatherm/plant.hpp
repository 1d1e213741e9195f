#pragma once

#include <optional>
#include <stdexcept>

#include "lylatherm/network.hpp"
#include "lylatherm/thermo.hpp"

namespace lylatherm {

inline constexpr Index kPlantDim = 5;

// Benchmark plant drift f(x), x in R^5. Only the integrator and the metric
// code call this; the controller never sees f.
Vector plant_drift(const Vector& x);

struct DesiredState {
  Vector position;
  Vector velocity;
};

// x_d(t) = (sin 2t, -cos t, sin 3t + cos(-2t), sin t - cos(-t/2), sin(-t))
// and its exact time derivative.
DesiredState desired(double t);

// Componentwise amplitude bounds give ||x_d|| <= sqrt(11) and
// ||x_d_dot|| <= sqrt(4 + 1 + 25 + 2.25 + 1).
double desired_position_bound();
double desired_velocity_bound();

Vector tracking_error(const Vector& x, double t);

class SingularEffectivenessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// g^+ = g^T (g g^T)^{-1}; throws SingularEffectivenessError when g g^T is singular.
Matrix right_pseudo_inverse(const Matrix& g);

/// u = g^+ (x_d_dot - k_e e - Phi(x, theta) - (p+1) gamma k_T mu / 2).
///
/// With no `effectiveness` the benchmark g = I is used and the
/// pseudo-inverse is skipped.
Vector control_input(const Network& net, const TemperatureLaw& law, const Gains& gains,
                     const Vector& x, const Vector& theta, double t,
                     const std::optional<Matrix>& effectiveness = std::nullopt);

}  // namespace lylatherm
