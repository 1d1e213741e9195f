#include "lylatherm/projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lylatherm {

void ConvexBall::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("ConvexBall: radius must be positive");
  if (!(layer > 0.0)) throw std::invalid_argument("ConvexBall: layer must be positive");
}

Membership contains(const ConvexBall& ball, const Vector& theta) {
  const double p = ball.boundary(theta);
  if (p < 0.0) return Membership::Interior;
  if (p <= ball.layer) return Membership::Layer;
  return Membership::Outside;
}

Vector proj(const ConvexBall& ball, const Vector& theta, const Vector& m) {
  require_size(m, theta.size(), "proj direction");
  const double p = ball.boundary(theta);
  if (p < 0.0) return m;
  if (p > ball.layer) {
    throw ProjectionDomainError("proj: theta_hat lies outside the boundary layer (P = " +
                                std::to_string(p) + ")");
  }
  const Vector grad = ball.gradient(theta);
  const double outward = grad.dot(m);
  if (outward <= 0.0) return m;
  const double h = std::min(1.0, p / ball.layer);
  return m - (h * outward / grad.squaredNorm()) * grad;
}

bool clip_to_layer(const ConvexBall& ball, Vector& theta) {
  if (contains(ball, theta) != Membership::Outside) return false;
  const double target = std::sqrt(ball.radius * ball.radius + ball.layer);
  theta *= target / theta.norm();
  // Round-off can leave the rescaled point a hair outside.
  while (contains(ball, theta) == Membership::Outside) theta *= 1.0 - 1e-15;
  return true;
}

}  // namespace lylatherm
