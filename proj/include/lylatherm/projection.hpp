#pragma once

#include <stdexcept>

#include "lylatherm/numerics.hpp"

namespace lylatherm {

/// Ball-shaped parameter search region with boundary function
/// P(theta) = ||theta||^2 - radius^2. Pi = {P <= 0}, Pi_eps = {P <= layer}.
struct ConvexBall {
  double radius = 20.0;
  double layer = 0.1;

  double boundary(const Vector& theta) const { return theta.squaredNorm() - radius * radius; }
  Vector gradient(const Vector& theta) const { return 2.0 * theta; }
  void validate() const;
};

enum class Membership { Interior, Layer, Outside };

// Interior: P < 0. Layer: 0 <= P <= eps. Outside: P > eps.
Membership contains(const ConvexBall& ball, const Vector& theta);

// Raised when proj is asked to act outside Pi_eps.
class ProjectionDomainError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Smooth projection of an update direction m at theta.
///
/// Returns m when theta is interior or grad(P)^T m <= 0; otherwise removes
/// the fraction min(1, P/eps) of the outward normal component.
Vector proj(const ConvexBall& ball, const Vector& theta, const Vector& m);

// Radially rescales theta onto the outer boundary of Pi_eps when it lies
// outside. Returns true if a clip happened.
bool clip_to_layer(const ConvexBall& ball, Vector& theta);

}  // namespace lylatherm
