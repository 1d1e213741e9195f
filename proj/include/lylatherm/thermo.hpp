#pragma once

#include <functional>
#include <optional>

#include "lylatherm/network.hpp"
#include "lylatherm/numerics.hpp"
#include "lylatherm/projection.hpp"

namespace lylatherm {

struct Gains {
  double gamma = 1.0;    // learning rate
  double sigma = 0.001;  // forgetting factor
  double k_T = 0.03;     // diffusion gain
  double k_e = 100.0;    // control gain

  // Throws std::invalid_argument unless every gain is strictly positive.
  // S1 runs with k_T = 0, so `allow_zero_diffusion` relaxes that one gain.
  void validate(bool allow_zero_diffusion = false) const;

  // The recurring factor (p + 1) * gamma * k_T / 2.
  double compensation(Index p) const { return 0.5 * static_cast<double>(p + 1) * gamma * k_T; }
};

enum class TemperatureKind { Mu2, Mu3, Mu4, Custom };

/// User-selected mu(x, theta_hat, e) with its theta_hat-Jacobian.
///
///   Mu2: mu = s e
///   Mu3: mu = e (q ||x||^2 + s)
///   Mu4: mu = e (q ||theta_hat||^2 + s)
///
/// Custom laws supply both callables; see validate_custom_law.
struct TemperatureLaw {
  using MuFn = std::function<Vector(const Vector& x, const Vector& theta, const Vector& e)>;
  using JacobianFn = std::function<Matrix(const Vector& x, const Vector& theta, const Vector& e)>;

  TemperatureKind kind = TemperatureKind::Mu2;
  double scale = 9.0;
  double quadratic = 0.01;
  MuFn custom_mu;
  JacobianFn custom_jacobian;

  static TemperatureLaw mu2(double scale);
  static TemperatureLaw mu3(double quadratic, double scale);
  static TemperatureLaw mu4(double quadratic, double scale);
  static TemperatureLaw custom(MuFn mu, JacobianFn jacobian);
};

Vector mu(const TemperatureLaw& law, const Vector& x, const Vector& theta, const Vector& e);

// T = max(e^T mu, 0).
double temperature(const TemperatureLaw& law, const Vector& x, const Vector& theta, const Vector& e);

// d mu / d theta_hat, n x p.
Matrix mu_jacobian(const TemperatureLaw& law, const Vector& x, const Vector& theta, const Vector& e);

// (d mu / d theta_hat)^T v without forming the n x p matrix for built-in laws.
Vector mu_jacobian_transpose_times(const TemperatureLaw& law, const Vector& x, const Vector& theta,
                                   const Vector& e, const Vector& v);

// Constants of ||d mu / d theta_hat|| <= c2 ||e|| + c1 ||theta_hat|| + c0
// valid on the ball ||theta_hat|| <= theta_bar.
struct MuBoundConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};
MuBoundConstants mu_bound_constants(const TemperatureLaw& law, double theta_bar);

// U = e^T e_dot + sigma ||theta_hat||^2 / 2.
double internal_energy(const Vector& e, const Vector& e_dot, const Vector& theta, double sigma);

// Unprojected drift Phi'^T e + (p+1) gamma k_T (d mu/d theta)^T e / 2 - sigma theta.
Vector drift(const Network& net, const ConvexBall& ball, const TemperatureLaw& law, const Gains& gains,
             const Vector& x, const Vector& theta, const Vector& e);

// Same, given a precomputed weight Jacobian at (x, theta).
Vector drift(const Matrix& weight_jacobian, const TemperatureLaw& law, const Gains& gains,
             const Vector& x, const Vector& theta, const Vector& e);

// sqrt(k_T T); the stochastic increment is this scalar times a Wiener increment.
double diffusion_coefficient(const TemperatureLaw& law, const Gains& gains, const Vector& x,
                             const Vector& theta, const Vector& e);

struct CustomLawCheck {
  double max_relative_error = 0.0;
  bool ok = true;
};

// Compares a custom law's Jacobian to central differences on random states
// and warns on stderr when the relative error exceeds `tolerance`.
CustomLawCheck validate_custom_law(const TemperatureLaw& law, Index n, Index p, RandomSource& rng,
                                   int samples = 8, double tolerance = 1e-5);

}  // namespace lylatherm
