#pragma once

#include <filesystem>
#include <vector>

#include "lylatherm/numerics.hpp"

namespace lylatherm {

enum class Activation { Swish, Linear };

double swish(double y);
double swish_prime(double y);
double swish_second(double y);

double activate(Activation kind, double y);
double activate_prime(Activation kind, double y);
double activate_second(Activation kind, double y);

/// Layer sizes of a fully-connected feedforward network.
///
/// `sizes` holds L_0 (input), the hidden widths L_1..L_k, and L_{k+1}
/// (output). Layer j maps an augmented input of L_j + 1 entries (trailing 1
/// carries the bias) to L_{j+1} outputs through a weight matrix of shape
/// (L_j + 1) x L_{j+1}.
struct NetworkShape {
  std::vector<int> sizes;
  Activation activation = Activation::Swish;

  static NetworkShape uniform(int input, int hidden_layers, int width, int output,
                              Activation activation = Activation::Swish);

  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
  int hidden_layers() const { return static_cast<int>(sizes.size()) - 2; }
  int layer_count() const { return static_cast<int>(sizes.size()) - 1; }

  Index param_count() const;
  // Offset of vec(V_{j+1}) inside theta, j in [0, layer_count()).
  Index layer_offset(int j) const;

  // Throws std::invalid_argument unless there are >= 2 sizes, all >= 1.
  void validate() const;
};

/// Shape plus weight vector theta = [vec(V_1); ...; vec(V_{k+1})], each
/// block column-major.
struct Network {
  NetworkShape shape;
  Vector theta;

  Network(NetworkShape s, Vector t);

  // Read-only view of V_{j+1} as an (L_j + 1) x L_{j+1} matrix.
  Eigen::Map<const Matrix> layer(int j) const;
};

// Each entry of V_{j+1}, bias row included, ~ Normal(0, 2 / (L_j + 1)).
Network he_init(const NetworkShape& shape, RandomSource& rng);

Vector forward(const NetworkShape& shape, const Vector& theta, const Vector& x);
inline Vector forward(const Network& net, const Vector& x) { return forward(net.shape, net.theta, x); }

// Phi'(x, theta) in R^{L_{k+1} x p}, columns ordered like theta.
Matrix weight_jacobian(const NetworkShape& shape, const Vector& theta, const Vector& x);
inline Matrix weight_jacobian(const Network& net, const Vector& x) {
  return weight_jacobian(net.shape, net.theta, x);
}

// Output and Jacobian in one pass. Jacobian is skipped when jacobian == nullptr.
void evaluate(const NetworkShape& shape, const Vector& theta, const Vector& x, Vector& output,
              Matrix* jacobian);

struct ActivationBounds {
  double a0 = 0.0;
  double a1 = 0.0;
  double b0 = 0.0;
  double c0 = 0.0;
};

// Grid scan over [-grid_limit, grid_limit].
ActivationBounds measure_activation_bounds(double grid_limit, double step,
                                           Activation kind = Activation::Swish);

// Weight files. CSV holds one value per line in theta order; binary is the
// raw little-endian float64 sequence.
void save_weights_csv(const std::filesystem::path& path, const Vector& theta);
Vector load_weights_csv(const std::filesystem::path& path);
void save_weights_binary(const std::filesystem::path& path, const Vector& theta);
Vector load_weights_binary(const std::filesystem::path& path);

}  // namespace lylatherm
