#include "lylatherm/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lylatherm {

namespace {

double sigmoid(double y) {
  if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
  const double ey = std::exp(y);
  return ey / (1.0 + ey);
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace

double swish(double y) { return y * sigmoid(y); }

double swish_prime(double y) {
  const double s = sigmoid(y);
  return s + y * s * (1.0 - s);
}

double swish_second(double y) {
  const double s = sigmoid(y);
  const double ds = s * (1.0 - s);
  return 2.0 * ds + y * ds * (1.0 - 2.0 * s);
}

double activate(Activation kind, double y) { return kind == Activation::Swish ? swish(y) : y; }

double activate_prime(Activation kind, double y) {
  return kind == Activation::Swish ? swish_prime(y) : 1.0;
}

double activate_second(Activation kind, double y) {
  return kind == Activation::Swish ? swish_second(y) : 0.0;
}

NetworkShape NetworkShape::uniform(int input, int hidden_layers, int width, int output,
                                   Activation activation) {
  NetworkShape shape;
  shape.sizes.push_back(input);
  for (int i = 0; i < hidden_layers; ++i) shape.sizes.push_back(width);
  shape.sizes.push_back(output);
  shape.activation = activation;
  shape.validate();
  return shape;
}

Index NetworkShape::param_count() const { return layer_offset(layer_count()); }

Index NetworkShape::layer_offset(int j) const {
  Index offset = 0;
  for (int i = 0; i < j; ++i) offset += static_cast<Index>(sizes[i] + 1) * sizes[i + 1];
  return offset;
}

void NetworkShape::validate() const {
  if (sizes.size() < 2) throw std::invalid_argument("NetworkShape: need input and output sizes");
  if (std::any_of(sizes.begin(), sizes.end(), [](int s) { return s < 1; })) {
    throw std::invalid_argument("NetworkShape: all layer sizes must be >= 1");
  }
}

Network::Network(NetworkShape s, Vector t) : shape(std::move(s)), theta(std::move(t)) {
  shape.validate();
  require_size(theta, shape.param_count(), "Network theta");
}

Eigen::Map<const Matrix> Network::layer(int j) const {
  return {theta.data() + shape.layer_offset(j), shape.sizes[j] + 1, shape.sizes[j + 1]};
}

Network he_init(const NetworkShape& shape, RandomSource& rng) {
  shape.validate();
  Vector theta(shape.param_count());
  for (int j = 0; j < shape.layer_count(); ++j) {
    const int fan_in = shape.sizes[j] + 1;
    const double sd = std::sqrt(2.0 / fan_in);
    const Index begin = shape.layer_offset(j);
    const Index end = shape.layer_offset(j + 1);
    for (Index i = begin; i < end; ++i) theta[i] = sd * rng.normal();
  }
  return {shape, std::move(theta)};
}

void evaluate(const NetworkShape& shape, const Vector& theta, const Vector& x, Vector& output,
              Matrix* jacobian) {
  require_size(x, shape.input_size(), "network input");
  require_size(theta, shape.param_count(), "network theta");

  const int layers = shape.layer_count();
  // augmented[j] is the (L_j + 1)-vector fed into V_{j+1}; pre[j] = V_{j+1}^T augmented[j].
  std::vector<Vector> augmented(layers);
  std::vector<Vector> pre(layers);

  augmented[0].resize(shape.sizes[0] + 1);
  augmented[0].head(shape.sizes[0]) = x;
  augmented[0][shape.sizes[0]] = 1.0;

  for (int j = 0; j < layers; ++j) {
    const Eigen::Map<const Matrix> weights(theta.data() + shape.layer_offset(j), shape.sizes[j] + 1,
                                           shape.sizes[j + 1]);
    pre[j].noalias() = weights.transpose() * augmented[j];
    if (j + 1 < layers) {
      const int width = shape.sizes[j + 1];
      augmented[j + 1].resize(width + 1);
      for (int i = 0; i < width; ++i) augmented[j + 1][i] = activate(shape.activation, pre[j][i]);
      augmented[j + 1][width] = 1.0;
    }
  }
  output = pre[layers - 1];

  if (jacobian == nullptr) return;

  const int out = shape.output_size();
  jacobian->resize(out, shape.param_count());
  // upstream = d output / d pre[j], built right-to-left from the output layer.
  Matrix upstream = Matrix::Identity(out, out);
  for (int j = layers - 1; j >= 0; --j) {
    const int fan_in = shape.sizes[j] + 1;
    const Index offset = shape.layer_offset(j);
    // d pre[j] / d vec(V_{j+1}) = I kron augmented[j]^T
    for (int b = 0; b < shape.sizes[j + 1]; ++b) {
      jacobian->middleCols(offset + static_cast<Index>(b) * fan_in, fan_in).noalias() =
          upstream.col(b) * augmented[j].transpose();
    }
    if (j == 0) break;
    // Bias row of the activation Jacobian is zero, so only the top L_j rows of V_{j+1} matter.
    const Eigen::Map<const Matrix> weights(theta.data() + offset, fan_in, shape.sizes[j + 1]);
    Matrix next = upstream * weights.topRows(shape.sizes[j]).transpose();
    for (int i = 0; i < shape.sizes[j]; ++i) {
      next.col(i) *= activate_prime(shape.activation, pre[j - 1][i]);
    }
    upstream = std::move(next);
  }
}

Vector forward(const NetworkShape& shape, const Vector& theta, const Vector& x) {
  Vector out;
  evaluate(shape, theta, x, out, nullptr);
  return out;
}

Matrix weight_jacobian(const NetworkShape& shape, const Vector& theta, const Vector& x) {
  Vector out;
  Matrix jac;
  evaluate(shape, theta, x, out, &jac);
  return jac;
}

ActivationBounds measure_activation_bounds(double grid_limit, double step, Activation kind) {
  if (!(grid_limit > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("measure_activation_bounds: limit and step must be positive");
  }
  ActivationBounds bounds;
  const auto n = static_cast<long>(std::floor(2.0 * grid_limit / step));
  for (long i = 0; i <= n; ++i) {
    const double y = -grid_limit + static_cast<double>(i) * step;
    bounds.b0 = std::max(bounds.b0, std::abs(activate_prime(kind, y)));
    bounds.c0 = std::max(bounds.c0, std::abs(activate_second(kind, y)));
    if (y != 0.0) bounds.a1 = std::max(bounds.a1, std::abs(activate(kind, y)) / std::abs(y));
  }
  for (long i = 0; i <= n; ++i) {
    const double y = -grid_limit + static_cast<double>(i) * step;
    bounds.a0 = std::max(bounds.a0, std::abs(activate(kind, y)) - bounds.a1 * std::abs(y));
  }
  return bounds;
}

void save_weights_csv(const std::filesystem::path& path, const Vector& theta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  for (Index i = 0; i < theta.size(); ++i) out << theta[i] << '\n';
}

Vector load_weights_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream field(line);
    double v = 0.0;
    if (!(field >> v)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
    values.push_back(v);
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

void save_weights_binary(const std::filesystem::path& path, const Vector& theta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (Index i = 0; i < theta.size(); ++i) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(theta[i]));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

Vector load_weights_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes % 8 != 0) throw std::runtime_error(path.string() + ": size is not a multiple of 8");
  in.seekg(0);
  Vector theta(static_cast<Index>(bytes / 8));
  for (Index i = 0; i < theta.size(); ++i) {
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), sizeof bits);
    theta[i] = std::bit_cast<double>(to_little_endian(bits));
  }
  return theta;
}

}  // namespace lylatherm
