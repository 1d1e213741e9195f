#include "lylatherm/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lylatherm {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

void require_size(const Vector& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(expected) +
                                ", got " + std::to_string(v.size()));
  }
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) word = splitmix64(sm);
}

std::uint64_t RandomSource::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomSource::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RandomSource::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RandomSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

std::uint64_t RandomSource::derive(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t x = base ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  return splitmix64(x);
}

Vector wiener_increment(RandomSource& rng, Index p, double dt) {
  if (p < 1) throw std::invalid_argument("wiener_increment: dimension must be >= 1");
  Vector out(p);
  wiener_increment(rng, dt, out);
  return out;
}

void wiener_increment(RandomSource& rng, double dt, Eigen::Ref<Vector> out) {
  if (!(dt > 0.0)) throw std::invalid_argument("wiener_increment: dt must be positive");
  const double sd = std::sqrt(dt);
  for (Index i = 0; i < out.size(); ++i) out[i] = sd * rng.normal();
}

double rms_over_log(std::span<const Vector> samples) {
  if (samples.empty()) throw std::invalid_argument("rms_over_log: empty sequence");
  double acc = 0.0;
  for (const auto& v : samples) acc += v.squaredNorm();
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

Matrix finite_diff_jacobian(const VectorFunction& f, const Vector& at, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_jacobian: step must be positive");
  const Vector f0 = f(at);
  Matrix jac(f0.size(), at.size());
  Vector probe = at;
  for (Index j = 0; j < at.size(); ++j) {
    probe[j] = at[j] + h;
    const Vector plus = f(probe);
    probe[j] = at[j] - h;
    const Vector minus = f(probe);
    probe[j] = at[j];
    jac.col(j) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

}  // namespace lylatherm
