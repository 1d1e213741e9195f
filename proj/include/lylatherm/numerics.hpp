#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace lylatherm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Throws std::invalid_argument naming `what` when v.size() != expected.
void require_size(const Vector& v, Index expected, const char* what);

/// Seeded pseudo-random source.
///
/// The generator is xoshiro256** (Blackman & Vigna) whose 256-bit state is
/// filled by four successive outputs of splitmix64 applied to the seed.
/// Normal deviates use the Marsaglia polar method; the second deviate of
/// each accepted pair is cached and returned by the next call.
///
/// A RandomSource is single-owner. Parallel sweeps construct one per run.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal.
  double normal();

  // Derives an independent seed for a named sub-stream (e.g. network init
  // vs. Wiener noise) from a base seed.
  static std::uint64_t derive(std::uint64_t base, std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Wiener increment: p i.i.d. Normal(0, dt) entries.
Vector wiener_increment(RandomSource& rng, Index p, double dt);

// Allocation-free variant used in the integration loop; out.size() gives p.
void wiener_increment(RandomSource& rng, double dt, Eigen::Ref<Vector> out);

// sqrt( (1/N) sum_i ||v_i||^2 ).
double rms_over_log(std::span<const Vector> samples);

using VectorFunction = std::function<Vector(const Vector&)>;

// Central-difference Jacobian, entry (i, j) = (f_i(a + h e_j) - f_i(a - h e_j)) / 2h.
Matrix finite_diff_jacobian(const VectorFunction& f, const Vector& at, double h);

}  // namespace lylatherm
