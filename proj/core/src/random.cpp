#include "dkf/random.hpp"

#include <cmath>
#include <numbers>

namespace dkf {
namespace {

// splitmix64 step; stable across platforms.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// 53-bit mantissa offset by half an ulp, strictly inside (0, 1).
double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t base, StreamRole role, std::uint64_t id) {
  std::uint64_t s = mix64(base);
  s = mix64(s ^ static_cast<std::uint64_t>(role));
  return mix64(s ^ id);
}

GaussianSource::GaussianSource(std::uint64_t seed) : rng_(seed), enabled_(true) {}

GaussianSource GaussianSource::zeros() { return GaussianSource(); }

double GaussianSource::next() {
  if (!enabled_) return 0.0;
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = to_open_unit(rng_());
  const double u2 = to_open_unit(rng_());
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vector GaussianSource::next_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = next();
  return v;
}

UniformSource::UniformSource(std::uint64_t seed) : rng_(seed) {}

double UniformSource::next(double lo, double hi) {
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + u * (hi - lo);
}

}  // namespace dkf
