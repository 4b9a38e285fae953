#pragma once

#include <cstdint>
#include <random>

#include "dkf/types.hpp"

namespace dkf {

// Stream roles for deriving independent substreams from one scenario seed.
// One stream per role and node means adding or removing a node leaves every
// other node's noise realization untouched.
enum class StreamRole : std::uint64_t {
  kProcessNoise = 1,
  kMeasurementNoise = 2,
  kInitialPrior = 3,
};

std::uint64_t derive_stream_seed(std::uint64_t base, StreamRole role, std::uint64_t id);

// Seeded standard-normal stream. Box-Muller over mt19937_64, so the sample
// sequence is pinned by this code rather than by the standard library's
// normal_distribution, which is implementation-defined.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed);

  // A source that yields exact zeros; used to switch noise off.
  static GaussianSource zeros();

  bool enabled() const { return enabled_; }

  double next();
  Vector next_vector(Eigen::Index n);

 private:
  GaussianSource() = default;

  std::mt19937_64 rng_{0};
  bool enabled_ = false;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed);

  // Uniform draw from [lo, hi).
  double next(double lo, double hi);

 private:
  std::mt19937_64 rng_;
};

}  // namespace dkf
