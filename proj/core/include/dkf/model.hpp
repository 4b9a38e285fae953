#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dkf/random.hpp"
#include "dkf/types.hpp"

namespace dkf {

// Per-node sensing model z = H x + v, v ~ N(0, R). A node that never observes
// the target carries an empty measurement (H has zero rows): its information
// contribution is identically zero and no noise is ever drawn for it.
struct SensorModel {
  Matrix H;  // m x n
  Matrix R;  // m x m, positive definite when m > 0

  // Derived factors, filled in by LinearModel::validate().
  Matrix R_inv;
  Matrix R_chol;  // lower Cholesky factor of R, used for sampling

  Eigen::Index dim() const { return H.rows(); }
  bool observes() const { return H.rows() > 0; }

  static SensorModel none(Eigen::Index state_dim);
  static SensorModel linear(Matrix H, Matrix R);
};

// Linear dynamics x' = A x + B w, w ~ N(0, Q), plus one sensor per node.
struct LinearModel {
  Matrix A;  // n x n state transition
  Matrix B;  // n x p process-noise input
  Matrix Q;  // p x p process-noise covariance, symmetric PSD
  std::map<NodeId, SensorModel> sensors;

  // Derived quantities, filled in by validate().
  Matrix BQBt;
  Matrix Q_sqrt;  // Q = Q_sqrt * Q_sqrt^T, tolerant of singular Q

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index noise_dim() const { return B.cols(); }

  // Checks dimensions and definiteness, then precomputes BQBt, Q_sqrt and the
  // per-sensor R factors. Must run before the model is used for sampling.
  // Throws ConfigError naming the offending field.
  void validate();

  const SensorModel& sensor(NodeId id) const;  // throws QueryError if unknown
};

struct Measurement {
  NodeId node = 0;
  int tick = 0;
  Vector z;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<Vector> states;  // states[k] for k = 0..ticks
};

// x' = A x + B w with w ~ N(0, Q) drawn from `noise`.
Vector step_truth(const LinearModel& model, const Vector& x, GaussianSource& noise);

// z = H x + v with v ~ N(0, R); nullopt for a non-observing sensor.
std::optional<Vector> measure(const SensorModel& sensor, const Vector& x, GaussianSource& noise);

// Information form of a measurement: S = H^T R^-1 H, y = H^T R^-1 z.
// A non-observing sensor contributes exact zeros (z is ignored).
std::pair<Matrix, Vector> information_pair(const SensorModel& sensor, const Vector& z);

// Ground-truth rollout from x0 under the process-noise stream `process_seed`.
Trajectory simulate_truth(const LinearModel& model, const Vector& x0, int ticks,
                          std::uint64_t process_seed);

}  // namespace dkf
