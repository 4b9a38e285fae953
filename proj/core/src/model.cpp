#include "dkf/model.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "dkf/errors.hpp"
#include "dkf/linalg.hpp"

namespace dkf {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool is_symmetric(const Matrix& m, double tol = 1e-9) {
  if (m.rows() != m.cols()) return false;
  if (m.rows() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

// PSD square root via eigendecomposition; tolerates zero eigenvalues so Q = 0
// (noise-free dynamics) stays usable for sampling.
Matrix psd_sqrt(const Matrix& m, const std::string& field) {
  if (m.rows() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  Vector ev = es.eigenvalues();
  const double floor = -1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    require(ev[i] >= floor, field + ": must be positive semidefinite");
    ev[i] = std::max(ev[i], 0.0);
  }
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

}  // namespace

SensorModel SensorModel::none(Eigen::Index state_dim) {
  SensorModel s;
  s.H = Matrix::Zero(0, state_dim);
  s.R = Matrix::Zero(0, 0);
  s.R_inv = Matrix::Zero(0, 0);
  s.R_chol = Matrix::Zero(0, 0);
  return s;
}

SensorModel SensorModel::linear(Matrix H, Matrix R) {
  SensorModel s;
  s.H = std::move(H);
  s.R = std::move(R);
  return s;
}

void LinearModel::validate() {
  const Eigen::Index n = A.rows();
  require(n > 0 && A.cols() == n, "model.A: must be a nonempty square matrix");
  require(B.rows() == n, "model.B: row count must match the state dimension");
  const Eigen::Index p = B.cols();
  require(Q.rows() == p && Q.cols() == p,
          "model.Q: must be square with the noise dimension of B");
  require(is_symmetric(Q), "model.Q: must be symmetric");
  Q_sqrt = psd_sqrt(Q, "model.Q");
  BQBt = symmetrize(B * Q * B.transpose());

  for (auto& [id, sensor] : sensors) {
    const std::string key = "model.sensors[" + std::to_string(id) + "]";
    if (!sensor.observes()) {
      sensor = SensorModel::none(n);
      continue;
    }
    require(sensor.H.cols() == n, key + ".H: column count must match the state dimension");
    const Eigen::Index m = sensor.H.rows();
    require(sensor.R.rows() == m && sensor.R.cols() == m,
            key + ".R: must be square with the measurement dimension of H");
    require(is_symmetric(sensor.R), key + ".R: must be symmetric");
    Eigen::LLT<Matrix> llt(symmetrize(sensor.R));
    require(llt.info() == Eigen::Success, key + ".R: must be positive definite");
    sensor.R_chol = llt.matrixL();
    sensor.R_inv = symmetrize(llt.solve(Matrix::Identity(m, m)));
  }
}

const SensorModel& LinearModel::sensor(NodeId id) const {
  auto it = sensors.find(id);
  if (it == sensors.end()) {
    throw QueryError("unknown sensor node id " + std::to_string(id));
  }
  return it->second;
}

Vector step_truth(const LinearModel& model, const Vector& x, GaussianSource& noise) {
  if (x.size() != model.state_dim()) {
    throw ConfigError("step_truth: state dimension mismatch");
  }
  if (model.Q_sqrt.rows() != model.noise_dim()) {
    throw ConfigError("step_truth: model not validated (call LinearModel::validate)");
  }
  const Vector w = model.Q_sqrt * noise.next_vector(model.noise_dim());
  return model.A * x + model.B * w;
}

std::optional<Vector> measure(const SensorModel& sensor, const Vector& x,
                              GaussianSource& noise) {
  if (!sensor.observes()) return std::nullopt;
  if (x.size() != sensor.H.cols()) {
    throw ConfigError("measure: state dimension mismatch");
  }
  if (sensor.R_chol.rows() != sensor.dim()) {
    throw ConfigError("measure: sensor not validated (call LinearModel::validate)");
  }
  const Vector v = sensor.R_chol * noise.next_vector(sensor.dim());
  return sensor.H * x + v;
}

std::pair<Matrix, Vector> information_pair(const SensorModel& sensor, const Vector& z) {
  const Eigen::Index n = sensor.H.cols();
  if (!sensor.observes()) {
    return {Matrix::Zero(n, n), Vector::Zero(n)};
  }
  if (z.size() != sensor.dim()) {
    throw ConfigError("information_pair: measurement dimension mismatch");
  }
  if (sensor.R_inv.rows() != sensor.dim()) {
    throw ConfigError("information_pair: sensor not validated (call LinearModel::validate)");
  }
  const Matrix Ht_Rinv = sensor.H.transpose() * sensor.R_inv;
  return {symmetrize(Ht_Rinv * sensor.H), Ht_Rinv * z};
}

Trajectory simulate_truth(const LinearModel& model, const Vector& x0, int ticks,
                          std::uint64_t process_seed) {
  if (ticks < 0) throw ConfigError("simulate_truth: ticks must be >= 0");
  Trajectory traj;
  traj.seed = process_seed;
  traj.states.reserve(static_cast<std::size_t>(ticks) + 1);
  traj.states.push_back(x0);
  GaussianSource noise(process_seed);
  for (int k = 1; k <= ticks; ++k) {
    traj.states.push_back(step_truth(model, traj.states.back(), noise));
  }
  return traj;
}

}  // namespace dkf
