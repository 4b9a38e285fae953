#include "support/oracles.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "dkf/errors.hpp"
#include "dkf/linalg.hpp"

namespace dkf::test {

Matrix random_spd(GaussianSource& g, Eigen::Index n, double ridge) {
  Matrix G(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) G(r, c) = g.next();
  }
  return symmetrize(G * G.transpose() + ridge * Matrix::Identity(n, n));
}

Vector random_vector(GaussianSource& g, Eigen::Index n, double scale) {
  return scale * g.next_vector(n);
}

GainFormResult gain_form_update(const Vector& x_prior, const Matrix& P_prior, const Matrix& H,
                                const Matrix& R, const Vector& z) {
  const Matrix innovation_cov = H * P_prior * H.transpose() + R;
  const Matrix gain = P_prior * H.transpose() * innovation_cov.inverse();
  GainFormResult out;
  out.x = x_prior + gain * (z - H * x_prior);
  out.P = (Matrix::Identity(P_prior.rows(), P_prior.cols()) - gain * H) * P_prior;
  return out;
}

Vector consensus_form_estimate(const NodeBelief& prior, std::span<const ExchangeMessage> inbox,
                               const Matrix& M) {
  const Eigen::Index n = prior.x_prior.size();
  Matrix info_sum = Matrix::Zero(n, n);
  Vector meas_sum = Vector::Zero(n);
  Vector pull = Vector::Zero(n);
  for (const ExchangeMessage& msg : inbox) {
    info_sum += msg.S;
    meas_sum += msg.y;
    pull += invert_spd(msg.P_prior, "consensus_form_estimate") * (msg.x_prior - prior.x_prior);
  }
  const double weight = 1.0 / static_cast<double>(inbox.size());
  return prior.x_prior + M * (meas_sum - info_sum * prior.x_prior) + weight * (M * pull);
}

NodeBelief exact_joint_update(std::span<const ExchangeMessage> inbox,
                              const Matrix& joint_prior_cov) {
  if (inbox.empty()) throw ConfigError("exact_joint_update: empty inbox");
  const Eigen::Index n = inbox[0].x_prior.size();
  const Eigen::Index blocks = static_cast<Eigen::Index>(inbox.size());
  if (joint_prior_cov.rows() != blocks * n || joint_prior_cov.cols() != blocks * n) {
    throw ConfigError("exact_joint_update: joint covariance has the wrong shape");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(joint_prior_cov));
  const Vector ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  if (ev.minCoeff() < -1e-9 * scale) {
    throw NumericalError("exact_joint_update: joint prior covariance is indefinite");
  }
  Vector inv_ev(ev.size());
  const double cutoff = 1e-12 * scale;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    inv_ev[i] = ev[i] > cutoff ? 1.0 / ev[i] : 0.0;
  }
  const Matrix joint_info =
      es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose();

  Matrix info = Matrix::Zero(n, n);
  Vector rhs = Vector::Zero(n);
  for (const ExchangeMessage& msg : inbox) {
    info += msg.S;
    rhs += msg.y;
  }
  for (Eigen::Index a = 0; a < blocks; ++a) {
    for (Eigen::Index b = 0; b < blocks; ++b) {
      const Matrix block = joint_info.block(a * n, b * n, n, n);
      info += block;
      rhs += block * inbox[static_cast<std::size_t>(b)].x_prior;
    }
  }

  NodeBelief out;
  out.x_prior = inbox[0].x_prior;
  out.P_prior = joint_prior_cov.topLeftCorner(n, n);
  out.P_post = invert_spd(info, "exact_joint_update", JitterPolicy::kNone);
  out.x_post = out.P_post * rhs;
  return out;
}

JointErrorTracker::JointErrorTracker(const LinearModel& model, Matrix initial_joint)
    : model_(&model),
      n_(model.state_dim()),
      node_count_(static_cast<int>(initial_joint.rows() / model.state_dim())),
      joint_(std::move(initial_joint)) {
  if (joint_.rows() != joint_.cols() || joint_.rows() != node_count_ * n_) {
    throw ConfigError("JointErrorTracker: joint moment has the wrong shape");
  }
}

void JointErrorTracker::update(const Topology& topology,
                               const std::map<NodeId, Matrix>& prior_info,
                               const std::map<NodeId, Matrix>& posterior) {
  if (static_cast<int>(topology.alive.size()) != node_count_) {
    throw ConfigError("JointErrorTracker: every node must stay alive");
  }
  const Eigen::Index total = node_count_ * n_;
  Matrix propagate = Matrix::Zero(total, total);
  std::map<NodeId, std::set<NodeId>> inclusive;
  for (NodeId i = 1; i <= node_count_; ++i) {
    inclusive[i] = inclusive_neighborhood(topology, i);
    const double weight = 1.0 / static_cast<double>(inclusive[i].size());
    const Matrix& M = posterior.at(i);
    for (NodeId j : inclusive[i]) {
      propagate.block((i - 1) * n_, (j - 1) * n_, n_, n_) = weight * M * prior_info.at(j);
    }
  }

  // Measurement noise enters every node that hears the same sender.
  Matrix noise = Matrix::Zero(total, total);
  for (NodeId i = 1; i <= node_count_; ++i) {
    for (NodeId l = 1; l <= node_count_; ++l) {
      Matrix shared = Matrix::Zero(n_, n_);
      bool any = false;
      for (NodeId j : inclusive[i]) {
        if (!inclusive[l].contains(j)) continue;
        const SensorModel& sensor = model_->sensor(j);
        if (!sensor.observes()) continue;
        shared += sensor.H.transpose() * sensor.R_inv * sensor.H;
        any = true;
      }
      if (any) {
        noise.block((i - 1) * n_, (l - 1) * n_, n_, n_) =
            posterior.at(i) * shared * posterior.at(l);
      }
    }
  }
  joint_ = symmetrize(propagate * joint_ * propagate.transpose() + noise);
}

void JointErrorTracker::predict() {
  const Matrix& A = model_->A;
  const Eigen::Index total = node_count_ * n_;
  Matrix out(total, total);
  for (int i = 0; i < node_count_; ++i) {
    for (int l = 0; l < node_count_; ++l) {
      // The process noise realization is shared by every node's error.
      out.block(i * n_, l * n_, n_, n_) =
          A * joint_.block(i * n_, l * n_, n_, n_) * A.transpose() + model_->BQBt;
    }
  }
  joint_ = symmetrize(out);
}

Matrix JointErrorTracker::block(NodeId i, NodeId j) const {
  return joint_.block((i - 1) * n_, (j - 1) * n_, n_, n_);
}

}  // namespace dkf::test
