#include <doctest.h>

#include <map>
#include <vector>

#include "dkf/errors.hpp"
#include "dkf/filters.hpp"
#include "dkf/linalg.hpp"
#include "support/oracles.hpp"

using namespace dkf;

namespace {

ExchangeMessage message_of(NodeId sender, const Matrix& S, const Vector& y, const Vector& x,
                           const Matrix& P) {
  ExchangeMessage msg;
  msg.sender = sender;
  msg.S = S;
  msg.y = y;
  msg.x_prior = x;
  msg.P_prior = P;
  return msg;
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Eigen::Index total = 0;
  for (const Matrix& b : blocks) total += b.rows();
  Matrix out = Matrix::Zero(total, total);
  Eigen::Index offset = 0;
  for (const Matrix& b : blocks) {
    out.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  return out;
}

}  // namespace

TEST_CASE("a block-diagonal joint prior reduces to the independent-priors update") {
  GaussianSource g(3);
  std::vector<ExchangeMessage> inbox;
  std::vector<Matrix> priors;
  for (NodeId j = 1; j <= 3; ++j) {
    const Matrix P = test::random_spd(g, 4, 2.0);
    priors.push_back(P);
    inbox.push_back(message_of(j, test::random_spd(g, 4, 0.0), test::random_vector(g, 4),
                               test::random_vector(g, 4, 5.0), P));
  }
  const NodeBelief exact = test::exact_joint_update(inbox, block_diagonal(priors));

  // independent priors: information adds up without the cross terms
  Matrix info = Matrix::Zero(4, 4);
  Vector rhs = Vector::Zero(4);
  for (const ExchangeMessage& msg : inbox) {
    const Matrix prior_info = invert_spd(msg.P_prior, "test");
    info += msg.S + prior_info;
    rhs += msg.y + prior_info * msg.x_prior;
  }
  const Matrix M = invert_spd(info, "test");
  CHECK((exact.P_post - M).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((exact.x_post - M * rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fully redundant priors collapse to a single prior") {
  GaussianSource g(9);
  const Vector x = test::random_vector(g, 4, 10.0);
  const Matrix P = test::random_spd(g, 4, 2.0);
  std::vector<ExchangeMessage> inbox{
      message_of(1, test::random_spd(g, 4, 0.0), test::random_vector(g, 4), x, P),
      message_of(2, test::random_spd(g, 4, 0.0), test::random_vector(g, 4), x, P)};

  // both nodes share one and the same prior error, so every cross block is P
  Matrix joint(8, 8);
  joint.topLeftCorner(4, 4) = P;
  joint.topRightCorner(4, 4) = P;
  joint.bottomLeftCorner(4, 4) = P;
  joint.bottomRightCorner(4, 4) = P;

  const NodeBelief exact = test::exact_joint_update(inbox, joint);

  NodeBelief single;
  single.x_prior = x;
  single.P_prior = P;
  kf_update(single, inbox[0].S + inbox[1].S, inbox[0].y + inbox[1].y);
  CHECK((exact.P_post - single.P_post).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((exact.x_post - single.x_post).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("the exact update matches a stacked WLS solve") {
  GaussianSource g(27);
  for (int trial = 0; trial < 20; ++trial) {
    // three nodes in a line, full random PD joint prior covariance
    std::vector<ExchangeMessage> inbox;
    std::vector<Matrix> H_blocks;
    std::vector<Matrix> R_blocks;
    std::vector<Vector> z_blocks;
    for (NodeId j = 1; j <= 3; ++j) {
      Matrix H(2, 4);
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 4; ++c) H(r, c) = g.next();
      }
      const Matrix R = test::random_spd(g, 2, 1.0);
      const Vector z = test::random_vector(g, 2, 3.0);
      const Matrix R_inv = invert_spd(R, "test");
      inbox.push_back(message_of(j, symmetrize(H.transpose() * R_inv * H),
                                 H.transpose() * R_inv * z, test::random_vector(g, 4, 5.0),
                                 Matrix::Identity(4, 4)));
      H_blocks.push_back(H);
      R_blocks.push_back(R);
      z_blocks.push_back(z);
    }
    const Matrix joint = test::random_spd(g, 12, 4.0);

    const NodeBelief exact = test::exact_joint_update(inbox, joint);

    // one flat WLS over [z_1; z_2; z_3; x_1; x_2; x_3]
    Matrix H_full(18, 4);
    Vector z_full(18);
    for (int j = 0; j < 3; ++j) {
      H_full.middleRows(2 * j, 2) = H_blocks[j];
      z_full.segment(2 * j, 2) = z_blocks[j];
      H_full.middleRows(6 + 4 * j, 4) = Matrix::Identity(4, 4);
      z_full.segment(6 + 4 * j, 4) = inbox[j].x_prior;
    }
    Matrix noise_cov = Matrix::Zero(18, 18);
    for (int j = 0; j < 3; ++j) noise_cov.block(2 * j, 2 * j, 2, 2) = R_blocks[j];
    noise_cov.bottomRightCorner(12, 12) = joint;
    const auto [x_wls, P_wls] = wls_estimate(H_full, invert_spd(noise_cov, "test"), z_full);

    CHECK((exact.x_post - x_wls).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((exact.P_post - P_wls).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("an indefinite joint prior is an oracle failure") {
  GaussianSource g(1);
  std::vector<ExchangeMessage> inbox{
      message_of(1, Matrix::Zero(4, 4), Vector::Zero(4), Vector::Zero(4),
                 Matrix::Identity(4, 4)),
      message_of(2, Matrix::Zero(4, 4), Vector::Zero(4), Vector::Zero(4),
                 Matrix::Identity(4, 4))};
  Matrix joint = Matrix::Identity(8, 8);
  joint(0, 0) = -1.0;
  CHECK_THROWS_AS(test::exact_joint_update(inbox, joint), NumericalError);
}

TEST_CASE("the joint error tracker matches a Monte-Carlo estimate") {
  // three nodes in a line, node 1 observing
  LinearModel model;
  model.A = Matrix{{1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  model.B = Matrix::Identity(4, 4);
  model.Q = Vector{{10, 10, 1, 1}}.asDiagonal();
  model.sensors.emplace(
      1, SensorModel::linear(Matrix{{1, 0, 0, 0}, {0, 1, 0, 0}},
                             100.0 * Matrix::Identity(2, 2)));
  model.sensors.emplace(2, SensorModel::none(4));
  model.sensors.emplace(3, SensorModel::none(4));
  model.validate();
  const Topology topo = path_topology(3);
  const int ticks = 6;

  std::map<NodeId, NodeBelief> initial;
  GaussianSource init_draw(2024);
  for (NodeId i = 1; i <= 3; ++i) {
    NodeBelief b;
    b.x_prior = test::random_vector(init_draw, 4, 50.0);
    b.P_prior = 1e3 * Matrix::Identity(4, 4);
    b.x_post = b.x_prior;
    b.P_post = b.P_prior;
    initial.emplace(i, b);
  }

  // Reference pass: record the covariances the filter actually uses, feed the
  // tracker with them.
  const Vector x0 = Vector::Zero(4);
  Matrix initial_joint(12, 12);
  for (NodeId i = 1; i <= 3; ++i) {
    for (NodeId j = 1; j <= 3; ++j) {
      const Vector ei = initial.at(i).x_prior - x0;
      const Vector ej = initial.at(j).x_prior - x0;
      initial_joint.block(4 * (i - 1), 4 * (j - 1), 4, 4) = ei * ej.transpose();
    }
  }
  test::JointErrorTracker tracker(model, initial_joint);
  {
    auto filter = make_filter(FilterKind::IFDKF, {}, initial);
    GaussianSource off = GaussianSource::zeros();
    Vector truth = x0;
    for (int tick = 1; tick <= ticks; ++tick) {
      std::map<NodeId, Matrix> prior_info;
      for (NodeId i = 1; i <= 3; ++i) {
        prior_info.emplace(i, invert_spd(filter->beliefs().at(i).P_prior, "test"));
      }
      truth = step_truth(model, truth, off);
      std::map<NodeId, Vector> z{{1, *measure(model.sensor(1), truth, off)}};
      filter->step(TickInputs{model, topo, z, tick});
      std::map<NodeId, Matrix> posterior;
      for (NodeId i = 1; i <= 3; ++i) posterior.emplace(i, filter->beliefs().at(i).P_post);
      tracker.update(topo, prior_info, posterior);
      if (tick < ticks) tracker.predict();
    }
  }

  // Monte-Carlo pass: same filter, fresh noise each replicate, sample the
  // joint second moment of the stacked posterior errors at the last tick.
  const int replicates = 4000;
  Matrix sampled = Matrix::Zero(12, 12);
  for (int rep = 0; rep < replicates; ++rep) {
    auto filter = make_filter(FilterKind::IFDKF, {}, initial);
    GaussianSource process(derive_stream_seed(500 + rep, StreamRole::kProcessNoise, 0));
    GaussianSource meas(derive_stream_seed(500 + rep, StreamRole::kMeasurementNoise, 1));
    Vector truth = x0;
    for (int tick = 1; tick <= ticks; ++tick) {
      truth = step_truth(model, truth, process);
      std::map<NodeId, Vector> z{{1, *measure(model.sensor(1), truth, meas)}};
      filter->step(TickInputs{model, topo, z, tick});
    }
    Vector stacked(12);
    for (NodeId i = 1; i <= 3; ++i) {
      stacked.segment(4 * (i - 1), 4) = filter->beliefs().at(i).x_post - truth;
    }
    sampled += stacked * stacked.transpose();
  }
  sampled /= replicates;

  const double scale = tracker.joint().cwiseAbs().maxCoeff();
  CHECK(scale > 0.0);
  CHECK((sampled - tracker.joint()).cwiseAbs().maxCoeff() < 0.12 * scale);
}
