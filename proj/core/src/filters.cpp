#include "dkf/filters.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "dkf/errors.hpp"
#include "dkf/linalg.hpp"

namespace dkf {

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::CKF: return "CKF";
    case FilterKind::LKF: return "LKF";
    case FilterKind::KCF: return "KCF";
    case FilterKind::GKCF: return "GKCF";
    case FilterKind::ICF: return "ICF";
    case FilterKind::IFDKF: return "IFDKF";
  }
  return "?";
}

std::optional<FilterKind> filter_kind_from_string(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "CKF") return FilterKind::CKF;
  if (upper == "LKF") return FilterKind::LKF;
  if (upper == "KCF") return FilterKind::KCF;
  if (upper == "GKCF") return FilterKind::GKCF;
  if (upper == "ICF") return FilterKind::ICF;
  if (upper == "IFDKF") return FilterKind::IFDKF;
  return std::nullopt;
}

std::pair<Vector, Matrix> wls_estimate(const Matrix& H, const Matrix& W, const Vector& z) {
  if (H.rows() != W.rows() || W.rows() != W.cols() || H.rows() != z.size()) {
    throw ConfigError("wls_estimate: dimension mismatch");
  }
  const Matrix HtW = H.transpose() * W;
  const Matrix normal = symmetrize(HtW * H);
  Eigen::LLT<Matrix> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("wls_estimate: normal matrix is singular (instance not observable)");
  }
  const Matrix P = symmetrize(llt.solve(Matrix::Identity(normal.rows(), normal.cols())));
  return {P * (HtW * z), P};
}

void kf_update(NodeBelief& b, const Matrix& S, const Vector& y, std::string_view context) {
  const Matrix prior_info = invert_spd(b.P_prior, context);
  b.P_post = invert_spd(S + prior_info, context);
  b.x_post = b.P_post * (y + prior_info * b.x_prior);
}

void kf_predict(NodeBelief& b, const Matrix& A, const Matrix& BQBt) {
  b.x_prior = A * b.x_post;
  b.P_prior = symmetrize(A * b.P_post * A.transpose() + BQBt);
}

void ifdkf_update(NodeBelief& b, std::span<const ExchangeMessage> inbox,
                  std::string_view context) {
  if (inbox.empty()) {
    throw ConfigError(std::string(context) + ": inbox must contain the node's own message");
  }
  const Eigen::Index n = b.x_prior.size();
  Matrix info_sum = Matrix::Zero(n, n);        // sum of S_j
  Vector meas_sum = Vector::Zero(n);           // sum of y_j
  Matrix prior_info_sum = Matrix::Zero(n, n);  // sum of P_j^-1
  Vector prior_mean_sum = Vector::Zero(n);     // sum of P_j^-1 x_j
  for (const ExchangeMessage& msg : inbox) {
    info_sum += msg.S;
    meas_sum += msg.y;
    const Matrix sender_info =
        invert_spd(msg.P_prior, std::string(context) + ": prior covariance from node " +
                                    std::to_string(msg.sender));
    prior_info_sum += sender_info;
    prior_mean_sum += sender_info * msg.x_prior;
  }
  const double weight = 1.0 / static_cast<double>(inbox.size());
  b.P_post = invert_spd(info_sum + weight * prior_info_sum, context);
  b.x_post = b.P_post * (meas_sum + weight * prior_mean_sum);
}

namespace {

std::pair<Matrix, Vector> node_information(const TickInputs& in, NodeId node) {
  const SensorModel& sensor = in.model.sensor(node);
  auto it = in.measurements.find(node);
  if (it != in.measurements.end()) {
    return information_pair(sensor, it->second);
  }
  const Eigen::Index n = in.model.state_dim();
  return {Matrix::Zero(n, n), Vector::Zero(n)};
}

class CkfFilter final : public Filter {
 public:
  explicit CkfFilter(std::map<NodeId, NodeBelief> initial) : beliefs_(std::move(initial)) {}

  FilterKind kind() const override { return FilterKind::CKF; }

  void step(const TickInputs& in) override {
    const Eigen::Index n = in.model.state_dim();
    Matrix S = Matrix::Zero(n, n);
    Vector y = Vector::Zero(n);
    for (const auto& [node, z] : in.measurements) {
      if (!in.topology.is_alive(node)) continue;
      const auto [Si, yi] = information_pair(in.model.sensor(node), z);
      S += Si;
      y += yi;
    }
    NodeBelief& b = beliefs_.at(kCentralNode);
    kf_update(b, S, y, "CKF");
    kf_predict(b, in.model.A, in.model.BQBt);
  }

  const std::map<NodeId, NodeBelief>& beliefs() const override { return beliefs_; }

 private:
  std::map<NodeId, NodeBelief> beliefs_;
};

class LkfFilter final : public Filter {
 public:
  explicit LkfFilter(std::map<NodeId, NodeBelief> initial) : beliefs_(std::move(initial)) {}

  FilterKind kind() const override { return FilterKind::LKF; }

  void step(const TickInputs& in) override {
    for (auto& [node, b] : beliefs_) {
      if (!in.topology.is_alive(node)) continue;
      const auto [S, y] = node_information(in, node);
      kf_update(b, S, y, "LKF node " + std::to_string(node));
      kf_predict(b, in.model.A, in.model.BQBt);
    }
  }

  const std::map<NodeId, NodeBelief>& beliefs() const override { return beliefs_; }

 private:
  std::map<NodeId, NodeBelief> beliefs_;
};

// Shared send/receive/update/predict skeleton for the neighbor-exchanging
// filters. Messages are snapshotted before any update runs, so within a tick
// every node sees its neighbors' pre-update priors.
class ExchangeFilter : public Filter {
 public:
  explicit ExchangeFilter(std::map<NodeId, NodeBelief> initial) : beliefs_(std::move(initial)) {}

  void step(const TickInputs& in) final {
    std::map<NodeId, ExchangeMessage> outbox;
    for (auto& [node, b] : beliefs_) {
      if (!in.topology.is_alive(node)) continue;
      ExchangeMessage msg;
      msg.sender = node;
      std::tie(msg.S, msg.y) = node_information(in, node);
      msg.x_prior = b.x_prior;
      msg.P_prior = b.P_prior;
      outbox.emplace(node, std::move(msg));
    }
    for (auto& [node, b] : beliefs_) {
      if (!in.topology.is_alive(node)) continue;
      std::vector<ExchangeMessage> inbox;  // ordered by sender id
      for (NodeId j : inclusive_neighborhood(in.topology, node)) {
        auto it = outbox.find(j);
        if (it != outbox.end()) inbox.push_back(it->second);
      }
      update_node(node, b, inbox, in);
    }
    for (auto& [node, b] : beliefs_) {
      if (!in.topology.is_alive(node)) continue;
      kf_predict(b, in.model.A, in.model.BQBt);
    }
  }

  const std::map<NodeId, NodeBelief>& beliefs() const final { return beliefs_; }

 protected:
  virtual void update_node(NodeId node, NodeBelief& b,
                           const std::vector<ExchangeMessage>& inbox,
                           const TickInputs& in) = 0;

  std::map<NodeId, NodeBelief> beliefs_;
};

class IfdkfFilter final : public ExchangeFilter {
 public:
  using ExchangeFilter::ExchangeFilter;

  FilterKind kind() const override { return FilterKind::IFDKF; }

 protected:
  void update_node(NodeId node, NodeBelief& b, const std::vector<ExchangeMessage>& inbox,
                   const TickInputs&) override {
    ifdkf_update(b, inbox, "IFDKF node " + std::to_string(node));
  }
};

class KcfFilter final : public ExchangeFilter {
 public:
  KcfFilter(std::map<NodeId, NodeBelief> initial, double epsilon)
      : ExchangeFilter(std::move(initial)), epsilon_(epsilon) {}

  FilterKind kind() const override { return FilterKind::KCF; }

 protected:
  void update_node(NodeId node, NodeBelief& b, const std::vector<ExchangeMessage>& inbox,
                   const TickInputs&) override {
    const std::string ctx = "KCF node " + std::to_string(node);
    const Eigen::Index n = b.x_prior.size();
    Matrix S = Matrix::Zero(n, n);
    Vector y = Vector::Zero(n);
    Vector disagreement = Vector::Zero(n);
    for (const ExchangeMessage& msg : inbox) {
      S += msg.S;
      y += msg.y;
      if (msg.sender != node) disagreement += msg.x_prior - b.x_prior;
    }
    const Matrix prior_info = invert_spd(b.P_prior, ctx);
    b.P_post = invert_spd(S + prior_info, ctx);
    // Neighborhood innovation plus an equally weighted consensus pull whose
    // gain shrinks as the node's own uncertainty grows.
    const double gain = epsilon_ / (1.0 + b.P_prior.norm());
    b.x_post = b.x_prior + b.P_post * (y - S * b.x_prior) + gain * (b.P_prior * disagreement);
  }

 private:
  double epsilon_;
};

class GkcfFilter final : public ExchangeFilter {
 public:
  GkcfFilter(std::map<NodeId, NodeBelief> initial, double epsilon)
      : ExchangeFilter(std::move(initial)), epsilon_(epsilon) {}

  FilterKind kind() const override { return FilterKind::GKCF; }

 protected:
  void update_node(NodeId node, NodeBelief& b, const std::vector<ExchangeMessage>& inbox,
                   const TickInputs&) override {
    const std::string ctx = "GKCF node " + std::to_string(node);
    const Eigen::Index n = b.x_prior.size();
    // Covariance-weighted consensus over priors in information form, then the
    // neighborhood measurement update on the fused prior.
    const Matrix own_info = invert_spd(b.P_prior, ctx);
    const Vector own_vec = own_info * b.x_prior;
    Matrix S = Matrix::Zero(n, n);
    Vector y = Vector::Zero(n);
    Matrix info_shift = Matrix::Zero(n, n);
    Vector vec_shift = Vector::Zero(n);
    for (const ExchangeMessage& msg : inbox) {
      S += msg.S;
      y += msg.y;
      if (msg.sender == node) continue;
      const Matrix neighbor_info = invert_spd(
          msg.P_prior, ctx + ": prior covariance from node " + std::to_string(msg.sender));
      info_shift += neighbor_info - own_info;
      vec_shift += neighbor_info * msg.x_prior - own_vec;
    }
    const Matrix fused_info = own_info + epsilon_ * info_shift;
    const Vector fused_vec = own_vec + epsilon_ * vec_shift;
    b.P_post = invert_spd(S + fused_info, ctx);
    b.x_post = b.P_post * (y + fused_vec);
  }

 private:
  double epsilon_;
};

class IcfFilter final : public ExchangeFilter {
 public:
  IcfFilter(std::map<NodeId, NodeBelief> initial, double epsilon, int node_count)
      : ExchangeFilter(std::move(initial)), epsilon_(epsilon), node_count_(node_count) {}

  FilterKind kind() const override { return FilterKind::ICF; }

 protected:
  void update_node(NodeId node, NodeBelief& b, const std::vector<ExchangeMessage>& inbox,
                   const TickInputs&) override {
    const std::string ctx = "ICF node " + std::to_string(node);
    const Eigen::Index n = b.x_prior.size();
    const double inv_count = 1.0 / static_cast<double>(node_count_);

    // Per-sender information pairs V_j = P_j^-1/N + S_j, u_j = P_j^-1 x_j/N + y_j.
    Matrix own_V;
    Vector own_u;
    std::vector<std::pair<Matrix, Vector>> others;
    others.reserve(inbox.size());
    for (const ExchangeMessage& msg : inbox) {
      const Matrix prior_info = invert_spd(
          msg.P_prior, ctx + ": prior covariance from node " + std::to_string(msg.sender));
      Matrix V = inv_count * prior_info + msg.S;
      Vector u = inv_count * (prior_info * msg.x_prior) + msg.y;
      if (msg.sender == node) {
        own_V = std::move(V);
        own_u = std::move(u);
      } else {
        others.emplace_back(std::move(V), std::move(u));
      }
    }
    if (own_V.rows() != n) {
      throw ConfigError(ctx + ": inbox is missing the node's own message");
    }

    // One consensus sweep, then scale back up by the configured node count.
    Matrix V = own_V;
    Vector u = own_u;
    for (const auto& [Vj, uj] : others) {
      V += epsilon_ * (Vj - own_V);
      u += epsilon_ * (uj - own_u);
    }
    const Matrix V_inv = invert_spd(V, ctx);
    b.x_post = V_inv * u;
    b.P_post = inv_count * V_inv;
  }

 private:
  double epsilon_;
  int node_count_;
};

}  // namespace

std::unique_ptr<Filter> make_filter(FilterKind kind, const FilterParams& params,
                                    const std::map<NodeId, NodeBelief>& initial) {
  const auto consensus_epsilon = [&]() -> double {
    if (!params.epsilon) {
      throw ConfigError(std::string(to_string(kind)) + ": consensus step size required");
    }
    if (*params.epsilon < 0.0) {
      throw ConfigError(std::string(to_string(kind)) + ": consensus step size must be >= 0");
    }
    return *params.epsilon;
  };

  switch (kind) {
    case FilterKind::CKF:
      if (initial.size() != 1 || !initial.contains(kCentralNode)) {
        throw ConfigError("CKF: expected a single belief keyed by the central node id");
      }
      return std::make_unique<CkfFilter>(initial);
    case FilterKind::LKF:
      return std::make_unique<LkfFilter>(initial);
    case FilterKind::KCF:
      return std::make_unique<KcfFilter>(initial, consensus_epsilon());
    case FilterKind::GKCF:
      return std::make_unique<GkcfFilter>(initial, consensus_epsilon());
    case FilterKind::ICF: {
      const double eps = consensus_epsilon();
      if (!params.node_count || *params.node_count < 1) {
        throw ConfigError("ICF: node count must be >= 1");
      }
      return std::make_unique<IcfFilter>(initial, eps, *params.node_count);
    }
    case FilterKind::IFDKF:
      return std::make_unique<IfdkfFilter>(initial);
  }
  throw ConfigError("unknown filter kind");
}

}  // namespace dkf
