#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>

#include "dkf/graph.hpp"
#include "dkf/model.hpp"
#include "dkf/types.hpp"

namespace dkf {

struct NodeBelief {
  Vector x_prior;  // estimate before the tick's update
  Matrix P_prior;  // its covariance
  Vector x_post;   // estimate after the update
  Matrix P_post;   // its covariance
};

// Everything a node broadcasts to its neighbors in one tick: its measurement
// in information form plus its prior estimate and covariance.
struct ExchangeMessage {
  NodeId sender = 0;
  Matrix S;  // H^T R^-1 H
  Vector y;  // H^T R^-1 z
  Vector x_prior;
  Matrix P_prior;
};

enum class FilterKind { CKF, LKF, KCF, GKCF, ICF, IFDKF };

std::string_view to_string(FilterKind kind);
std::optional<FilterKind> filter_kind_from_string(std::string_view name);

struct FilterParams {
  // Consensus step size for KCF/GKCF/ICF. Resolved before construction;
  // the IFDKF takes no parameters.
  std::optional<double> epsilon;
  // Network size assumed by the ICF. Frozen at setup and deliberately not
  // tracking node failures.
  std::optional<int> node_count;
};

// ---- shared estimation kernels ----

// Weighted least squares: P = (H^T W H)^-1, x = P H^T W z.
// Throws NumericalError when the normal matrix is singular (the instance is
// not observable).
std::pair<Vector, Matrix> wls_estimate(const Matrix& H, const Matrix& W, const Vector& z);

// Information-form measurement update:
//   P_post = (S + P_prior^-1)^-1,  x_post = P_post (y + P_prior^-1 x_prior).
// Taking (S, y) instead of (H, R, z) lets one kernel serve every filter.
void kf_update(NodeBelief& b, const Matrix& S, const Vector& y,
               std::string_view context = "kf_update");

// Prediction: x_prior' = A x_post, P_prior' = A P_post A^T + BQBt.
void kf_predict(NodeBelief& b, const Matrix& A, const Matrix& BQBt);

// Fully distributed update from the inclusive-neighborhood inbox (the node's
// own message included):
//   P_post = (sum S_j + (1/|J|) sum P_j^-1)^-1
//   x_post = P_post (sum y_j + (1/|J|) sum P_j^-1 x_j)
// A singleton inbox reduces this to kf_update on the node's own pair.
void ifdkf_update(NodeBelief& b, std::span<const ExchangeMessage> inbox,
                  std::string_view context = "ifdkf_update");

// ---- per-tick driver ----

// Immutable inputs shared by every filter within one tick: the same truth and
// the same measurement draw, so trace differences are attributable to the
// algorithm alone.
struct TickInputs {
  const LinearModel& model;
  const Topology& topology;
  const std::map<NodeId, Vector>& measurements;  // z per observing alive node
  int tick = 0;
};

class Filter {
 public:
  virtual ~Filter() = default;

  virtual FilterKind kind() const = 0;

  // One synchronous tick: measurement intake, neighbor exchange (messages are
  // snapshotted before any update runs), posterior update, then prediction.
  // Dead nodes are skipped entirely. Throws NumericalError on degeneracy.
  virtual void step(const TickInputs& in) = 0;

  // Beliefs after the latest step, keyed by node id (kCentralNode for the
  // CKF). Entries for dead nodes go stale and must be ignored by callers.
  virtual const std::map<NodeId, NodeBelief>& beliefs() const = 0;
};

// `initial` carries one belief per node; the CKF expects a single belief
// keyed by kCentralNode. KCF/GKCF/ICF require params.epsilon (>= 0), the ICF
// additionally params.node_count.
std::unique_ptr<Filter> make_filter(FilterKind kind, const FilterParams& params,
                                    const std::map<NodeId, NodeBelief>& initial);

}  // namespace dkf
