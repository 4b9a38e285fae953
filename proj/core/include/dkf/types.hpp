#pragma once

#include <Eigen/Dense>

namespace dkf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using NodeId = int;

// Trace node id used by the centralized filter, which keeps one global belief
// instead of per-node ones. Regular nodes are numbered from 1.
inline constexpr NodeId kCentralNode = 0;

}  // namespace dkf
