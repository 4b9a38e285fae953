#include "dkf/sim.hpp"

#include <limits>
#include <set>
#include <string>
#include <utility>

#include "dkf/errors.hpp"
#include "dkf/linalg.hpp"

namespace dkf {
namespace {

constexpr double kDefaultPriorVariance = 1e4;
constexpr double kDefaultEpsilonFactor = 0.65;

bool needs_epsilon(FilterKind kind) {
  return kind == FilterKind::KCF || kind == FilterKind::GKCF || kind == FilterKind::ICF;
}

// Constant-velocity target watched by position sensors at `observers`;
// everyone else never observes.
LinearModel tracking_model(const std::set<NodeId>& observers, int node_count) {
  LinearModel m;
  m.A = Matrix{{1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  m.B = Matrix::Identity(4, 4);
  m.Q = Vector{{10, 10, 1, 1}}.asDiagonal();
  Matrix H{{1, 0, 0, 0}, {0, 1, 0, 0}};
  const Matrix R = 100.0 * Matrix::Identity(2, 2);
  for (NodeId i = 1; i <= node_count; ++i) {
    if (observers.contains(i)) {
      m.sensors.emplace(i, SensorModel::linear(H, R));
    } else {
      m.sensors.emplace(i, SensorModel::none(4));
    }
  }
  return m;
}

}  // namespace

std::vector<std::string> Scenario::validate() {
  std::vector<std::string> warnings;
  model.validate();
  if (topology.node_count < 1) throw ConfigError("topology: at least one node required");
  if (topology.alive.empty()) throw ConfigError("topology: at least one alive node required");
  if (ticks < 1) throw ConfigError("ticks: must be >= 1");
  if (filters.empty()) throw ConfigError("filters: at least one filter required");
  schedule.validate(topology.node_count);

  const Eigen::Index n = model.state_dim();
  for (const auto& [id, sensor] : model.sensors) {
    (void)sensor;
    if (id < 1 || id > topology.node_count) {
      throw ConfigError("model.sensors: node id " + std::to_string(id) +
                        " outside the topology");
    }
  }
  for (NodeId i = 1; i <= topology.node_count; ++i) {
    if (!model.sensors.contains(i)) model.sensors.emplace(i, SensorModel::none(n));
  }

  if (x0.size() == 0) x0 = Vector::Zero(n);
  if (x0.size() != n) throw ConfigError("x0: dimension must match the state");

  if (init.P0.size() == 0) init.P0 = kDefaultPriorVariance * Matrix::Identity(n, n);
  if (init.P0.rows() != n || init.P0.cols() != n) {
    throw ConfigError("init.P0: must match the state dimension");
  }
  if (!is_spd(init.P0)) throw ConfigError("init.P0: must be symmetric positive definite");
  if (init.position_dims < 0 || init.position_dims > n) {
    throw ConfigError("init.position_dims: out of range");
  }
  if (init.prior_high < init.prior_low) {
    throw ConfigError("init.prior_range: high must be >= low");
  }

  const int dmax = max_degree(topology);
  std::set<FilterKind> seen;
  for (FilterSpec& spec : filters) {
    if (!seen.insert(spec.kind).second) {
      throw ConfigError("filters: duplicate " + std::string(to_string(spec.kind)));
    }
    if (needs_epsilon(spec.kind)) {
      if (!spec.params.epsilon) {
        spec.params.epsilon = dmax > 0 ? kDefaultEpsilonFactor / dmax : 0.0;
      } else {
        if (*spec.params.epsilon <= 0.0) {
          throw ConfigError(std::string(to_string(spec.kind)) + ".epsilon: must be positive");
        }
        if (dmax > 0 && *spec.params.epsilon >= 1.0 / dmax) {
          warnings.push_back(std::string(to_string(spec.kind)) + ".epsilon: " +
                             std::to_string(*spec.params.epsilon) +
                             " is >= 1/max_degree; expect degraded convergence");
        }
      }
    }
    if (spec.kind == FilterKind::ICF) {
      if (!spec.params.node_count) spec.params.node_count = topology.node_count;
      if (*spec.params.node_count < 1) throw ConfigError("ICF.nodes: must be >= 1");
    }
  }
  return warnings;
}

RunResult run(const Scenario& scenario, RunObserver* observer) {
  Scenario s = scenario;
  s.validate();

  const Eigen::Index n = s.model.state_dim();
  const int node_count = s.topology.node_count;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  GaussianSource process_noise =
      s.noise_enabled
          ? GaussianSource(derive_stream_seed(s.seed, StreamRole::kProcessNoise, 0))
          : GaussianSource::zeros();
  std::map<NodeId, GaussianSource> measurement_noise;
  for (NodeId i = 1; i <= node_count; ++i) {
    measurement_noise.emplace(
        i, s.noise_enabled
               ? GaussianSource(derive_stream_seed(s.seed, StreamRole::kMeasurementNoise,
                                                   static_cast<std::uint64_t>(i)))
               : GaussianSource::zeros());
  }

  // Identical initial beliefs for every filter in the run.
  std::map<NodeId, NodeBelief> node_init;
  for (NodeId i = 1; i <= node_count; ++i) {
    UniformSource prior_stream(
        derive_stream_seed(s.seed, StreamRole::kInitialPrior, static_cast<std::uint64_t>(i)));
    Vector x = Vector::Zero(n);
    for (int d = 0; d < s.init.position_dims; ++d) {
      x[d] = prior_stream.next(s.init.prior_low, s.init.prior_high);
    }
    NodeBelief b;
    b.x_prior = x;
    b.P_prior = s.init.P0;
    b.x_post = x;
    b.P_post = s.init.P0;
    node_init.emplace(i, std::move(b));
  }

  NodeBelief central;
  central.x_prior = Vector::Zero(n);
  for (const auto& [id, b] : node_init) {
    (void)id;
    central.x_prior += b.x_prior;
  }
  central.x_prior /= static_cast<double>(node_count);
  central.P_prior = s.init.P0;
  central.x_post = central.x_prior;
  central.P_post = central.P_prior;
  const std::map<NodeId, NodeBelief> central_init{{kCentralNode, central}};

  struct Lane {
    FilterSpec spec;
    std::unique_ptr<Filter> filter;
    bool failed = false;
  };
  std::vector<Lane> lanes;
  lanes.reserve(s.filters.size());
  for (const FilterSpec& spec : s.filters) {
    const auto& initial = spec.kind == FilterKind::CKF ? central_init : node_init;
    lanes.push_back({spec, make_filter(spec.kind, spec.params, initial), false});
  }

  RunResult result;
  result.traces.reserve(static_cast<std::size_t>(s.ticks) * lanes.size() *
                        static_cast<std::size_t>(node_count));

  Topology topo = s.topology;
  Vector truth = s.x0;

  for (int tick = 1; tick <= s.ticks; ++tick) {
    topo = apply_events(topo, s.schedule, tick);
    truth = step_truth(s.model, truth, process_noise);

    std::map<NodeId, Vector> measurements;
    for (NodeId i : topo.alive) {
      if (auto z = measure(s.model.sensor(i), truth, measurement_noise.at(i))) {
        measurements.emplace(i, std::move(*z));
      }
    }

    const TickInputs inputs{s.model, topo, measurements, tick};
    for (Lane& lane : lanes) {
      if (!lane.failed) {
        try {
          lane.filter->step(inputs);
        } catch (const NumericalError& e) {
          lane.failed = true;
          std::string what = "tick " + std::to_string(tick) + " " +
                             std::string(to_string(lane.spec.kind)) + ": " + e.what();
          result.failures.push_back(what);
          if (observer) observer->on_failure(tick, lane.spec.kind, what);
        }
      }

      const auto emit = [&](NodeId node) {
        TickTrace row;
        row.tick = tick;
        row.filter = lane.spec.kind;
        row.node = node;
        row.truth = truth;
        if (lane.failed) {
          row.estimate = Vector::Constant(n, nan);
          row.abs_error = Vector::Constant(n, nan);
          row.cov_trace = nan;
          row.failed = true;
        } else {
          const NodeBelief& b = lane.filter->beliefs().at(node);
          row.estimate = b.x_post;
          row.abs_error = (b.x_post - truth).cwiseAbs();
          row.cov_trace = b.P_post.trace();
          if (observer) observer->on_posterior(tick, lane.spec.kind, node, b);
        }
        result.traces.push_back(std::move(row));
      };

      if (lane.spec.kind == FilterKind::CKF) {
        emit(kCentralNode);
      } else {
        for (NodeId i : topo.alive) emit(i);
      }
    }
  }
  return result;
}

Scenario scenario_preset(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  s.ticks = 150;
  if (name == "dense-tracking") {
    s.model = tracking_model({1}, 6);
    s.topology = topology_preset("dense-A");
    s.filters = {{FilterKind::CKF, {}},  {FilterKind::LKF, {}}, {FilterKind::KCF, {}},
                 {FilterKind::GKCF, {}}, {FilterKind::ICF, {}}, {FilterKind::IFDKF, {}}};
  } else if (name == "chain") {
    s.model = tracking_model({1}, 6);
    s.topology = topology_preset("chain");
    s.filters = {{FilterKind::CKF, {}},
                 {FilterKind::GKCF, {}},
                 {FilterKind::ICF, {}},
                 {FilterKind::IFDKF, {}}};
  } else if (name == "switch-at-65") {
    s.model = tracking_model({1}, 6);
    s.topology = topology_preset("dense-B");
    s.schedule.events.push_back({65, SwitchTopology{topology_preset("chain").edges}});
    s.filters = {{FilterKind::CKF, {}}, {FilterKind::ICF, {}}, {FilterKind::IFDKF, {}}};
  } else if (name == "fail-at-65") {
    s.model = tracking_model({2, 3}, 6);
    s.topology = topology_preset("dense-B");
    s.schedule.events.push_back({65, FailNodes{{5, 6}}});
    s.filters = {{FilterKind::CKF, {}}, {FilterKind::ICF, {}}, {FilterKind::IFDKF, {}}};
  } else {
    throw ConfigError("unknown scenario preset '" + std::string(name) + "'");
  }
  return s;
}

std::vector<std::string> scenario_preset_names() {
  return {"dense-tracking", "chain", "switch-at-65", "fail-at-65"};
}

std::string scenario_preset_description(std::string_view name) {
  if (name == "dense-tracking") {
    return "dense 6-node graph, node 1 observes; CKF/LKF/KCF/GKCF/ICF/IFDKF, 150 ticks";
  }
  if (name == "chain") {
    return "path 1-2-3-4-5-6, node 1 observes; CKF/GKCF/ICF/IFDKF, 150 ticks";
  }
  if (name == "switch-at-65") {
    return "dense-B graph switching to the chain at tick 65, node 1 observes; CKF/ICF/IFDKF";
  }
  if (name == "fail-at-65") {
    return "dense-B graph, nodes 2 and 3 observe, nodes 5 and 6 fail at tick 65; CKF/ICF/IFDKF";
  }
  throw ConfigError("unknown scenario preset '" + std::string(name) + "'");
}

std::vector<EpochReport> analyze_epochs(const Scenario& scenario) {
  Scenario s = scenario;
  s.validate();

  std::vector<EpochReport> epochs;
  Topology topo = s.topology;
  int epoch_start = 1;

  const auto close_epoch = [&](int last_tick) {
    EpochReport report;
    report.first_tick = epoch_start;
    report.last_tick = last_tick;
    report.topology = topo;
    report.naivety = classify_naive(topo, s.model);
    report.max_degree = topo.alive.empty() ? 0 : max_degree(topo);
    report.connected = is_connected(topo);
    epochs.push_back(std::move(report));
  };

  for (const auto& entry : s.schedule.events) {
    if (entry.tick > s.ticks) break;
    if (entry.tick > epoch_start) {
      close_epoch(entry.tick - 1);
      epoch_start = entry.tick;
    }
    topo = apply_event(topo, entry.event);
  }
  close_epoch(s.ticks);
  return epochs;
}

}  // namespace dkf
