#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dkf/filters.hpp"
#include "dkf/graph.hpp"
#include "dkf/model.hpp"

namespace dkf {

// Initial node beliefs: the leading position_dims state components are drawn
// uniformly from [prior_low, prior_high], the rest start at zero. Every
// filter in a run receives the same draws; the centralized filter starts at
// their mean.
struct InitSpec {
  double prior_low = 0.0;
  double prior_high = 500.0;
  int position_dims = 2;
  Matrix P0;  // defaults to 1e4 * I when left empty
};

struct FilterSpec {
  FilterKind kind = FilterKind::IFDKF;
  // Missing epsilon resolves to 0.65 / max degree of the initial topology and
  // is then held fixed across topology events. Missing ICF node_count
  // defaults to the initial node count.
  FilterParams params;
};

struct Scenario {
  std::string name = "custom";
  LinearModel model;
  Topology topology;
  EventSchedule schedule;
  int ticks = 150;
  std::vector<FilterSpec> filters;
  InitSpec init;
  std::uint64_t seed = 1;
  Vector x0;                  // truth start; defaults to the origin
  bool noise_enabled = true;  // tests switch this off for exact fixed-point checks

  // Validates and normalizes in place (model factors, default P0 and x0,
  // epsilon resolution, ICF node count, sensor coverage). Returns warnings.
  std::vector<std::string> validate();
};

// One trace row per (tick, filter, alive node); the CKF emits a single row
// per tick under kCentralNode. After a filter hits a numerical failure its
// remaining rows carry failed=true and NaN values instead of fabricated ones.
struct TickTrace {
  int tick = 0;
  FilterKind filter = FilterKind::CKF;
  NodeId node = 0;
  Vector truth;
  Vector estimate;
  Vector abs_error;  // |estimate - truth|, componentwise
  double cov_trace = 0.0;
  bool failed = false;
};

// Inspection hook for tests and diagnostics; never affects the run.
class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_posterior(int /*tick*/, FilterKind /*kind*/, NodeId /*node*/,
                            const NodeBelief& /*belief*/) {}
  virtual void on_failure(int /*tick*/, FilterKind /*kind*/, const std::string& /*what*/) {}
};

struct RunResult {
  std::vector<TickTrace> traces;             // ordered by (tick, filter, node)
  std::vector<std::string> failures;         // one entry per filter that went bad
};

// Deterministic scenario run: per tick, apply events, advance truth, draw
// measurements once, then step every filter on the same inputs.
// Bit-reproducible for a given seed.
RunResult run(const Scenario& scenario, RunObserver* observer = nullptr);

// Bundled experiment setups: dense-tracking, chain, switch-at-65, fail-at-65.
Scenario scenario_preset(std::string_view name);
std::vector<std::string> scenario_preset_names();
std::string scenario_preset_description(std::string_view name);

struct EpochReport {
  int first_tick = 1;
  int last_tick = 0;  // inclusive
  Topology topology;
  NaivetyReport naivety;
  int max_degree = 0;
  bool connected = false;
};

// Static topology and naivety analysis, one report per schedule epoch.
// Runs no simulation and draws no randomness.
std::vector<EpochReport> analyze_epochs(const Scenario& scenario);

}  // namespace dkf
