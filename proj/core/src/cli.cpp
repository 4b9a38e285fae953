#include "dkf/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <future>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dkf/config.hpp"
#include "dkf/errors.hpp"
#include "dkf/metrics.hpp"
#include "dkf/sim.hpp"

namespace dkf::cli {
namespace {

namespace fs = std::filesystem;

struct LoadedScenario {
  Scenario scenario;
  std::optional<std::string> out_dir;
  std::optional<int> seeds;
};

LoadedScenario load(const std::string& preset, const std::string& config_path) {
  if (!preset.empty() && !config_path.empty()) {
    throw ConfigError("use either --preset or --config, not both");
  }
  if (preset.empty() && config_path.empty()) {
    throw ConfigError("one of --preset or --config is required");
  }
  if (!preset.empty()) return {scenario_preset(preset), std::nullopt, std::nullopt};
  ScenarioConfig cfg = load_scenario_config(config_path);
  return {std::move(cfg.scenario), std::move(cfg.out_dir), cfg.seeds};
}

std::vector<FilterSpec> parse_filter_list(const std::string& list,
                                          const std::vector<FilterSpec>& existing) {
  std::vector<FilterSpec> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto kind = filter_kind_from_string(item);
    if (!kind) throw ConfigError("--filters: unknown filter '" + item + "'");
    FilterSpec spec;
    spec.kind = *kind;
    for (const FilterSpec& prev : existing) {
      if (prev.kind == *kind) spec.params = prev.params;  // keep configured params
    }
    out.push_back(spec);
  }
  if (out.empty()) throw ConfigError("--filters: empty list");
  return out;
}

void apply_epsilon_override(Scenario& s, const std::string& value) {
  std::optional<double> epsilon;
  if (value != "auto") {
    try {
      std::size_t consumed = 0;
      epsilon = std::stod(value, &consumed);
      if (consumed != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ConfigError("--epsilon: expected a number or 'auto'");
    }
  }
  for (FilterSpec& spec : s.filters) {
    if (spec.kind == FilterKind::KCF || spec.kind == FilterKind::GKCF ||
        spec.kind == FilterKind::ICF) {
      spec.params.epsilon = epsilon;  // nullopt = auto, resolved at validation
    }
  }
}

std::string format_mae(const Vector& mae) {
  std::string out = "[";
  char buf[32];
  for (Eigen::Index i = 0; i < mae.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6g", mae[i]);
    if (i > 0) out += ' ';
    out += buf;
  }
  out += ']';
  return out;
}

Vector summary_time_average(const std::vector<SummaryRow>& rows, FilterKind kind) {
  Vector acc;
  int count = 0;
  for (const SummaryRow& row : rows) {
    if (row.filter != kind) continue;
    if (count == 0) acc = Vector::Zero(row.mae.size());
    acc += row.mae;
    ++count;
  }
  if (count == 0) throw TraceError("no summary rows for " + std::string(to_string(kind)));
  return acc / static_cast<double>(count);
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    LoadedScenario loaded = load(opt.preset, opt.config_path);
    Scenario& scenario = loaded.scenario;

    if (opt.ticks) scenario.ticks = *opt.ticks;
    if (opt.seed) scenario.seed = *opt.seed;
    if (opt.filters) scenario.filters = parse_filter_list(*opt.filters, scenario.filters);
    if (opt.epsilon) apply_epsilon_override(scenario, *opt.epsilon);

    const int seeds = opt.seeds ? *opt.seeds : loaded.seeds.value_or(1);
    if (seeds < 1) throw ConfigError("--seeds: must be >= 1");
    const fs::path out_dir = opt.out_dir ? *opt.out_dir : loaded.out_dir.value_or(".");

    for (const std::string& warning : scenario.validate()) {
      err << "warning: " << warning << "\n";
    }
    fs::create_directories(out_dir);

    const Eigen::Index n = scenario.model.state_dim();
    std::vector<FilterKind> kinds;
    for (const FilterSpec& spec : scenario.filters) kinds.push_back(spec.kind);

    bool any_failure = false;
    std::vector<SummaryRow> summary;

    if (seeds == 1) {
      const RunResult result = run(scenario);
      any_failure = !result.failures.empty();
      for (const std::string& failure : result.failures) {
        err << "numerical failure: " << failure << "\n";
      }
      for (FilterKind kind : kinds) {
        std::vector<TickTrace> subset;
        for (const TickTrace& row : result.traces) {
          if (row.filter == kind) subset.push_back(row);
        }
        const fs::path path = out_dir / (scenario.name + "_" + std::string(to_string(kind)) +
                                         "_" + std::to_string(scenario.seed) + ".csv");
        emit_trace_csv(subset, path, n);
      }
      summary = summarize(result.traces, kinds);
    } else {
      // Seeds run concurrently; a single collector aggregates in seed order.
      std::vector<std::future<RunResult>> futures;
      futures.reserve(static_cast<std::size_t>(seeds));
      for (int i = 0; i < seeds; ++i) {
        Scenario copy = scenario;
        copy.seed = scenario.seed + static_cast<std::uint64_t>(i);
        futures.push_back(
            std::async(std::launch::async, [sc = std::move(copy)]() { return run(sc); }));
      }
      std::vector<std::vector<SummaryRow>> per_seed;
      per_seed.reserve(futures.size());
      for (auto& future : futures) {
        const RunResult result = future.get();
        for (const std::string& failure : result.failures) {
          any_failure = true;
          err << "numerical failure: " << failure << "\n";
        }
        per_seed.push_back(summarize(result.traces, kinds));
      }
      summary = cross_seed_mean(per_seed);
    }

    emit_summary_csv(summary, out_dir / (scenario.name + "_summary.csv"), n);
    for (FilterKind kind : kinds) {
      out << to_string(kind) << ": time-averaged MAE "
          << format_mae(summary_time_average(summary, kind)) << "\n";
    }
    return any_failure ? kExitNumericalError : kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    LoadedScenario loaded = load(opt.preset, opt.config_path);
    const std::vector<EpochReport> epochs = analyze_epochs(loaded.scenario);

    out << "scenario: " << loaded.scenario.name << "\n";
    for (std::size_t i = 0; i < epochs.size(); ++i) {
      const EpochReport& epoch = epochs[i];
      out << "epoch " << (i + 1) << ": ticks [" << epoch.first_tick << ", " << epoch.last_tick
          << "]\n";
      out << "  alive: " << epoch.topology.alive.size()
          << "; connected: " << (epoch.connected ? "yes" : "no")
          << "; max degree: " << epoch.max_degree << "\n";
      out << "  degrees:";
      for (NodeId node : epoch.topology.alive) {
        out << " |N_" << node << "|=" << neighborhood(epoch.topology, node).size();
      }
      out << "\n";
      out << "  naive: {";
      bool first = true;
      for (NodeId node : epoch.naivety.naive) {
        if (!first) out << ",";
        out << node;
        first = false;
      }
      out << "}\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_presets(std::ostream& out) {
  for (const std::string& name : scenario_preset_names()) {
    out << name << "  -  " << scenario_preset_description(name) << "\n";
  }
  return kExitOk;
}

}  // namespace dkf::cli
