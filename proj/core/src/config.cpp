#include "dkf/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dkf/errors.hpp"

namespace dkf {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ConfigError(path + ": " + why);
}

const json& require_key(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "required");
  return *it;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(path + "." + item.key(), "unknown key");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Vector parse_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  const std::size_t rows = j.size();
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) fail(path + "[0]", "expected an array of numbers");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) fail(row_path, "expected an array of numbers");
    if (j[r].size() != cols) fail(row_path, "all rows must have the same length");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_number(j[r][c], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

NodeId parse_node_key(const std::string& key, const std::string& path) {
  try {
    std::size_t consumed = 0;
    const int id = std::stoi(key, &consumed);
    if (consumed != key.size()) throw std::invalid_argument(key);
    return id;
  } catch (const std::exception&) {
    fail(path + "." + key, "sensor keys must be node ids");
  }
}

LinearModel parse_model(const json& j) {
  check_keys(j, "model", {"A", "B", "Q", "sensors"});
  LinearModel model;
  model.A = parse_matrix(require_key(j, "model", "A"), "model.A");
  model.B = parse_matrix(require_key(j, "model", "B"), "model.B");
  model.Q = parse_matrix(require_key(j, "model", "Q"), "model.Q");

  const json& sensors = require_key(j, "model", "sensors");
  if (!sensors.is_object()) fail("model.sensors", "expected an object keyed by node id");
  for (const auto& item : sensors.items()) {
    const NodeId id = parse_node_key(item.key(), "model.sensors");
    const std::string path = "model.sensors." + item.key();
    const json& entry = item.value();
    check_keys(entry, path, {"H", "R", "observes"});
    bool observes = true;
    if (entry.contains("observes")) observes = as_bool(entry["observes"], path + ".observes");
    if (!observes) {
      if (entry.contains("H") || entry.contains("R")) {
        fail(path, "a non-observing sensor must not define H or R");
      }
      model.sensors.emplace(id, SensorModel::none(model.A.rows()));
      continue;
    }
    SensorModel sensor = SensorModel::linear(parse_matrix(require_key(entry, path, "H"), path + ".H"),
                                             parse_matrix(require_key(entry, path, "R"), path + ".R"));
    model.sensors.emplace(id, std::move(sensor));
  }
  return model;
}

std::vector<std::pair<NodeId, NodeId>> parse_edge_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [i, j] pairs");
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string entry_path = path + "[" + std::to_string(i) + "]";
    const json& pair = j[i];
    if (!pair.is_array() || pair.size() != 2) fail(entry_path, "expected a pair [i, j]");
    edges.emplace_back(as_int(pair[0], entry_path + "[0]"), as_int(pair[1], entry_path + "[1]"));
  }
  return edges;
}

Topology parse_topology(const json& j) {
  check_keys(j, "topology", {"preset", "nodes", "edges"});
  if (j.contains("preset")) {
    if (j.contains("nodes") || j.contains("edges")) {
      fail("topology", "use either preset or nodes/edges, not both");
    }
    return topology_preset(as_string(j["preset"], "topology.preset"));
  }
  const int nodes = as_int(require_key(j, "topology", "nodes"), "topology.nodes");
  const auto edges = parse_edge_list(require_key(j, "topology", "edges"), "topology.edges");
  return Topology::from_edges(nodes, edges);
}

EventSchedule parse_schedule(const json& j) {
  if (!j.is_array()) fail("schedule", "expected an array of events");
  EventSchedule schedule;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "schedule[" + std::to_string(i) + "]";
    const json& entry = j[i];
    check_keys(entry, path, {"tick", "switch_to", "fail"});
    EventSchedule::Entry out;
    out.tick = as_int(require_key(entry, path, "tick"), path + ".tick");
    const bool has_switch = entry.contains("switch_to");
    const bool has_fail = entry.contains("fail");
    if (has_switch == has_fail) fail(path, "exactly one of switch_to or fail is required");
    if (has_switch) {
      const json& target = entry["switch_to"];
      check_keys(target, path + ".switch_to", {"preset", "edges"});
      SwitchTopology sw;
      if (target.contains("preset")) {
        if (target.contains("edges")) fail(path + ".switch_to", "use either preset or edges");
        sw.edges = topology_preset(as_string(target["preset"], path + ".switch_to.preset")).edges;
      } else {
        for (const auto& [a, b] :
             parse_edge_list(require_key(target, path + ".switch_to", "edges"),
                             path + ".switch_to.edges")) {
          sw.edges.insert(a < b ? std::pair{a, b} : std::pair{b, a});
        }
      }
      out.event = std::move(sw);
    } else {
      const json& ids = entry["fail"];
      if (!ids.is_array()) fail(path + ".fail", "expected an array of node ids");
      FailNodes fn;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        fn.nodes.insert(as_int(ids[k], path + ".fail[" + std::to_string(k) + "]"));
      }
      out.event = std::move(fn);
    }
    schedule.events.push_back(std::move(out));
  }
  return schedule;
}

InitSpec parse_init(const json& j, Eigen::Index state_dim) {
  check_keys(j, "init", {"prior_low", "prior_high", "position_dims", "P0", "P0_scale"});
  InitSpec init;
  if (j.contains("prior_low")) init.prior_low = as_number(j["prior_low"], "init.prior_low");
  if (j.contains("prior_high")) init.prior_high = as_number(j["prior_high"], "init.prior_high");
  if (j.contains("position_dims")) {
    init.position_dims = as_int(j["position_dims"], "init.position_dims");
  }
  if (j.contains("P0") && j.contains("P0_scale")) {
    fail("init", "use either P0 or P0_scale, not both");
  }
  if (j.contains("P0")) init.P0 = parse_matrix(j["P0"], "init.P0");
  if (j.contains("P0_scale")) {
    const double scale = as_number(j["P0_scale"], "init.P0_scale");
    init.P0 = scale * Matrix::Identity(state_dim, state_dim);
  }
  return init;
}

std::vector<FilterSpec> parse_filters(const json& j) {
  if (!j.is_array()) fail("filters", "expected an array");
  std::vector<FilterSpec> specs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "filters[" + std::to_string(i) + "]";
    const json& entry = j[i];
    FilterSpec spec;
    if (entry.is_string()) {
      const auto kind = filter_kind_from_string(entry.get<std::string>());
      if (!kind) fail(path, "unknown filter '" + entry.get<std::string>() + "'");
      spec.kind = *kind;
    } else {
      check_keys(entry, path, {"kind", "epsilon", "nodes"});
      const std::string name = as_string(require_key(entry, path, "kind"), path + ".kind");
      const auto kind = filter_kind_from_string(name);
      if (!kind) fail(path + ".kind", "unknown filter '" + name + "'");
      spec.kind = *kind;
      if (entry.contains("epsilon")) {
        const json& eps = entry["epsilon"];
        if (eps.is_string()) {
          if (eps.get<std::string>() != "auto") {
            fail(path + ".epsilon", "expected a number or \"auto\"");
          }
          // auto resolves at validation time
        } else {
          spec.params.epsilon = as_number(eps, path + ".epsilon");
        }
      }
      if (entry.contains("nodes")) {
        spec.params.node_count = as_int(entry["nodes"], path + ".nodes");
      }
    }
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& text, std::string_view source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source_name) + ": " + e.what());
  }
  check_keys(root, "config",
             {"name", "model", "topology", "schedule", "init", "filters", "ticks", "seed",
              "seeds", "x0", "out"});

  ScenarioConfig cfg;
  Scenario& s = cfg.scenario;
  if (root.contains("name")) s.name = as_string(root["name"], "config.name");
  s.model = parse_model(require_key(root, "config", "model"));
  s.topology = parse_topology(require_key(root, "config", "topology"));
  if (root.contains("schedule")) s.schedule = parse_schedule(root["schedule"]);
  if (root.contains("init")) s.init = parse_init(root["init"], s.model.A.rows());
  s.filters = parse_filters(require_key(root, "config", "filters"));
  s.ticks = as_int(require_key(root, "config", "ticks"), "config.ticks");
  if (root.contains("seed")) {
    const json& seed = root["seed"];
    if (!seed.is_number_unsigned()) fail("config.seed", "expected a nonnegative integer");
    s.seed = seed.get<std::uint64_t>();
  }
  if (root.contains("x0")) s.x0 = parse_vector(root["x0"], "config.x0");
  if (root.contains("seeds")) cfg.seeds = as_int(root["seeds"], "config.seeds");
  if (root.contains("out")) cfg.out_dir = as_string(root["out"], "config.out");
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_config(buffer.str(), path.string());
}

}  // namespace dkf
