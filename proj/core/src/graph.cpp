#include "dkf/graph.hpp"

#include <algorithm>
#include <deque>
#include <string>
#include <utility>

#include "dkf/errors.hpp"
#include "dkf/linalg.hpp"

namespace dkf {
namespace {

std::pair<NodeId, NodeId> ordered_edge(NodeId a, NodeId b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

void check_node_id(NodeId id, int node_count, const std::string& what) {
  if (id < 1 || id > node_count) {
    throw ConfigError(what + ": node id " + std::to_string(id) + " outside 1.." +
                      std::to_string(node_count));
  }
}

std::set<std::pair<NodeId, NodeId>> normalize_edges(
    int node_count, const std::vector<std::pair<NodeId, NodeId>>& edge_list,
    const std::string& what) {
  std::set<std::pair<NodeId, NodeId>> edges;
  for (const auto& [a, b] : edge_list) {
    check_node_id(a, node_count, what);
    check_node_id(b, node_count, what);
    if (a == b) {
      throw ConfigError(what + ": self loop at node " + std::to_string(a));
    }
    edges.insert(ordered_edge(a, b));
  }
  return edges;
}

void check_alive(const Topology& t, NodeId i) {
  if (i < 1 || i > t.node_count) {
    throw QueryError("unknown node id " + std::to_string(i));
  }
  if (!t.is_alive(i)) {
    throw QueryError("node " + std::to_string(i) + " is not alive");
  }
}

}  // namespace

Topology Topology::from_edges(int node_count,
                              const std::vector<std::pair<NodeId, NodeId>>& edge_list) {
  if (node_count < 1) throw ConfigError("topology: node count must be >= 1");
  Topology t;
  t.node_count = node_count;
  t.edges = normalize_edges(node_count, edge_list, "topology.edges");
  for (NodeId i = 1; i <= node_count; ++i) t.alive.insert(i);
  return t;
}

Topology complete_topology(int node_count) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 1; i <= node_count; ++i) {
    for (NodeId j = i + 1; j <= node_count; ++j) edges.emplace_back(i, j);
  }
  return Topology::from_edges(node_count, edges);
}

Topology path_topology(int node_count) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 1; i < node_count; ++i) edges.emplace_back(i, i + 1);
  return Topology::from_edges(node_count, edges);
}

Topology topology_preset(std::string_view name) {
  if (name == "dense-A") {
    return Topology::from_edges(6, {{1, 2}, {2, 3}, {3, 5}, {1, 5}, {4, 5}, {5, 6}, {3, 4}});
  }
  if (name == "dense-B") {
    // Nodes 1..4 fully meshed, tail 4-5-6. Node 4 is the hub (degree 4);
    // dropping nodes 5 and 6 leaves an all-to-all graph on the rest.
    return Topology::from_edges(
        6, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}, {4, 5}, {5, 6}});
  }
  if (name == "chain") return path_topology(6);
  if (name == "complete") return complete_topology(6);
  throw ConfigError("unknown topology preset '" + std::string(name) + "'");
}

std::vector<std::string> topology_preset_names() {
  return {"dense-A", "dense-B", "chain", "complete"};
}

void EventSchedule::validate(int node_count) const {
  int last_tick = 0;
  for (const Entry& entry : events) {
    if (entry.tick < 1) throw ConfigError("schedule: event tick must be >= 1");
    if (entry.tick <= last_tick) {
      throw ConfigError("schedule: event ticks must be strictly increasing");
    }
    last_tick = entry.tick;
    if (const auto* sw = std::get_if<SwitchTopology>(&entry.event)) {
      for (const auto& [a, b] : sw->edges) {
        check_node_id(a, node_count, "schedule.switch_to");
        check_node_id(b, node_count, "schedule.switch_to");
        if (a == b) throw ConfigError("schedule.switch_to: self loop at node " + std::to_string(a));
      }
    } else if (const auto* fail = std::get_if<FailNodes>(&entry.event)) {
      for (NodeId id : fail->nodes) check_node_id(id, node_count, "schedule.fail");
    }
  }
}

std::set<NodeId> neighborhood(const Topology& t, NodeId i) {
  check_alive(t, i);
  std::set<NodeId> out;
  for (const auto& [a, b] : t.edges) {
    if (a == i && t.is_alive(b)) out.insert(b);
    if (b == i && t.is_alive(a)) out.insert(a);
  }
  return out;
}

std::set<NodeId> inclusive_neighborhood(const Topology& t, NodeId i) {
  std::set<NodeId> out = neighborhood(t, i);
  out.insert(i);
  return out;
}

int degree(const Topology& t, NodeId i) {
  return static_cast<int>(neighborhood(t, i).size());
}

int max_degree(const Topology& t) {
  if (t.alive.empty()) throw QueryError("max_degree: no alive nodes");
  int best = 0;
  for (NodeId i : t.alive) best = std::max(best, degree(t, i));
  return best;
}

bool is_connected(const Topology& t) {
  if (t.alive.size() <= 1) return true;
  std::set<NodeId> seen;
  std::deque<NodeId> frontier{*t.alive.begin()};
  seen.insert(*t.alive.begin());
  while (!frontier.empty()) {
    const NodeId i = frontier.front();
    frontier.pop_front();
    for (NodeId j : neighborhood(t, i)) {
      if (seen.insert(j).second) frontier.push_back(j);
    }
  }
  return seen.size() == t.alive.size();
}

Topology apply_event(const Topology& t, const TopologyEvent& event) {
  Topology out = t;
  if (const auto* sw = std::get_if<SwitchTopology>(&event)) {
    out.edges.clear();
    for (const auto& [a, b] : sw->edges) out.edges.insert(ordered_edge(a, b));
  } else if (const auto* fail = std::get_if<FailNodes>(&event)) {
    for (NodeId id : fail->nodes) out.alive.erase(id);
  }
  return out;
}

Topology apply_events(const Topology& t, const EventSchedule& schedule, int tick) {
  Topology out = t;
  for (const auto& entry : schedule.events) {
    if (entry.tick == tick) out = apply_event(out, entry.event);
  }
  return out;
}

NaivetyReport classify_naive(const Topology& t, const LinearModel& model) {
  NaivetyReport report;
  const Eigen::Index n = model.state_dim();
  for (NodeId i : t.alive) {
    NaivetyReport::NodeData data;
    data.node = i;
    data.inclusive = inclusive_neighborhood(t, i);

    Eigen::Index rows = 0;
    std::vector<const Matrix*> blocks;
    for (NodeId j : data.inclusive) {
      auto it = model.sensors.find(j);
      if (it == model.sensors.end() || !it->second.observes()) continue;
      blocks.push_back(&it->second.H);
      rows += it->second.H.rows();
    }
    Matrix stacked(rows, n);
    Eigen::Index offset = 0;
    for (const Matrix* h : blocks) {
      stacked.middleRows(offset, h->rows()) = *h;
      offset += h->rows();
    }

    data.rank = observability_rank(model.A, stacked);
    data.naive = data.rank < n;
    if (data.naive) report.naive.insert(i);
    report.nodes.push_back(std::move(data));
  }
  return report;
}

}  // namespace dkf
