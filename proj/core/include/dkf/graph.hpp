#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dkf/model.hpp"
#include "dkf/types.hpp"

namespace dkf {

// Undirected communication graph over nodes 1..node_count. Failed nodes keep
// their id but are excluded from every neighborhood query.
struct Topology {
  int node_count = 0;
  std::set<std::pair<NodeId, NodeId>> edges;  // stored as (low, high)
  std::set<NodeId> alive;

  static Topology from_edges(int node_count,
                             const std::vector<std::pair<NodeId, NodeId>>& edge_list);

  bool is_alive(NodeId id) const { return alive.contains(id); }
};

Topology complete_topology(int node_count);
Topology path_topology(int node_count);

// Named 6-node presets used by the bundled scenarios:
//   dense-A  -- node 5 is the hub (N_5 = {1,3,4,6}), max degree 4
//   dense-B  -- nodes 1..4 fully meshed with a tail 4-5-6, max degree 4
//   chain    -- path 1-2-3-4-5-6
//   complete -- all-to-all
Topology topology_preset(std::string_view name);
std::vector<std::string> topology_preset_names();

struct SwitchTopology {
  std::set<std::pair<NodeId, NodeId>> edges;
};
struct FailNodes {
  std::set<NodeId> nodes;
};
using TopologyEvent = std::variant<SwitchTopology, FailNodes>;

struct EventSchedule {
  struct Entry {
    int tick = 0;
    TopologyEvent event;
  };
  std::vector<Entry> events;  // ticks strictly increasing

  void validate(int node_count) const;  // throws ConfigError
};

// Alive neighbors of i, excluding i itself. Throws QueryError for an unknown
// or dead node.
std::set<NodeId> neighborhood(const Topology& t, NodeId i);

// neighborhood(i) plus i itself.
std::set<NodeId> inclusive_neighborhood(const Topology& t, NodeId i);

int degree(const Topology& t, NodeId i);

// Maximum degree over alive nodes. Throws QueryError when nothing is alive.
int max_degree(const Topology& t);

// True iff the alive nodes form a single connected component.
bool is_connected(const Topology& t);

Topology apply_event(const Topology& t, const TopologyEvent& event);

// Topology after applying every event scheduled for `tick`. Events take
// effect before the measurement phase of their tick; failed nodes send
// nothing from that tick on.
Topology apply_events(const Topology& t, const EventSchedule& schedule, int tick);

struct NaivetyReport {
  struct NodeData {
    NodeId node = 0;
    std::set<NodeId> inclusive;  // J_i over alive nodes
    int rank = 0;                // observability rank of the stacked sensors over J_i
    bool naive = false;
  };
  std::set<NodeId> naive;
  std::vector<NodeData> nodes;  // ordered by node id
};

// A node is naive when the dynamics are not observable through the sensors of
// its inclusive neighborhood; a node with no observing sensor in reach has
// rank 0 and is always naive.
NaivetyReport classify_naive(const Topology& t, const LinearModel& model);

}  // namespace dkf
