#ifndef FOGRAPH_TOPOLOGY_HPP
#define FOGRAPH_TOPOLOGY_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fograph/types.hpp"

namespace fograph::netsim {

struct Link {
  std::string a;
  std::string b;
  SimTimeUs base_latency_us = 0;
  SimTimeUs jitter_us = 0;
  LinkKind kind = LinkKind::Wired;
};

/// Boundary device between a premises and the WAN. Routers are not graph
/// vertices; a link whose endpoints lie in different premises (cloud counts
/// as "no premises") crosses the fog-side router and is a boundary link.
struct AccessRouter {
  std::string router_id;
  std::string premises_id;
};

/// Immutable network graph: hosts, latency-weighted links, access-router
/// boundary markers. Construction validates connectivity and the
/// one-router-per-premises rule.
class Topology {
public:
  Topology() = default;
  Topology(std::vector<NodeDescriptor> nodes, std::vector<Link> links,
           std::vector<AccessRouter> access_routers);

  const std::vector<NodeDescriptor>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<AccessRouter>& access_routers() const { return access_routers_; }

  bool has_node(const std::string& node_id) const;
  const NodeDescriptor& node(const std::string& node_id) const;  // throws UnknownNode
  std::optional<std::string> premises_of(const std::string& node_id) const;
  bool is_boundary(const Link& link) const;

  /// All node ids, sorted.
  std::vector<std::string> node_ids() const;

  /// BFS hop counts from a node. Unreachable nodes are absent.
  std::map<std::string, int> hops_from(const std::string& node_id) const;

  /// Multi-source BFS from every node of a premises (distance 0 inside).
  std::map<std::string, int> hops_from_premises(const std::string& premises_id) const;

  /// Shortest path by hop count, lexicographically smallest among ties.
  /// Returns [a, ..., b]; empty when a == b. Throws Unreachable.
  std::vector<std::string> shortest_path(const std::string& a, const std::string& b) const;

  const Link& link_between(const std::string& a, const std::string& b) const;

  /// Undirected edge list for DOT rendering.
  std::vector<std::pair<std::string, std::string>> edge_list() const;

private:
  std::map<std::string, int> bfs(const std::vector<std::string>& sources) const;

  std::vector<NodeDescriptor> nodes_;
  std::vector<Link> links_;
  std::vector<AccessRouter> access_routers_;
  std::map<std::string, std::size_t> node_index_;
  // node -> sorted (neighbor, link index)
  std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> adjacency_;
};

/// Materializes a Topology from the scenario config keys
/// {nodes, links, access_routers}. Link jitter defaults by kind when omitted
/// (wired 0.1 ms, wireless 1.0 ms). Throws SchemaError / DisconnectedGraph.
Topology build_topology(const nlohmann::json& config);

constexpr double kDefaultWiredJitterMs = 0.1;
constexpr double kDefaultWirelessJitterMs = 1.0;

}  // namespace fograph::netsim

#endif
