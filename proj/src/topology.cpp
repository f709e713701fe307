#include "fograph/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "fograph/errors.hpp"
#include "fograph/json_util.hpp"

namespace fograph::netsim {

Topology::Topology(std::vector<NodeDescriptor> nodes, std::vector<Link> links,
                   std::vector<AccessRouter> access_routers)
    : nodes_(std::move(nodes)), links_(std::move(links)),
      access_routers_(std::move(access_routers)) {
  if (nodes_.empty()) {
    throw Error(Errc::SchemaError, "topology has no nodes");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    validate_node(nodes_[i]);
    if (!node_index_.emplace(nodes_[i].node_id, i).second) {
      throw Error(Errc::SchemaError, "duplicate node_id \"" + nodes_[i].node_id + "\"");
    }
  }

  std::set<std::pair<std::string, std::string>> seen_pairs;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& link = links_[i];
    for (const std::string& end : {link.a, link.b}) {
      if (!node_index_.count(end)) {
        throw Error(Errc::SchemaError, "link endpoint \"" + end + "\" is not a known node");
      }
    }
    if (link.a == link.b) {
      throw Error(Errc::SchemaError, "self-loop link at \"" + link.a + "\"");
    }
    if (link.base_latency_us <= 0) {
      throw Error(Errc::SchemaError,
                  "link " + link.a + "--" + link.b + " base latency must be positive");
    }
    if (link.jitter_us < 0) {
      throw Error(Errc::SchemaError,
                  "link " + link.a + "--" + link.b + " jitter must be non-negative");
    }
    auto pair = std::minmax(link.a, link.b);
    if (!seen_pairs.emplace(pair.first, pair.second).second) {
      throw Error(Errc::SchemaError, "duplicate link " + pair.first + "--" + pair.second);
    }
    adjacency_[link.a].emplace_back(link.b, i);
    adjacency_[link.b].emplace_back(link.a, i);
  }
  for (auto& [_, neighbors] : adjacency_) {
    std::sort(neighbors.begin(), neighbors.end());
  }

  // One access router per fog premises.
  std::set<std::string> premises_with_router;
  for (const auto& router : access_routers_) {
    if (!premises_with_router.insert(router.premises_id).second) {
      throw Error(Errc::SchemaError,
                  "premises \"" + router.premises_id + "\" has more than one access router");
    }
  }
  for (const auto& node : nodes_) {
    if (node.premises_id && !premises_with_router.count(*node.premises_id)) {
      throw Error(Errc::SchemaError,
                  "premises \"" + *node.premises_id + "\" has no access router");
    }
  }

  const auto reach = bfs({nodes_.front().node_id});
  if (reach.size() != nodes_.size()) {
    throw Error(Errc::DisconnectedGraph, "topology graph is not connected");
  }
}

bool Topology::has_node(const std::string& node_id) const {
  return node_index_.count(node_id) > 0;
}

const NodeDescriptor& Topology::node(const std::string& node_id) const {
  auto it = node_index_.find(node_id);
  if (it == node_index_.end()) {
    throw Error(Errc::UnknownNode, "no such node: \"" + node_id + "\"");
  }
  return nodes_[it->second];
}

std::optional<std::string> Topology::premises_of(const std::string& node_id) const {
  return node(node_id).premises_id;
}

bool Topology::is_boundary(const Link& link) const {
  return premises_of(link.a) != premises_of(link.b);
}

std::vector<std::string> Topology::node_ids() const {
  std::vector<std::string> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, _] : node_index_) {
    ids.push_back(id);
  }
  return ids;
}

std::map<std::string, int> Topology::bfs(const std::vector<std::string>& sources) const {
  std::map<std::string, int> dist;
  std::deque<std::string> queue;
  for (const auto& source : sources) {
    if (dist.emplace(source, 0).second) {
      queue.push_back(source);
    }
  }
  while (!queue.empty()) {
    const std::string current = queue.front();
    queue.pop_front();
    auto adj = adjacency_.find(current);
    if (adj == adjacency_.end()) continue;
    for (const auto& [neighbor, _] : adj->second) {
      if (dist.emplace(neighbor, dist[current] + 1).second) {
        queue.push_back(neighbor);
      }
    }
  }
  return dist;
}

std::map<std::string, int> Topology::hops_from(const std::string& node_id) const {
  node(node_id);  // existence check
  return bfs({node_id});
}

std::map<std::string, int> Topology::hops_from_premises(const std::string& premises_id) const {
  std::vector<std::string> sources;
  for (const auto& node : nodes_) {
    if (node.premises_id == premises_id) {
      sources.push_back(node.node_id);
    }
  }
  return bfs(sources);
}

std::vector<std::string> Topology::shortest_path(const std::string& a,
                                                 const std::string& b) const {
  node(a);
  node(b);
  if (a == b) {
    return {};
  }
  const auto dist_a = bfs({a});
  auto it_b = dist_a.find(b);
  if (it_b == dist_a.end()) {
    throw Error(Errc::Unreachable, "no path from \"" + a + "\" to \"" + b + "\"");
  }
  const int total = it_b->second;
  const auto dist_b = bfs({b});

  // Greedy walk: at every step take the smallest neighbor that still lies on
  // some shortest path; that yields the lexicographically smallest one.
  std::vector<std::string> path{a};
  std::string current = a;
  while (current != b) {
    const int step = static_cast<int>(path.size()) - 1;
    const auto& neighbors = adjacency_.at(current);
    bool advanced = false;
    for (const auto& [neighbor, _] : neighbors) {
      auto da = dist_a.find(neighbor);
      auto db = dist_b.find(neighbor);
      if (da != dist_a.end() && db != dist_b.end() && da->second == step + 1 &&
          da->second + db->second == total) {
        path.push_back(neighbor);
        current = neighbor;
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      throw Error(Errc::Unreachable, "no path from \"" + a + "\" to \"" + b + "\"");
    }
  }
  return path;
}

const Link& Topology::link_between(const std::string& a, const std::string& b) const {
  auto adj = adjacency_.find(a);
  if (adj != adjacency_.end()) {
    for (const auto& [neighbor, index] : adj->second) {
      if (neighbor == b) {
        return links_[index];
      }
    }
  }
  throw Error(Errc::Unreachable, "no link between \"" + a + "\" and \"" + b + "\"");
}

std::vector<std::pair<std::string, std::string>> Topology::edge_list() const {
  std::vector<std::pair<std::string, std::string>> edges;
  edges.reserve(links_.size());
  for (const auto& link : links_) {
    edges.emplace_back(link.a, link.b);
  }
  return edges;
}

Topology build_topology(const nlohmann::json& config) {
  namespace ju = jsonutil;
  if (!config.is_object()) {
    throw Error(Errc::SchemaError, "config: expected a JSON object");
  }

  std::vector<NodeDescriptor> nodes;
  const auto& nodes_json = ju::req_array(config, "nodes", "");
  for (std::size_t i = 0; i < nodes_json.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    const auto& nj = nodes_json[i];
    if (!nj.is_object()) ju::fail(path, "expected an object");
    NodeDescriptor node;
    node.node_id = ju::req_string(nj, "node_id", path);
    node.plane = plane_from_string(ju::req_string(nj, "plane", path));
    if (nj.contains("premises_id") && !nj.at("premises_id").is_null()) {
      node.premises_id = ju::as_string(nj.at("premises_id"), path + ".premises_id");
    }
    node.role = role_from_string(ju::req_string(nj, "role", path));
    node.link = link_kind_from_string(ju::opt_string(nj, "link", path, "wired"));
    node.mobile = ju::opt_bool(nj, "mobile", path, false);
    node.cpu_capacity = ju::req_number(nj, "cpu_capacity", path);
    if (!(node.cpu_capacity > 0.0)) {
      ju::fail(path + ".cpu_capacity", "must be > 0");
    }
    node.heterogeneity_tag = ju::opt_string(nj, "heterogeneity_tag", path, "");
    if (node.plane == Plane::Cloud && node.premises_id) {
      ju::fail(path + ".premises_id", "cloud nodes must not carry a premises_id");
    }
    if (node.plane == Plane::Fog && !node.premises_id) {
      ju::fail(path + ".premises_id", "fog nodes require a premises_id");
    }
    nodes.push_back(std::move(node));
  }

  std::vector<Link> links;
  if (config.contains("links")) {
    const auto& links_json = config.at("links");
    if (!links_json.is_array()) ju::fail("links", "expected an array");
    for (std::size_t i = 0; i < links_json.size(); ++i) {
      const std::string path = "links[" + std::to_string(i) + "]";
      const auto& lj = links_json[i];
      if (!lj.is_object()) ju::fail(path, "expected an object");
      Link link;
      link.a = ju::req_string(lj, "a", path);
      link.b = ju::req_string(lj, "b", path);
      link.kind = link_kind_from_string(ju::opt_string(lj, "kind", path, "wired"));
      const double base_ms = ju::req_number(lj, "base_latency_ms", path);
      if (!(base_ms > 0.0)) {
        ju::fail(path + ".base_latency_ms", "must be positive");
      }
      link.base_latency_us = ms_to_us(base_ms);
      const double default_jitter = link.kind == LinkKind::Wireless ? kDefaultWirelessJitterMs
                                                                    : kDefaultWiredJitterMs;
      const double jitter_ms = ju::opt_number(lj, "jitter_ms", path, default_jitter);
      if (jitter_ms < 0.0) {
        ju::fail(path + ".jitter_ms", "must be non-negative");
      }
      link.jitter_us = ms_to_us(jitter_ms);
      links.push_back(std::move(link));
    }
  }

  std::vector<AccessRouter> routers;
  if (config.contains("access_routers")) {
    const auto& routers_json = config.at("access_routers");
    if (!routers_json.is_array()) ju::fail("access_routers", "expected an array");
    for (std::size_t i = 0; i < routers_json.size(); ++i) {
      const std::string path = "access_routers[" + std::to_string(i) + "]";
      const auto& rj = routers_json[i];
      if (!rj.is_object()) ju::fail(path, "expected an object");
      routers.push_back(AccessRouter{ju::req_string(rj, "router_id", path),
                                     ju::req_string(rj, "premises_id", path)});
    }
  }

  try {
    return Topology(std::move(nodes), std::move(links), std::move(routers));
  } catch (const Error& e) {
    if (e.code() == Errc::DisconnectedGraph) throw;
    throw Error(Errc::SchemaError, e.what());
  }
}

}  // namespace fograph::netsim
