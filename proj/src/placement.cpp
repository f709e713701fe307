#include "fograph/placement.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>

#include "fograph/errors.hpp"
#include "fograph/registry.hpp"

namespace fograph::placement {

namespace {

constexpr int kUnknownHops = std::numeric_limits<int>::max();

int hops_or_max(const std::map<std::string, int>& hops, const std::string& id) {
  auto it = hops.find(id);
  return it == hops.end() ? kUnknownHops : it->second;
}

// Candidate order used everywhere a client or origin is known: fog plane
// first, then hop distance, then node_id.
void sort_candidates(std::vector<std::string>& ids, const netsim::Topology& topology,
                     const std::map<std::string, int>& hops) {
  std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
    const bool a_cloud = topology.node(a).plane == Plane::Cloud;
    const bool b_cloud = topology.node(b).plane == Plane::Cloud;
    if (a_cloud != b_cloud) return b_cloud;
    const int ha = hops_or_max(hops, a);
    const int hb = hops_or_max(hops, b);
    if (ha != hb) return ha < hb;
    return a < b;
  });
}

}  // namespace

const char* to_string(Reason r) {
  switch (r) {
    case Reason::LowestPi:
      return "lowest_pi";
    case Reason::OnlyEligible:
      return "only_eligible";
    case Reason::NearestPremises:
      return "nearest_premises";
  }
  return "unknown";
}

std::optional<std::string> placement_violation(const ServiceDescriptor& service,
                                               const NodeDescriptor& node,
                                               const netsim::Topology* topology,
                                               const PlacementPolicy& policy,
                                               const std::optional<std::string>& origin_premises) {
  if (!node.can_host()) {
    return "node " + node.node_id + " (role " + std::string(to_string(node.role)) +
           ") does not host services";
  }
  if (service.security == Security::Confidential && policy.confidential_fog_only &&
      node.plane == Plane::Cloud) {
    return "confidential service " + service.service_id + " cannot leave the fog plane";
  }
  if (service.granularity == Granularity::Mega && policy.mega_prefers_premises) {
    if (node.plane == Plane::Cloud) {
      return "mega service " + service.service_id + " must stay on the fog plane";
    }
    if (origin_premises && topology != nullptr) {
      bool premises_has_host = false;
      for (const auto& id : topology->node_ids()) {
        const auto& n = topology->node(id);
        if (n.can_host() && n.premises_id == *origin_premises) {
          premises_has_host = true;
          break;
        }
      }
      if (premises_has_host) {
        if (node.premises_id != *origin_premises) {
          return "mega service " + service.service_id + " must stay in premises " +
                 *origin_premises;
        }
      } else {
        const auto hops = topology->hops_from_premises(*origin_premises);
        const int d = hops_or_max(hops, node.node_id);
        if (d > policy.max_mega_hops_from_premises) {
          return "mega service " + service.service_id + " must stay within " +
                 std::to_string(policy.max_mega_hops_from_premises) + " hops of premises " +
                 *origin_premises;
        }
      }
    }
  }
  return std::nullopt;
}

std::vector<std::string> eligible_nodes(const ServiceDescriptor& service,
                                        const netsim::Topology& topology,
                                        const PlacementPolicy& policy,
                                        const std::optional<std::string>& origin_node_id) {
  const bool fog_only =
      (service.security == Security::Confidential && policy.confidential_fog_only) ||
      (service.granularity == Granularity::Mega && policy.mega_prefers_premises);

  std::vector<std::string> ids;
  for (const auto& id : topology.node_ids()) {
    const auto& n = topology.node(id);
    if (!n.can_host()) continue;
    if (fog_only && n.plane == Plane::Cloud) continue;
    ids.push_back(id);
  }

  std::map<std::string, int> hops;
  std::optional<std::string> origin_premises;
  if (origin_node_id) {
    hops = topology.hops_from(*origin_node_id);
    origin_premises = topology.premises_of(*origin_node_id);
  }

  if (service.granularity == Granularity::Mega && policy.mega_prefers_premises &&
      origin_premises) {
    std::vector<std::string> in_premises;
    for (const auto& id : ids) {
      if (topology.node(id).premises_id == *origin_premises) in_premises.push_back(id);
    }
    if (!in_premises.empty()) {
      ids = std::move(in_premises);
    } else {
      // No host inside the premises: fall back to fog nodes within the hop
      // bound of the origin.
      std::vector<std::string> near;
      for (const auto& id : ids) {
        if (hops_or_max(hops, id) <= policy.max_mega_hops_from_premises) near.push_back(id);
      }
      ids = std::move(near);
    }
  }

  if (ids.empty()) {
    throw Error(Errc::NoEligibleNode,
                "no node may host service " + service.service_id + " (" + service.name + ")");
  }
  sort_candidates(ids, topology, hops);
  return ids;
}

std::optional<std::string> lowest_pi_node(const std::vector<std::string>& ordered_candidates,
                                          const metrics::PiTable& pi_table,
                                          bool strict_measured) {
  if (ordered_candidates.empty()) return std::nullopt;
  const std::string* best = nullptr;
  const metrics::PiValue* best_pi = nullptr;
  for (const auto& id : ordered_candidates) {
    auto it = pi_table.find(id);
    if (it == pi_table.end() || !it->second.measured()) continue;
    if (best == nullptr || metrics::pi_less(it->second, *best_pi) ||
        (metrics::pi_equal(it->second, *best_pi) && id < *best)) {
      best = &id;
      best_pi = &it->second;
    }
  }
  if (best != nullptr) return *best;
  if (strict_measured) {
    throw Error(Errc::NoMeasurements, "no candidate host has a measured priority index");
  }
  return ordered_candidates.front();
}

PlacementDecision provider_place(const ServiceDescriptor& service,
                                 const netsim::Topology& topology,
                                 const metrics::PiTable& pi_table, const PlacementPolicy& policy,
                                 const std::optional<std::string>& origin_node_id) {
  PlacementDecision decision;
  decision.service_id = service.service_id;
  decision.eligible_node_ids = eligible_nodes(service, topology, policy, origin_node_id);

  bool any_measured = false;
  for (const auto& id : decision.eligible_node_ids) {
    auto it = pi_table.find(id);
    if (it != pi_table.end() && it->second.measured()) {
      any_measured = true;
      break;
    }
  }

  decision.chosen_node_id =
      *lowest_pi_node(decision.eligible_node_ids, pi_table, policy.strict_measured);
  if (decision.eligible_node_ids.size() == 1) {
    decision.reason = Reason::OnlyEligible;
  } else if (any_measured) {
    decision.reason = Reason::LowestPi;
  } else {
    decision.reason = Reason::NearestPremises;
  }
  return decision;
}

namespace {

// Live hosts of a service name that this client may use, in candidate order.
std::vector<std::string> client_candidates(const std::string& client_node_id,
                                           const std::string& service_name,
                                           const registry::Registry& reg,
                                           const netsim::Topology& topology,
                                           const PlacementPolicy& policy) {
  const auto regs = reg.registrations_by_name(service_name);
  if (regs.empty()) {
    throw Error(Errc::NotFound, "service " + service_name + " has no live registration");
  }
  const auto hops = topology.hops_from(client_node_id);
  const auto origin_premises = topology.premises_of(client_node_id);

  std::vector<std::string> ids;
  for (const auto& r : regs) {
    if (!topology.has_node(r.node_id)) continue;
    const auto& service = reg.service(r.service_id);
    if (placement_violation(service, topology.node(r.node_id), &topology, policy,
                            origin_premises)) {
      continue;
    }
    if (std::find(ids.begin(), ids.end(), r.node_id) == ids.end()) ids.push_back(r.node_id);
  }
  if (ids.empty()) {
    throw Error(Errc::NoEligibleNode,
                "no live host of " + service_name + " is eligible for client " + client_node_id);
  }
  sort_candidates(ids, topology, hops);
  return ids;
}

}  // namespace

std::string select_host(const std::string& client_node_id, const std::string& service_name,
                        const registry::Registry& reg, const metrics::PiTable& pi_table,
                        const netsim::Topology& topology, const PlacementPolicy& policy) {
  const auto candidates =
      client_candidates(client_node_id, service_name, reg, topology, policy);
  return *lowest_pi_node(candidates, pi_table, policy.strict_measured);
}

std::string redirect(const std::string& client_node_id, const std::string& service_name,
                     const registry::Registry& reg, const netsim::Topology& topology,
                     const metrics::PiTable& pi_table, const PlacementPolicy& policy) {
  auto candidates = client_candidates(client_node_id, service_name, reg, topology, policy);
  const auto hops = topology.hops_from(client_node_id);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const std::string& a, const std::string& b) {
                     const int ha = hops_or_max(hops, a);
                     const int hb = hops_or_max(hops, b);
                     if (ha != hb) return ha < hb;
                     auto ia = pi_table.find(a);
                     auto ib = pi_table.find(b);
                     const bool ma = ia != pi_table.end() && ia->second.measured();
                     const bool mb = ib != pi_table.end() && ib->second.measured();
                     if (ma != mb) return ma;
                     if (ma && mb && !metrics::pi_equal(ia->second, ib->second)) {
                       return metrics::pi_less(ia->second, ib->second);
                     }
                     return a < b;
                   });
  return candidates.front();
}

}  // namespace fograph::placement
