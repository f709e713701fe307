#ifndef FOGRAPH_PLACEMENT_HPP
#define FOGRAPH_PLACEMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "fograph/metrics.hpp"
#include "fograph/topology.hpp"
#include "fograph/types.hpp"

namespace fograph::registry {
class Registry;
}

namespace fograph::placement {

struct PlacementPolicy {
  bool confidential_fog_only = true;
  bool mega_prefers_premises = true;
  int max_mega_hops_from_premises = 1;
  /// When true, selection with only unmeasured candidates is a hard
  /// NoMeasurements error instead of falling back to topology order.
  bool strict_measured = false;
};

enum class Reason { LowestPi, OnlyEligible, NearestPremises };

const char* to_string(Reason r);

struct PlacementDecision {
  std::string service_id;
  std::string chosen_node_id;
  std::vector<std::string> eligible_node_ids;
  Reason reason = Reason::LowestPi;
};

/// Checks one concrete (service, node) pair against the policy. Returns the
/// violation message, or nullopt when the pair is allowed. origin_premises
/// anchors the Mega hop bound when known.
std::optional<std::string> placement_violation(
    const ServiceDescriptor& service, const NodeDescriptor& node,
    const netsim::Topology* topology, const PlacementPolicy& policy,
    const std::optional<std::string>& origin_premises = std::nullopt);

/// Hosts a service may live on, ordered by (fog plane first, hop distance
/// from origin, node_id). Confidential never leaves the fog; Mega stays in
/// the origin's premises when that premises has any host, otherwise within
/// max_mega_hops of the origin. Throws NoEligibleNode.
std::vector<std::string> eligible_nodes(const ServiceDescriptor& service,
                                        const netsim::Topology& topology,
                                        const PlacementPolicy& policy,
                                        const std::optional<std::string>& origin_node_id =
                                            std::nullopt);

/// Provider-side choice: lowest PI among eligible hosts; unmeasured hosts are
/// chosen only when no measured one exists (topology order decides). Ties on
/// PI break by node_id.
PlacementDecision provider_place(const ServiceDescriptor& service,
                                 const netsim::Topology& topology,
                                 const metrics::PiTable& pi_table, const PlacementPolicy& policy,
                                 const std::optional<std::string>& origin_node_id = std::nullopt);

/// Client-side choice among the live registrations of a service name: the
/// lowest-PI host that passes policy for this client. Throws NotFound,
/// NoEligibleNode, NoMeasurements (strict mode).
std::string select_host(const std::string& client_node_id, const std::string& service_name,
                        const registry::Registry& reg, const metrics::PiTable& pi_table,
                        const netsim::Topology& topology, const PlacementPolicy& policy);

/// Topology-based redirection: like select_host but hop distance from the
/// client outranks PI; ranking is (hops, pi, node_id), unmeasured after
/// measured at equal hops.
std::string redirect(const std::string& client_node_id, const std::string& service_name,
                     const registry::Registry& reg, const netsim::Topology& topology,
                     const metrics::PiTable& pi_table, const PlacementPolicy& policy);

/// Shared argmin helper: first measured candidate with the lowest PI, in the
/// given candidate order; all-unmeasured falls back to the first candidate or
/// throws NoMeasurements under strict. Empty input yields nullopt.
std::optional<std::string> lowest_pi_node(const std::vector<std::string>& ordered_candidates,
                                          const metrics::PiTable& pi_table,
                                          bool strict_measured);

}  // namespace fograph::placement

#endif
