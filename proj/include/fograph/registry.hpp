#ifndef FOGRAPH_REGISTRY_HPP
#define FOGRAPH_REGISTRY_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fograph/metrics.hpp"
#include "fograph/placement.hpp"
#include "fograph/topology.hpp"
#include "fograph/types.hpp"

namespace fograph::registry {

struct Registration {
  std::string registration_id;
  std::string service_id;
  std::string node_id;
  SimTimeUs registered_at_us = 0;
};

/// Call convention of a pre-existing service that predates descriptors.
/// LegacyV0: one request byte-string in, one response byte-string out.
enum class CallShape { LegacyV0 };

using LegacyHandler = std::function<std::string(const std::string&)>;

struct LegacyService {
  std::string legacy_id;
  CallShape call_shape = CallShape::LegacyV0;
  LegacyHandler handler;
};

/// A legacy service behind a descriptor facade. invoke passes request bytes
/// through to the original handler unchanged.
struct WrappedService {
  ServiceDescriptor descriptor;
  LegacyHandler invoke;
};

/// Wraps a legacy service so it can be registered like a native one. The
/// returned descriptor carries migration_state "wrapped"; responses stay
/// byte-identical to the bare handler. Throws ShapeUnsupported for call
/// shapes other than LegacyV0 and InvalidDescriptor for a missing handler.
WrappedService wrap_legacy(const LegacyService& legacy, ServiceDescriptor descriptor);

/// Reference legacy arithmetic handler: requests are "op a b" with op in
/// {add, sub, mul} and 64-bit integer operands; response is the decimal
/// result. Anything malformed yields "ERR".
std::string legacy_calculating_handler(const std::string& request);

/// Service registry: nodes, service descriptors, and live (service, node)
/// registrations. Optionally wired to a metrics store and topology so lookup
/// prefers low-PI hosts and registration enforces placement policy.
/// Concurrent readers are safe; writes take the exclusive lock.
class Registry {
 public:
  Registry() = default;
  Registry(const Registry&) = delete;
  Registry& operator=(const Registry&) = delete;

  void attach_topology(const netsim::Topology* topology);
  void attach_metrics(const metrics::SampleStore* store);
  void set_policy(placement::PlacementPolicy policy);
  const placement::PlacementPolicy& policy() const;
  /// Anchors the Mega premises check for a service to a client's premises.
  void set_service_origin(const std::string& service_id, const std::string& premises_id);

  void add_node(const NodeDescriptor& node);
  bool has_node(const std::string& node_id) const;
  const NodeDescriptor& node(const std::string& node_id) const;
  std::vector<NodeDescriptor> nodes() const;

  Registration register_service(const ServiceDescriptor& service, const std::string& node_id,
                                SimTimeUs at_us = 0);
  void unregister(const std::string& registration_id);

  /// Single best provider of a service name: lowest PI when metrics are
  /// wired, else lowest node_id. Throws NotFound when nothing is live.
  Registration lookup_unicast(const std::string& service_name) const;

  /// All live registrations whose service name matches a glob pattern,
  /// ordered best-first (PI ascending, unmeasured last, then node_id,
  /// service_id, registration_id).
  std::vector<Registration> lookup_multicast(const std::string& pattern) const;

  const ServiceDescriptor& service(const std::string& service_id) const;
  bool has_service(const std::string& service_id) const;
  std::vector<ServiceDescriptor> services() const;
  std::vector<Registration> live_registrations() const;
  std::vector<Registration> registrations_by_name(const std::string& service_name) const;
  /// Earliest live registration of this name on this node. Throws NotFound.
  Registration registration_for(const std::string& service_name,
                                const std::string& node_id) const;
  std::optional<std::string> service_origin(const std::string& service_id) const;

  nlohmann::ordered_json dump_json() const;
  /// Replaces all nodes, services, and live registrations with the contents
  /// of a dump_json snapshot. Wiring and policy are kept.
  void load_snapshot(const nlohmann::json& snapshot);

 private:
  Registration lookup_unicast_locked(const std::string& service_name) const;
  std::vector<Registration> live_by_name_locked(const std::string& service_name) const;
  metrics::PiTable pi_table_or_empty() const;

  mutable std::shared_mutex mutex_;
  std::map<std::string, NodeDescriptor> nodes_;
  std::map<std::string, ServiceDescriptor> services_;
  std::map<std::string, Registration> live_;
  std::set<std::pair<std::string, std::string>> live_pairs_;
  std::map<std::string, std::string> origin_premises_;
  std::uint64_t next_registration_ = 1;
  const netsim::Topology* topology_ = nullptr;
  const metrics::SampleStore* store_ = nullptr;
  placement::PlacementPolicy policy_{};
};

}  // namespace fograph::registry

#endif
