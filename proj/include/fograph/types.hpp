#ifndef FOGRAPH_TYPES_HPP
#define FOGRAPH_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>

namespace fograph {

/// Simulated time and latency are carried as integer microseconds so
/// aggregation stays exact; milliseconds appear only at reporting boundaries.
using SimTimeUs = std::int64_t;

constexpr SimTimeUs kUsPerMs = 1000;
constexpr SimTimeUs kUsPerSecond = 1000000;

inline double us_to_ms(SimTimeUs us) { return static_cast<double>(us) / 1000.0; }
inline double us_to_s(SimTimeUs us) { return static_cast<double>(us) / 1.0e6; }
SimTimeUs ms_to_us(double ms);  // throws Errc::NegativeRt on negative input
SimTimeUs s_to_us(double s);

enum class Granularity { Mini, Macro, Mega };
enum class Security { Public, Confidential };
enum class Plane { Fog, Cloud };
enum class Role { Master, Slave, ClusterFrontend, CloudDC };
enum class LinkKind { Wired, Wireless };

const char* to_string(Granularity g);
const char* to_string(Security s);
const char* to_string(Plane p);
const char* to_string(Role r);
const char* to_string(LinkKind k);

Granularity granularity_from_string(const std::string& s);
Security security_from_string(const std::string& s);
Plane plane_from_string(const std::string& s);
Role role_from_string(const std::string& s);
LinkKind link_kind_from_string(const std::string& s);

/// Default per-request response payload when a service config omits
/// payload_bytes. Tiers are strictly ordered: mini < macro < mega.
std::uint64_t default_payload_bytes(Granularity g);

/// A publishable service.
struct ServiceDescriptor {
  std::string service_id;
  std::string name;
  Granularity granularity = Granularity::Mini;
  Security security = Security::Public;
  std::uint64_t payload_bytes = 0;
  std::uint64_t version = 1;
  /// Reporting-only migration state: "native" or "wrapped".
  std::string migration_state = "native";
};

/// Validates descriptor invariants; throws Errc::InvalidDescriptor.
void validate_descriptor(const ServiceDescriptor& service);

/// A fog or cloud host.
struct NodeDescriptor {
  std::string node_id;
  Plane plane = Plane::Fog;
  std::optional<std::string> premises_id;  // set iff plane == Fog
  Role role = Role::Slave;
  LinkKind link = LinkKind::Wired;
  bool mobile = false;
  double cpu_capacity = 1.0;  // work-units per second, > 0
  std::string heterogeneity_tag;

  /// ClusterFrontend nodes are infrastructure (proxy/prober vantage points)
  /// and never host services.
  bool can_host() const { return role != Role::ClusterFrontend; }
};

/// Validates node invariants; throws Errc::InvalidDescriptor.
void validate_node(const NodeDescriptor& node);

}  // namespace fograph

#endif
