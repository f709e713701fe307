#ifndef FOGRAPH_SCENARIO_HPP
#define FOGRAPH_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fograph/metrics.hpp"
#include "fograph/placement.hpp"
#include "fograph/sensors.hpp"
#include "fograph/topology.hpp"
#include "fograph/types.hpp"

namespace fograph::netsim {

/// Work units a request costs its host, by service granularity. Service time
/// is work / cpu_capacity seconds.
struct WorkUnits {
  double mini = 1.0;
  double macro_ = 10.0;
  double mega = 100.0;
  double of(Granularity g) const;
};

struct ServiceConfig {
  ServiceDescriptor descriptor;
  /// Explicit hosts; empty means the provider places the service.
  std::vector<std::string> pinned_hosts;
  std::optional<std::string> origin_node_id;
};

struct WorkloadEntry {
  std::string client_node_id;
  std::string service_name;
  double rate_per_s = 0.0;
};

struct SensorConfig {
  sensors::SensorSpec spec;
  SimTimeUs interval_us = 60 * kUsPerSecond;
};

struct Scenario {
  std::uint64_t seed = 0;
  SimTimeUs duration_us = 300 * kUsPerSecond;
  SimTimeUs probe_interval_us = 60 * kUsPerSecond;
  Topology topology;
  std::vector<ServiceConfig> services;
  std::vector<WorkloadEntry> workload;
  std::vector<SensorConfig> sensors;
  std::optional<std::string> prober;
  placement::PlacementPolicy policy;
  metrics::BandPolicy band_policy = metrics::BandPolicy::quantile();
  WorkUnits work_units;
  std::size_t pi_window = 0;

  /// Configured prober, else the first cluster frontend, else the first node.
  std::string resolve_prober() const;
  /// Placement origin for a service: its configured origin, else the first
  /// workload client calling it.
  std::optional<std::string> origin_for(const ServiceConfig& service) const;
};

/// Parses and fully validates a scenario config. All diagnostics name the
/// offending key. Throws SchemaError (or DisconnectedGraph for a split
/// topology).
Scenario parse_scenario(const nlohmann::json& config);

/// The built-in two-master, four-slave premises with a cloud uplink.
nlohmann::ordered_json default_scenario_json();

/// Applies one dotted-path override, e.g. "probe_interval_s=30" or
/// "nodes.0.cpu_capacity=2000". The value is parsed as JSON when possible,
/// else taken as a string. Throws SchemaError for paths that do not resolve.
void apply_override(nlohmann::json& config, const std::string& dotted_key,
                    const std::string& value);

}  // namespace fograph::netsim

#endif
