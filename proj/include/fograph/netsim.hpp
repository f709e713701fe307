#ifndef FOGRAPH_NETSIM_HPP
#define FOGRAPH_NETSIM_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fograph/metrics.hpp"
#include "fograph/placement.hpp"
#include "fograph/registry.hpp"
#include "fograph/rng.hpp"
#include "fograph/scenario.hpp"
#include "fograph/sensors.hpp"
#include "fograph/topology.hpp"
#include "fograph/types.hpp"

namespace fograph::netsim {

/// Tie order for events at the same instant: registrations land before the
/// probes that could measure them, probes before the requests they steer,
/// sensor polls last.
enum class EventKind { Registration, Probe, Request, SensorPoll };

int event_rank(EventKind k);
const char* to_string(EventKind k);

struct Event {
  SimTimeUs at_us = 0;
  EventKind kind = EventKind::Registration;
  std::string id;
  nlohmann::ordered_json payload;
};

/// Append-only event record; one NDJSON line per event.
class EventLog {
 public:
  void append(Event event);
  const std::vector<Event>& events() const { return events_; }
  std::string to_ndjson() const;

 private:
  std::vector<Event> events_;
};

struct RequestTrace {
  std::string request_id;
  std::string client_node_id;
  std::string host_node_id;
  std::string service_id;
  std::string service_name;
  std::vector<std::string> path;
  SimTimeUs rt_us = 0;
  int router_crossings = 0;
  std::uint64_t bytes_over_wan = 0;
};

/// Latency of the unique lexicographically-smallest shortest path a -> b:
/// per link, base latency plus one uniform jitter draw in [0, jitter_us].
/// Returns the node path and the summed latency. a == b is zero cost.
std::pair<std::vector<std::string>, SimTimeUs> path_latency(const Topology& topology,
                                                            const std::string& a,
                                                            const std::string& b, RngStream& rng);

/// One request round trip: path latency plus service time on the host.
/// Router crossings count boundary links on the path; WAN bytes are the
/// service payload once per crossing.
RequestTrace simulate_request(const Topology& topology, const std::string& client_node_id,
                              const std::string& host_node_id, const ServiceDescriptor& service,
                              const WorkUnits& work, RngStream& rng);

/// One probe sweep from the prober to each target, in the given order.
/// Unreachable targets are skipped. Probe RT is pure path latency.
std::vector<metrics::RtSample> probe_round(const Topology& topology, const std::string& prober,
                                           const std::vector<std::string>& targets, RngStream& rng,
                                           SimTimeUs at_us);

struct PairStats {
  std::string client_node_id;
  std::string service_name;
  std::size_t count = 0;
  SimTimeUs total_rt_us = 0;
  double mean_rt_ms() const;
};

struct ScenarioReport {
  std::uint64_t seed = 0;
  double duration_s = 0.0;
  double probe_interval_s = 0.0;
  std::size_t registration_count = 0;
  std::size_t probe_count = 0;
  std::size_t request_count = 0;
  std::size_t sensor_reading_count = 0;
  SimTimeUs total_request_rt_us = 0;
  std::uint64_t total_router_crossings = 0;
  std::uint64_t total_bytes_over_wan = 0;
  std::vector<PairStats> per_client_service;
  std::vector<placement::PlacementDecision> decisions;
  metrics::PriorityMap priority_map;

  double mean_rt_ms() const;
  nlohmann::ordered_json to_json() const;
};

struct RunResult {
  EventLog log;
  ScenarioReport report;
  std::vector<RequestTrace> traces;
  std::shared_ptr<metrics::SampleStore> store;
  std::shared_ptr<sensors::SensorStore> sensor_store;
  std::shared_ptr<registry::Registry> registry;
};

/// Runs a scenario to completion. Identical (scenario, seed) pairs produce
/// byte-identical logs and reports. The result borrows the scenario's
/// topology; keep the scenario alive while using it.
RunResult run_scenario(const Scenario& scenario);

/// Runs the scenario and writes report.json, events.ndjson,
/// priority_map.json, priority_map.dot, and sensors/<id>.csv under out_dir.
RunResult write_outputs(const Scenario& scenario, const std::filesystem::path& out_dir);

}  // namespace fograph::netsim

#endif
