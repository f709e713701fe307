#include "fograph/netsim.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "fograph/errors.hpp"

namespace fograph::netsim {

namespace {

std::string seq_id(const char* prefix, std::uint64_t n) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%06" PRIu64, prefix, n);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  out << content;
  if (!out) {
    throw Error(Errc::IoError, "short write to " + path.string());
  }
}

}  // namespace

int event_rank(EventKind k) { return static_cast<int>(k); }

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Registration:
      return "registration";
    case EventKind::Probe:
      return "probe";
    case EventKind::Request:
      return "request";
    case EventKind::SensorPoll:
      return "sensor_poll";
  }
  return "unknown";
}

void EventLog::append(Event event) {
  if (!events_.empty() && event.at_us < events_.back().at_us) {
    throw Error(Errc::SchemaError, "event log timestamps must not decrease");
  }
  events_.push_back(std::move(event));
}

std::string EventLog::to_ndjson() const {
  std::string out;
  for (const auto& e : events_) {
    out += e.payload.dump();
    out += '\n';
  }
  return out;
}

std::pair<std::vector<std::string>, SimTimeUs> path_latency(const Topology& topology,
                                                            const std::string& a,
                                                            const std::string& b,
                                                            RngStream& rng) {
  auto path = topology.shortest_path(a, b);
  SimTimeUs total = 0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Link& link = topology.link_between(path[i], path[i + 1]);
    total += link.base_latency_us;
    total += rng.next_int(0, link.jitter_us);
  }
  return {std::move(path), total};
}

RequestTrace simulate_request(const Topology& topology, const std::string& client_node_id,
                              const std::string& host_node_id, const ServiceDescriptor& service,
                              const WorkUnits& work, RngStream& rng) {
  RequestTrace trace;
  trace.client_node_id = client_node_id;
  trace.host_node_id = host_node_id;
  trace.service_id = service.service_id;
  trace.service_name = service.name;

  auto [path, latency_us] = path_latency(topology, client_node_id, host_node_id, rng);
  trace.path = std::move(path);

  const double capacity = topology.node(host_node_id).cpu_capacity;
  const auto service_time_us =
      static_cast<SimTimeUs>(std::llround(work.of(service.granularity) * 1.0e6 / capacity));
  trace.rt_us = latency_us + service_time_us;

  for (std::size_t i = 0; i + 1 < trace.path.size(); ++i) {
    if (topology.is_boundary(topology.link_between(trace.path[i], trace.path[i + 1]))) {
      ++trace.router_crossings;
    }
  }
  trace.bytes_over_wan =
      service.payload_bytes * static_cast<std::uint64_t>(trace.router_crossings);
  return trace;
}

std::vector<metrics::RtSample> probe_round(const Topology& topology, const std::string& prober,
                                           const std::vector<std::string>& targets,
                                           RngStream& rng, SimTimeUs at_us) {
  std::vector<metrics::RtSample> out;
  for (const auto& target : targets) {
    if (target == prober) continue;
    try {
      auto [path, rt_us] = path_latency(topology, prober, target, rng);
      out.push_back({target, rt_us, at_us, metrics::SampleSource::Probe});
    } catch (const Error& e) {
      if (e.code() != Errc::Unreachable) throw;
    }
  }
  return out;
}

double PairStats::mean_rt_ms() const {
  return count == 0 ? 0.0 : us_to_ms(total_rt_us) / static_cast<double>(count);
}

double ScenarioReport::mean_rt_ms() const {
  return request_count == 0 ? 0.0
                            : us_to_ms(total_request_rt_us) / static_cast<double>(request_count);
}

nlohmann::ordered_json ScenarioReport::to_json() const {
  nlohmann::ordered_json j;
  j["scenario"] = {{"seed", seed},
                   {"duration_s", duration_s},
                   {"probe_interval_s", probe_interval_s}};
  j["counters"] = {{"registrations", registration_count},
                   {"probes", probe_count},
                   {"requests", request_count},
                   {"sensor_readings", sensor_reading_count}};
  j["requests"]["count"] = request_count;
  if (request_count == 0) {
    j["requests"]["mean_rt_ms"] = nullptr;
  } else {
    j["requests"]["mean_rt_ms"] = mean_rt_ms();
  }
  j["requests"]["total_rt_ms"] = us_to_ms(total_request_rt_us);
  j["requests"]["total_router_crossings"] = total_router_crossings;
  j["requests"]["total_bytes_over_wan"] = total_bytes_over_wan;
  j["per_client_service"] = nlohmann::ordered_json::array();
  for (const auto& p : per_client_service) {
    j["per_client_service"].push_back({{"client", p.client_node_id},
                                       {"service_name", p.service_name},
                                       {"count", p.count},
                                       {"mean_rt_ms", p.mean_rt_ms()}});
  }
  j["decisions"] = nlohmann::ordered_json::array();
  for (const auto& d : decisions) {
    j["decisions"].push_back({{"service_id", d.service_id},
                              {"chosen_node_id", d.chosen_node_id},
                              {"reason", placement::to_string(d.reason)},
                              {"eligible_node_ids", d.eligible_node_ids}});
  }
  j["priority_map"] = priority_map.to_json();
  return j;
}

namespace {

struct Tick {
  SimTimeUs at_us;
  EventKind kind;
  std::string id;
  std::size_t index;  // workload or sensor position; unused for probes
};

nlohmann::ordered_json base_payload(SimTimeUs at_us, EventKind kind) {
  nlohmann::ordered_json j;
  j["t_ms"] = us_to_ms(at_us);
  j["type"] = to_string(kind);
  return j;
}

}  // namespace

RunResult run_scenario(const Scenario& scenario) {
  RunResult result;
  result.store = std::make_shared<metrics::SampleStore>(scenario.pi_window);
  result.sensor_store = std::make_shared<sensors::SensorStore>();
  result.registry = std::make_shared<registry::Registry>();

  const Topology& topology = scenario.topology;
  for (const auto& id : topology.node_ids()) result.store->add_node(id);
  for (const auto& node : topology.nodes()) result.registry->add_node(node);
  result.registry->attach_topology(&topology);
  result.registry->attach_metrics(result.store.get());
  result.registry->set_policy(scenario.policy);
  for (const auto& sensor : scenario.sensors) result.sensor_store->add_sensor(sensor.spec);

  ScenarioReport& report = result.report;
  report.seed = scenario.seed;
  report.duration_s = us_to_s(scenario.duration_us);
  report.probe_interval_s = us_to_s(scenario.probe_interval_us);

  // t = 0: all services come up before any traffic.
  for (const auto& svc : scenario.services) {
    const auto origin = scenario.origin_for(svc);
    if (origin) {
      if (auto premises = topology.premises_of(*origin)) {
        result.registry->set_service_origin(svc.descriptor.service_id, *premises);
      }
    }
    auto log_registration = [&](const registry::Registration& reg, const char* reason) {
      auto payload = base_payload(0, EventKind::Registration);
      payload["registration_id"] = reg.registration_id;
      payload["service_id"] = reg.service_id;
      payload["node_id"] = reg.node_id;
      payload["reason"] = reason;
      result.log.append({0, EventKind::Registration, reg.registration_id, std::move(payload)});
      ++report.registration_count;
    };
    if (!svc.pinned_hosts.empty()) {
      for (const auto& host : svc.pinned_hosts) {
        log_registration(result.registry->register_service(svc.descriptor, host, 0), "pinned");
      }
    } else {
      auto decision = placement::provider_place(svc.descriptor, topology,
                                                result.store->pi_table(), scenario.policy, origin);
      log_registration(result.registry->register_service(svc.descriptor,
                                                         decision.chosen_node_id, 0),
                       placement::to_string(decision.reason));
      report.decisions.push_back(std::move(decision));
    }
  }

  // Static schedule: every tick is known up front, ordered by
  // (time, kind rank, id), so the event sequence is a pure function of the
  // scenario.
  std::vector<Tick> ticks;
  for (SimTimeUs k = 1; k * scenario.probe_interval_us <= scenario.duration_us; ++k) {
    ticks.push_back({k * scenario.probe_interval_us, EventKind::Probe,
                     seq_id("round-", static_cast<std::uint64_t>(k)), 0});
  }
  for (std::size_t i = 0; i < scenario.workload.size(); ++i) {
    const auto& w = scenario.workload[i];
    if (w.rate_per_s <= 0.0) continue;
    auto period_us = static_cast<SimTimeUs>(std::llround(1.0e6 / w.rate_per_s));
    if (period_us <= 0) period_us = 1;
    for (SimTimeUs k = 1; k * period_us <= scenario.duration_us; ++k) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "w%03zu-%06" PRId64, i, static_cast<std::int64_t>(k));
      ticks.push_back({k * period_us, EventKind::Request, buf, i});
    }
  }
  for (std::size_t i = 0; i < scenario.sensors.size(); ++i) {
    const auto& sensor = scenario.sensors[i];
    for (SimTimeUs k = 1; k * sensor.interval_us <= scenario.duration_us; ++k) {
      ticks.push_back({k * sensor.interval_us, EventKind::SensorPoll,
                       sensor.spec.sensor_id + "-" + seq_id("", static_cast<std::uint64_t>(k)),
                       i});
    }
  }
  std::sort(ticks.begin(), ticks.end(), [](const Tick& a, const Tick& b) {
    if (a.at_us != b.at_us) return a.at_us < b.at_us;
    if (event_rank(a.kind) != event_rank(b.kind)) return event_rank(a.kind) < event_rank(b.kind);
    return a.id < b.id;
  });

  const std::string prober = scenario.resolve_prober();
  std::vector<std::string> probe_targets;
  for (const auto& id : topology.node_ids()) {
    if (id != prober) probe_targets.push_back(id);
  }

  std::map<std::string, RngStream> sensor_streams;
  std::map<std::string, sensors::SensorReading> last_reading;
  std::map<std::pair<std::string, std::string>, PairStats> pair_stats;
  std::uint64_t request_seq = 0;

  for (const auto& tick : ticks) {
    switch (tick.kind) {
      case EventKind::Probe: {
        RngStream stream(scenario.seed, "probe", tick.id);
        for (const auto& sample : probe_round(topology, prober, probe_targets, stream,
                                              tick.at_us)) {
          result.store->record_sample(sample);
          auto payload = base_payload(tick.at_us, EventKind::Probe);
          payload["round"] = tick.id;
          payload["prober"] = prober;
          payload["target"] = sample.node_id;
          payload["rt_ms"] = sample.rt_ms();
          result.log.append({tick.at_us, EventKind::Probe, tick.id + "/" + sample.node_id,
                             std::move(payload)});
          ++report.probe_count;
        }
        break;
      }
      case EventKind::Request: {
        const auto& w = scenario.workload[tick.index];
        RngStream stream(scenario.seed, "request", tick.id);
        const auto host =
            placement::select_host(w.client_node_id, w.service_name, *result.registry,
                                   result.store->pi_table(), topology, scenario.policy);
        const auto reg = result.registry->registration_for(w.service_name, host);
        const auto service = result.registry->service(reg.service_id);
        auto trace = simulate_request(topology, w.client_node_id, host, service,
                                      scenario.work_units, stream);
        trace.request_id = seq_id("req-", ++request_seq);
        result.store->record_sample(
            {host, trace.rt_us, tick.at_us, metrics::SampleSource::Request});

        auto payload = base_payload(tick.at_us, EventKind::Request);
        payload["request_id"] = trace.request_id;
        payload["client"] = trace.client_node_id;
        payload["service_name"] = trace.service_name;
        payload["service_id"] = trace.service_id;
        payload["host"] = trace.host_node_id;
        payload["rt_ms"] = us_to_ms(trace.rt_us);
        payload["router_crossings"] = trace.router_crossings;
        payload["bytes_over_wan"] = trace.bytes_over_wan;
        payload["path"] = trace.path;
        result.log.append(
            {tick.at_us, EventKind::Request, trace.request_id, std::move(payload)});

        ++report.request_count;
        report.total_request_rt_us += trace.rt_us;
        report.total_router_crossings += static_cast<std::uint64_t>(trace.router_crossings);
        report.total_bytes_over_wan += trace.bytes_over_wan;
        auto& stats = pair_stats[{w.client_node_id, w.service_name}];
        stats.client_node_id = w.client_node_id;
        stats.service_name = w.service_name;
        ++stats.count;
        stats.total_rt_us += trace.rt_us;
        result.traces.push_back(std::move(trace));
        break;
      }
      case EventKind::SensorPoll: {
        const auto& sensor = scenario.sensors[tick.index];
        const auto& sensor_id = sensor.spec.sensor_id;
        auto stream_it = sensor_streams.find(sensor_id);
        if (stream_it == sensor_streams.end()) {
          stream_it = sensor_streams
                          .emplace(sensor_id, RngStream(scenario.seed, "sensor", sensor_id))
                          .first;
        }
        auto prev_it = last_reading.find(sensor_id);
        const auto reading = sensors::read_sensor(
            sensor.spec, tick.at_us, stream_it->second,
            prev_it == last_reading.end() ? nullptr : &prev_it->second);
        last_reading[sensor_id] = reading;
        result.sensor_store->store_reading(reading);

        auto payload = base_payload(tick.at_us, EventKind::SensorPoll);
        payload["sensor_id"] = sensor_id;
        payload["host"] = sensor.spec.host_node_id;
        payload["temperature_c"] = reading.temperature_c;
        payload["humidity_pct"] = reading.humidity_pct;
        result.log.append({tick.at_us, EventKind::SensorPoll, tick.id, std::move(payload)});
        ++report.sensor_reading_count;
        break;
      }
      case EventKind::Registration:
        break;  // registrations all happen at t = 0, before the schedule
    }
  }

  for (const auto& [key, stats] : pair_stats) report.per_client_service.push_back(stats);
  report.priority_map =
      result.store->priority_map(topology.node_ids(), scenario.band_policy, scenario.duration_us);
  return result;
}

RunResult write_outputs(const Scenario& scenario, const std::filesystem::path& out_dir) {
  auto result = run_scenario(scenario);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(Errc::IoError, "cannot create directory " + out_dir.string());
  }
  write_file(out_dir / "report.json", result.report.to_json().dump(2) + "\n");
  write_file(out_dir / "events.ndjson", result.log.to_ndjson());
  write_file(out_dir / "priority_map.json", result.report.priority_map.to_json().dump(2) + "\n");
  write_file(out_dir / "priority_map.dot",
             metrics::render_dot(result.report.priority_map, scenario.topology.edge_list()));
  if (!scenario.sensors.empty()) {
    const auto sensor_dir = out_dir / "sensors";
    std::filesystem::create_directories(sensor_dir, ec);
    if (ec) {
      throw Error(Errc::IoError, "cannot create directory " + sensor_dir.string());
    }
    for (const auto& id : result.sensor_store->sensor_ids()) {
      write_file(sensor_dir / (id + ".csv"),
                 result.sensor_store->export_csv(id, 0, scenario.duration_us));
    }
  }
  return result;
}

}  // namespace fograph::netsim
