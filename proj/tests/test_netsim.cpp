#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fograph/errors.hpp"
#include "fograph/netsim.hpp"

using namespace fograph;
using namespace fograph::netsim;

namespace {

struct RunFixture {
  Scenario sc = parse_scenario(default_scenario_json());
  RunResult run = run_scenario(sc);
};

NodeDescriptor simple_node(const std::string& id, const std::string& premises, Role role,
                           double capacity) {
  NodeDescriptor n;
  n.node_id = id;
  n.plane = Plane::Fog;
  n.premises_id = premises;
  n.role = role;
  n.cpu_capacity = capacity;
  return n;
}

/// a - b - c chain with zero jitter so latencies are exact.
Topology quiet_chain() {
  return Topology({simple_node("a", "p1", Role::Slave, 100),
                   simple_node("b", "p1", Role::Master, 200),
                   simple_node("c", "p2", Role::Slave, 400)},
                  {Link{"a", "b", 3000, 0, LinkKind::Wired},
                   Link{"b", "c", 7000, 0, LinkKind::Wired}},
                  {{"ar-1", "p1"}, {"ar-2", "p2"}});
}

}  // namespace

TEST_CASE("event kinds rank registrations first, sensor polls last") {
  CHECK(event_rank(EventKind::Registration) < event_rank(EventKind::Probe));
  CHECK(event_rank(EventKind::Probe) < event_rank(EventKind::Request));
  CHECK(event_rank(EventKind::Request) < event_rank(EventKind::SensorPoll));
  CHECK(std::string(to_string(EventKind::SensorPoll)) == "sensor_poll");
}

TEST_CASE("event log is append-only in time order") {
  EventLog log;
  log.append({0, EventKind::Registration, "reg-000001", {{"a", 1}}});
  log.append({10, EventKind::Probe, "round-000001", {{"b", 2}}});
  log.append({10, EventKind::Request, "req-000001", {{"c", 3}}});
  CHECK_THROWS_AS(log.append({5, EventKind::Request, "req-000002", {}}), Error);
  CHECK(log.events().size() == 3);
  CHECK(log.to_ndjson() == "{\"a\":1}\n{\"b\":2}\n{\"c\":3}\n");
}

TEST_CASE("path latency sums base plus bounded jitter") {
  const auto topo = quiet_chain();
  RngStream rng(1, "test", "path");
  const auto [path, latency] = path_latency(topo, "a", "c", rng);
  CHECK(path == std::vector<std::string>{"a", "b", "c"});
  CHECK(latency == 10000);  // zero jitter: exact

  const auto [self_path, self_latency] = path_latency(topo, "b", "b", rng);
  CHECK(self_path.empty());
  CHECK(self_latency == 0);

  // with jitter the total stays within [sum(base), sum(base + jitter)]
  Topology jittery({simple_node("a", "p1", Role::Slave, 100),
                    simple_node("b", "p1", Role::Master, 200)},
                   {Link{"a", "b", 3000, 500, LinkKind::Wired}}, {{"ar-1", "p1"}});
  for (int i = 0; i < 200; ++i) {
    RngStream r(7, "test", "jitter-" + std::to_string(i));
    const auto [p, total] = path_latency(jittery, "a", "b", r);
    CHECK(total >= 3000);
    CHECK(total <= 3500);
  }
}

TEST_CASE("request simulation adds service time and counts crossings") {
  const auto topo = quiet_chain();
  WorkUnits work;

  ServiceDescriptor svc;
  svc.service_id = "svc-1";
  svc.name = "x-service";
  svc.granularity = Granularity::Macro;  // 10 work units
  svc.payload_bytes = 4096;

  RngStream rng(1, "test", "req");
  const auto trace = simulate_request(topo, "a", "c", svc, work, rng);
  // latency 10000, service time 10 / 400 cps = 25000 us
  CHECK(trace.rt_us == 10000 + 25000);
  CHECK(trace.path == std::vector<std::string>{"a", "b", "c"});
  CHECK(trace.router_crossings == 1);  // the p1 -> p2 link
  CHECK(trace.bytes_over_wan == 4096);
  CHECK(trace.client_node_id == "a");
  CHECK(trace.host_node_id == "c");

  // local execution has no path, no crossings, pure service time
  const auto local = simulate_request(topo, "b", "b", svc, work, rng);
  CHECK(local.rt_us == 50000);  // 10 / 200 cps
  CHECK(local.path.empty());
  CHECK(local.router_crossings == 0);
  CHECK(local.bytes_over_wan == 0);
}

TEST_CASE("probe rounds skip the prober and carry the timestamp") {
  const auto topo = quiet_chain();
  RngStream rng(1, "test", "probe");
  const auto samples = probe_round(topo, "b", {"a", "b", "c"}, rng, 60'000'000);
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].node_id == "a");
  CHECK(samples[0].rt_us == 3000);
  CHECK(samples[1].node_id == "c");
  CHECK(samples[1].rt_us == 7000);
  for (const auto& s : samples) {
    CHECK(s.at_us == 60'000'000);
    CHECK(s.source == metrics::SampleSource::Probe);
  }
}

TEST_CASE("default scenario run produces the documented event counts") {
  RunFixture fx;
  const auto& report = fx.run.report;

  // 4 services on 6 hosts: 2 + 2 pinned, 2 placed
  CHECK(report.registration_count == 6);
  CHECK(report.decisions.size() == 2);

  // 5 probe rounds x 7 targets
  const auto rounds = fx.sc.duration_us / fx.sc.probe_interval_us;
  const auto targets = fx.sc.topology.nodes().size() - 1;
  CHECK(report.probe_count == static_cast<std::size_t>(rounds) * targets);
  CHECK(report.probe_count == 35);

  // request ticks derived from each workload rate
  std::size_t expected_requests = 0;
  for (const auto& w : fx.sc.workload) {
    const auto period = static_cast<SimTimeUs>(std::llround(1.0e6 / w.rate_per_s));
    expected_requests += static_cast<std::size_t>(fx.sc.duration_us / period);
  }
  CHECK(report.request_count == expected_requests);
  CHECK(report.request_count == 25);
  CHECK(fx.run.traces.size() == 25);

  // 2 sensors x 5 polls
  CHECK(report.sensor_reading_count == 10);

  // every probe and request lands in the sample store
  CHECK(fx.run.store->store_size() == report.probe_count + report.request_count);

  // log holds one line per registration, probe, request, and poll
  CHECK(fx.run.log.events().size() ==
        report.registration_count + report.probe_count + report.request_count +
            report.sensor_reading_count);
}

TEST_CASE("provider decisions for the unpinned services") {
  RunFixture fx;
  const auto& decisions = fx.run.report.decisions;
  REQUIRE(decisions.size() == 2);

  CHECK(decisions[0].service_id == "svc-calc");
  CHECK(decisions[0].chosen_node_id == "tg-master-1");
  CHECK(decisions[0].reason == placement::Reason::NearestPremises);
  CHECK(decisions[0].eligible_node_ids.front() == "tg-master-1");

  CHECK(decisions[1].service_id == "svc-archive");
  CHECK(decisions[1].chosen_node_id == "tg-slave-4");
  CHECK(decisions[1].reason == placement::Reason::NearestPremises);

  // the registry reflects the placements
  CHECK(fx.run.registry->lookup_unicast("premises-archive").node_id == "tg-slave-4");
}

TEST_CASE("events are ordered by time, then kind, then id") {
  RunFixture fx;
  const auto& events = fx.run.log.events();
  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto& prev = events[i - 1];
    const auto& cur = events[i];
    const bool ordered =
        prev.at_us < cur.at_us ||
        (prev.at_us == cur.at_us &&
         (event_rank(prev.kind) < event_rank(cur.kind) ||
          (event_rank(prev.kind) == event_rank(cur.kind) && prev.id <= cur.id)));
    CHECK(ordered);
  }

  // request ids are sequential in log order
  std::uint64_t seq = 0;
  for (const auto& e : events) {
    if (e.kind != EventKind::Request) continue;
    char expect[32];
    std::snprintf(expect, sizeof(expect), "req-%06llu",
                  static_cast<unsigned long long>(++seq));
    CHECK(e.id == expect);
  }
  CHECK(seq == fx.run.report.request_count);
}

TEST_CASE("first request replays exactly from its substream") {
  RunFixture fx;
  REQUIRE(!fx.run.traces.empty());
  const auto& first = fx.run.traces.front();

  // workload[0]: tg-slave-2 calling temperature-service every 20 s; before
  // the first probe round nothing is measured, so the nearest pinned host
  // (tg-slave-1, two wireless hops) serves it.
  CHECK(first.request_id == "req-000001");
  CHECK(first.client_node_id == "tg-slave-2");
  CHECK(first.host_node_id == "tg-slave-1");
  CHECK(first.path ==
        std::vector<std::string>{"tg-slave-2", "tg-master-1", "tg-slave-1"});
  CHECK(first.router_crossings == 0);
  CHECK(first.bytes_over_wan == 0);

  RngStream replay(fx.sc.seed, "request", "w000-000001");
  const auto j1 = replay.next_int(0, 1000);  // wireless jitter, 1.0 ms
  const auto j2 = replay.next_int(0, 1000);
  const SimTimeUs service_time = 1'000'000 / 500;  // 1 work unit at 500 cps
  CHECK(first.rt_us == 2000 + j1 + 2000 + j2 + service_time);
}

TEST_CASE("first probe replays exactly from its substream") {
  RunFixture fx;
  const Event* probe = nullptr;
  for (const auto& e : fx.run.log.events()) {
    if (e.kind == EventKind::Probe) {
      probe = &e;
      break;
    }
  }
  REQUIRE(probe != nullptr);
  CHECK(probe->at_us == 60'000'000);
  CHECK(probe->payload.at("round") == "round-000001");
  CHECK(probe->payload.at("prober") == "cluster-frontend");
  // targets go in sorted node order, so the cloud DC is probed first
  CHECK(probe->payload.at("target") == "cloud-dc");

  RngStream replay(fx.sc.seed, "probe", "round-000001");
  const auto jitter = replay.next_int(0, 5000);  // 5 ms WAN jitter
  CHECK(probe->payload.at("rt_ms") == doctest::Approx(us_to_ms(50000 + jitter)));
}

TEST_CASE("archive requests stay in the premises at pure service time") {
  RunFixture fx;
  const RequestTrace* archive = nullptr;
  for (const auto& t : fx.run.traces) {
    if (t.service_name == "premises-archive") {
      REQUIRE(archive == nullptr);  // rate 0.005/s fires exactly once in 300 s
      archive = &t;
    }
  }
  REQUIRE(archive != nullptr);
  CHECK(archive->client_node_id == "tg-slave-4");
  CHECK(archive->host_node_id == "tg-slave-4");
  CHECK(archive->path.empty());
  CHECK(archive->rt_us == 200'000);  // 100 work units at 500 cps
  CHECK(archive->router_crossings == 0);
}

TEST_CASE("cloud clients cross the access router") {
  RunFixture fx;
  std::size_t cloud_requests = 0;
  for (const auto& t : fx.run.traces) {
    if (t.client_node_id != "cloud-dc") continue;
    ++cloud_requests;
    CHECK(t.router_crossings == 1);
    CHECK(t.bytes_over_wan == 256);
    CHECK(t.path.front() == "cloud-dc");
    CHECK(t.path[1] == "cluster-frontend");
  }
  CHECK(cloud_requests == 3);  // rate 0.01/s over 300 s
}

TEST_CASE("report totals match the traces") {
  RunFixture fx;
  SimTimeUs total_rt = 0;
  std::uint64_t crossings = 0;
  std::uint64_t bytes = 0;
  for (const auto& t : fx.run.traces) {
    total_rt += t.rt_us;
    crossings += static_cast<std::uint64_t>(t.router_crossings);
    bytes += t.bytes_over_wan;
  }
  CHECK(fx.run.report.total_request_rt_us == total_rt);
  CHECK(fx.run.report.total_router_crossings == crossings);
  CHECK(fx.run.report.total_bytes_over_wan == bytes);
  CHECK(fx.run.report.mean_rt_ms() ==
        doctest::Approx(us_to_ms(total_rt) / static_cast<double>(fx.run.traces.size())));

  // per-pair stats re-aggregate to the same totals
  std::size_t pair_count = 0;
  SimTimeUs pair_rt = 0;
  for (const auto& p : fx.run.report.per_client_service) {
    pair_count += p.count;
    pair_rt += p.total_rt_us;
  }
  CHECK(pair_count == fx.run.traces.size());
  CHECK(pair_rt == total_rt);
  CHECK(fx.run.report.per_client_service.size() == 4);
}

TEST_CASE("priority map covers every node, frontend unmeasured") {
  RunFixture fx;
  const auto& map = fx.run.report.priority_map;
  REQUIRE(map.records.size() == 8);
  std::set<std::string> banded;
  for (const auto& r : map.records) {
    if (r.node_id == "cluster-frontend") {
      // the prober never probes itself and hosts nothing
      CHECK(r.band == metrics::Band::Unmeasured);
      CHECK(r.sample_count() == 0);
    } else {
      CHECK(r.band != metrics::Band::Unmeasured);
      CHECK(r.sample_count() >= 5);
      banded.insert(to_string(r.band));
    }
  }
  CHECK(banded.count("blue") == 1);
  CHECK(banded.count("red") == 1);
}

TEST_CASE("identical runs are byte-identical, different seeds are not") {
  Scenario sc1 = parse_scenario(default_scenario_json());
  Scenario sc2 = parse_scenario(default_scenario_json());
  const auto r1 = run_scenario(sc1);
  const auto r2 = run_scenario(sc2);
  CHECK(r1.log.to_ndjson() == r2.log.to_ndjson());
  CHECK(r1.report.to_json().dump(2) == r2.report.to_json().dump(2));
  CHECK(metrics::render_dot(r1.report.priority_map, sc1.topology.edge_list()) ==
        metrics::render_dot(r2.report.priority_map, sc2.topology.edge_list()));

  auto seeded = default_scenario_json();
  seeded["seed"] = 43;
  Scenario sc3 = parse_scenario(seeded);
  const auto r3 = run_scenario(sc3);
  // same shape, different draws
  CHECK(r3.report.request_count == r1.report.request_count);
  CHECK(r3.report.probe_count == r1.report.probe_count);
  CHECK(r3.log.to_ndjson() != r1.log.to_ndjson());
}

TEST_CASE("halving the probe interval doubles the probe rounds") {
  nlohmann::json config = default_scenario_json();
  apply_override(config, "probe_interval_s", "30");
  Scenario sc = parse_scenario(config);
  const auto run = run_scenario(sc);
  CHECK(run.report.probe_count == 70);
}

TEST_CASE("output files land under the output directory") {
  const auto out_dir = std::filesystem::temp_directory_path() / "fograph-test-outputs";
  std::filesystem::remove_all(out_dir);

  Scenario sc = parse_scenario(default_scenario_json());
  const auto run = write_outputs(sc, out_dir);

  for (const char* name : {"report.json", "events.ndjson", "priority_map.json",
                           "priority_map.dot"}) {
    CHECK_MESSAGE(std::filesystem::exists(out_dir / name), name);
  }
  CHECK(std::filesystem::exists(out_dir / "sensors" / "dht22-1.csv"));
  CHECK(std::filesystem::exists(out_dir / "sensors" / "dht22-2.csv"));

  // the NDJSON on disk has one parseable line per event
  std::ifstream in(out_dir / "events.ndjson");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK_NOTHROW((void)nlohmann::json::parse(line));
  }
  CHECK(lines == run.log.events().size());

  // the CSV holds the header plus one row per poll
  std::ifstream csv(out_dir / "sensors" / "dht22-1.csv");
  std::size_t csv_lines = 0;
  while (std::getline(csv, line)) ++csv_lines;
  CHECK(csv_lines == 6);

  std::filesystem::remove_all(out_dir);
}
