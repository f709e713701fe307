#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fograph/errors.hpp"
#include "fograph/metrics.hpp"
#include "fograph/netsim.hpp"
#include "fograph/registry.hpp"
#include "fograph/rng.hpp"
#include "fograph/scenario.hpp"

namespace {

using namespace fograph;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::IoError:
      return 1;
    case Errc::NoMeasurements:
    case Errc::EmptySeries:
      return 3;
    default:
      return 2;
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot read " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw Error(Errc::IoError, "read failed for " + path);
  }
  return buffer.str();
}

// Seed precedence, weakest first: FOGRAPH_SEED env, config file value,
// --override seed=N, --seed flag.
nlohmann::json load_config(const std::string& path, const std::vector<std::string>& overrides,
                           const std::optional<std::uint64_t>& seed_flag) {
  const auto text = read_text(path);
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::SchemaError, path + ": " + e.what());
  }
  if (!config.contains("seed")) {
    if (const char* env = std::getenv("FOGRAPH_SEED")) {
      try {
        config["seed"] = static_cast<std::uint64_t>(std::stoull(env));
      } catch (const std::exception&) {
        throw Error(Errc::SchemaError, "FOGRAPH_SEED must be an unsigned integer");
      }
    }
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(Errc::SchemaError, "override '" + ov + "' is not key=value");
    }
    netsim::apply_override(config, ov.substr(0, eq), ov.substr(eq + 1));
  }
  if (seed_flag) config["seed"] = *seed_flag;
  return config;
}

metrics::BandPolicy parse_band_policy_flag(const std::string& spec) {
  if (spec == "quantile") return metrics::BandPolicy::quantile();
  const std::string prefix = "absolute:";
  if (spec.rfind(prefix, 0) == 0) {
    const auto rest = spec.substr(prefix.size());
    const auto comma = rest.find(',');
    if (comma != std::string::npos) {
      try {
        return metrics::BandPolicy::absolute(std::stod(rest.substr(0, comma)),
                                             std::stod(rest.substr(comma + 1)));
      } catch (const Error&) {
        throw;
      } catch (const std::exception&) {
        // falls through to the format error below
      }
    }
  }
  throw Error(Errc::InvalidPolicy,
              "--band-policy must be 'quantile' or 'absolute:<blue_ms>,<yellow_ms>'");
}

int cmd_validate(const std::string& config_path) {
  const auto config = load_config(config_path, {}, std::nullopt);
  const auto scenario = netsim::parse_scenario(config);
  std::cout << "OK: " << scenario.topology.nodes().size() << " nodes, "
            << scenario.services.size() << " services, " << scenario.workload.size()
            << " workload entries, " << scenario.sensors.size() << " sensors\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::vector<std::string>& overrides,
                 const std::optional<std::uint64_t>& seed_flag) {
  const auto config = load_config(config_path, overrides, seed_flag);
  const auto scenario = netsim::parse_scenario(config);
  const auto result = netsim::write_outputs(scenario, out_dir);
  const auto& r = result.report;
  std::cout << "seed " << r.seed << ": " << r.registration_count << " registrations, "
            << r.probe_count << " probes, " << r.request_count << " requests, "
            << r.sensor_reading_count << " sensor readings\n";
  if (r.request_count > 0) {
    char line[160];
    std::snprintf(line, sizeof(line),
                  "mean request rt %.3f ms, router crossings %llu, bytes over WAN %llu\n",
                  r.mean_rt_ms(), static_cast<unsigned long long>(r.total_router_crossings),
                  static_cast<unsigned long long>(r.total_bytes_over_wan));
    std::cout << line;
  }
  std::cout << "outputs in " << out_dir << "\n";
  return 0;
}

// Rebuilds a priority map from an events.ndjson log: probe and request lines
// carry the samples; every node id mentioned anywhere joins the cluster, so
// unprobed hosts surface as Unmeasured.
metrics::PriorityMap map_from_event_log(const std::string& text,
                                        const metrics::BandPolicy& policy) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, metrics::PiValue> pi;
  std::set<std::string> nodes;
  std::size_t probe_lines = 0;
  double max_t_ms = 0.0;
  std::size_t lineno = 0;

  auto note_node = [&](const nlohmann::json& j, const char* key) {
    if (j.contains(key) && j.at(key).is_string()) {
      const auto id = j.at(key).get<std::string>();
      if (!id.empty()) nodes.insert(id);
    }
  };
  auto add_sample = [&](const nlohmann::json& j, const char* node_key) {
    const auto id = j.at(node_key).get<std::string>();
    auto& value = pi[id];
    value.total_us += ms_to_us(j.at("rt_ms").get<double>());
    value.count += 1;
    nodes.insert(id);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::SchemaError, "events line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("type")) {
      throw Error(Errc::SchemaError,
                  "events line " + std::to_string(lineno) + ": not an event object");
    }
    max_t_ms = std::max(max_t_ms, j.value("t_ms", 0.0));
    const auto type = j.at("type").get<std::string>();
    try {
      if (type == "probe") {
        ++probe_lines;
        note_node(j, "prober");
        add_sample(j, "target");
      } else if (type == "request") {
        note_node(j, "client");
        add_sample(j, "host");
      } else if (type == "registration") {
        note_node(j, "node_id");
      } else if (type == "sensor_poll") {
        note_node(j, "host");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::SchemaError, "events line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (probe_lines == 0) {
    throw Error(Errc::NoMeasurements, "event log contains no probe samples");
  }

  std::vector<metrics::PiRecord> records;
  for (const auto& node : nodes) {
    metrics::PiRecord rec;
    rec.node_id = node;
    if (auto it = pi.find(node); it != pi.end()) rec.value = it->second;
    records.push_back(std::move(rec));
  }
  const auto classified = metrics::classify(std::move(records), policy);
  metrics::PriorityMap map;
  map.generated_at_us = ms_to_us(max_t_ms);
  map.policy = policy;
  map.records = classified.records;
  map.blue_max = classified.blue_max;
  map.yellow_max = classified.yellow_max;
  return map;
}

int cmd_pi_report(const std::string& input_path, const std::vector<std::string>& overrides,
                  const std::optional<std::uint64_t>& seed_flag,
                  const std::optional<std::string>& band_policy_spec,
                  const std::string& dot_path) {
  const auto text = read_text(input_path);
  metrics::PriorityMap map;
  std::vector<std::pair<std::string, std::string>> edges;

  nlohmann::json whole = nlohmann::json::parse(text, nullptr, false);
  if (whole.is_object() && whole.contains("nodes")) {
    auto config = load_config(input_path, overrides, seed_flag);
    const auto scenario = netsim::parse_scenario(config);
    const auto policy =
        band_policy_spec ? parse_band_policy_flag(*band_policy_spec) : scenario.band_policy;
    const auto result = netsim::run_scenario(scenario);
    map = result.store->priority_map(scenario.topology.node_ids(), policy,
                                     scenario.duration_us);
    edges = scenario.topology.edge_list();
  } else {
    const auto policy = band_policy_spec ? parse_band_policy_flag(*band_policy_spec)
                                         : metrics::BandPolicy::quantile();
    map = map_from_event_log(text, policy);
  }

  bool any_measured = false;
  for (const auto& rec : map.records) {
    if (rec.value.measured()) {
      any_measured = true;
      break;
    }
  }
  if (!any_measured) {
    throw Error(Errc::NoMeasurements, "no host has a measured priority index");
  }

  std::cout << map.to_json().dump(2) << "\n";
  if (!dot_path.empty()) {
    std::ofstream out(dot_path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + dot_path);
    out << metrics::render_dot(map, edges);
  }
  return 0;
}

int cmd_sensors_export(const std::string& config_path, const std::vector<std::string>& overrides,
                       const std::optional<std::uint64_t>& seed_flag,
                       const std::string& sensor_id, const std::string& out_dir) {
  const auto config = load_config(config_path, overrides, seed_flag);
  const auto scenario = netsim::parse_scenario(config);
  const auto result = netsim::run_scenario(scenario);
  const auto& store = *result.sensor_store;

  if (!sensor_id.empty()) {
    std::cout << store.export_csv(sensor_id, 0, scenario.duration_us);
    return 0;
  }
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create directory " + out_dir);
    for (const auto& id : store.sensor_ids()) {
      const auto path = std::filesystem::path(out_dir) / (id + ".csv");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
      out << store.export_csv(id, 0, scenario.duration_us);
    }
    std::cout << "wrote " << store.sensor_ids().size() << " csv files to " << out_dir << "\n";
    return 0;
  }
  for (const auto& id : store.sensor_ids()) {
    std::cout << store.export_csv(id, 0, scenario.duration_us);
  }
  return 0;
}

int cmd_migrate_demo(std::uint64_t seed, int requests, bool inject_fault) {
  registry::LegacyService legacy;
  legacy.legacy_id = "legacy-calc";
  legacy.call_shape = registry::CallShape::LegacyV0;
  legacy.handler = registry::legacy_calculating_handler;

  ServiceDescriptor descriptor;
  descriptor.service_id = "svc-calc";
  descriptor.name = "calculating-service";
  descriptor.granularity = Granularity::Macro;
  descriptor.security = Security::Public;
  descriptor.payload_bytes = 1024;
  descriptor.version = 2;

  const auto wrapped = registry::wrap_legacy(legacy, descriptor);
  auto invoke = wrapped.invoke;
  if (inject_fault) {
    // Test hook: corrupt the wrapped path so the mismatch detector has
    // something to catch.
    invoke = [inner = wrapped.invoke](const std::string& request) {
      return inner(request) + "?";
    };
  }

  std::size_t mismatches = 0;
  auto check = [&](const std::string& request, bool print) {
    const auto direct = legacy.handler(request);
    const auto via_wrapper = invoke(request);
    const bool ok = direct == via_wrapper;
    if (!ok) ++mismatches;
    if (print || !ok) {
      std::cout << "  \"" << request << "\" -> legacy: " << direct
                << " | wrapped: " << via_wrapper << (ok ? "" : "  MISMATCH") << "\n";
    }
  };

  std::cout << "wrapped service: " << wrapped.descriptor.service_id << " (migration_state "
            << wrapped.descriptor.migration_state << ")\n";
  std::cout << "bundled examples:\n";
  for (const auto* request : {"add 2 3", "sub 10 4", "mul 6 7", "div 1 2", "add 2"}) {
    check(request, true);
  }

  RngStream rng(seed, "migrate", "corpus");
  const char* ops[] = {"add", "sub", "mul"};
  for (int i = 0; i < requests; ++i) {
    std::string request;
    if (rng.next_int(0, 9) == 0) {
      // malformed on purpose: unknown op or missing operand
      request = rng.next_int(0, 1) == 0
                    ? "div " + std::to_string(rng.next_int(-1000, 1000)) + " " +
                          std::to_string(rng.next_int(-1000, 1000))
                    : "add " + std::to_string(rng.next_int(-1000, 1000));
    } else {
      request = std::string(ops[rng.next_int(0, 2)]) + " " +
                std::to_string(rng.next_int(-1000000000, 1000000000)) + " " +
                std::to_string(rng.next_int(-1000000000, 1000000000));
    }
    check(request, false);
  }
  std::cout << "checked " << (requests + 5) << " requests, " << mismatches << " mismatches\n";
  return mismatches == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fograph: deterministic fog service placement simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::string> band_policy_spec;
  std::string dot_path;
  std::string sensor_id;
  std::string sensors_out;
  std::uint64_t demo_seed = 7;
  int demo_requests = 1000;
  bool inject_fault = false;

  auto* validate = app.add_subcommand("validate", "parse and check a scenario config");
  validate->add_option("config", config_path, "scenario config path")->required();

  auto* simulate = app.add_subcommand("simulate", "run a scenario and write all outputs");
  simulate->add_option("config", config_path, "scenario config path")->required();
  simulate->add_option("-o,--out", out_dir, "output directory (default out)");
  simulate->add_option("--seed", seed_flag, "seed override");
  simulate->add_option("--override", overrides, "dotted-key=value config override");

  auto* pi_report = app.add_subcommand("pi-report",
                                       "priority map from a scenario config or events.ndjson");
  pi_report->add_option("input", config_path, "scenario config or events.ndjson")->required();
  pi_report->add_option("--seed", seed_flag, "seed override (scenario input)");
  pi_report->add_option("--override", overrides, "dotted-key=value config override");
  pi_report->add_option("--band-policy", band_policy_spec,
                        "quantile or absolute:<blue_ms>,<yellow_ms>");
  pi_report->add_option("--dot", dot_path, "also write a DOT rendering here");

  auto* sensors_export = app.add_subcommand("sensors-export", "run a scenario and dump sensor CSVs");
  sensors_export->add_option("config", config_path, "scenario config path")->required();
  sensors_export->add_option("--seed", seed_flag, "seed override");
  sensors_export->add_option("--override", overrides, "dotted-key=value config override");
  sensors_export->add_option("--sensor", sensor_id, "print one sensor's CSV to stdout");
  sensors_export->add_option("-o,--out", sensors_out, "write one CSV per sensor here");

  auto* migrate = app.add_subcommand("migrate-demo",
                                     "compare the wrapped legacy service against direct calls");
  migrate->add_option("--requests", demo_requests, "randomized request count (default 1000)")
      ->check(CLI::NonNegativeNumber);
  migrate->add_option("--seed", demo_seed, "corpus seed");
  migrate->add_flag("--inject-fault", inject_fault, "corrupt the wrapper to force a mismatch");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return cmd_validate(config_path);
    if (app.got_subcommand(simulate)) {
      return cmd_simulate(config_path, out_dir, overrides, seed_flag);
    }
    if (app.got_subcommand(pi_report)) {
      return cmd_pi_report(config_path, overrides, seed_flag, band_policy_spec, dot_path);
    }
    if (app.got_subcommand(sensors_export)) {
      return cmd_sensors_export(config_path, overrides, seed_flag, sensor_id, sensors_out);
    }
    if (app.got_subcommand(migrate)) {
      std::uint64_t seed = demo_seed;
      if (migrate->count("--seed") == 0) {
        if (const char* env = std::getenv("FOGRAPH_SEED")) {
          try {
            seed = static_cast<std::uint64_t>(std::stoull(env));
          } catch (const std::exception&) {
            throw Error(Errc::SchemaError, "FOGRAPH_SEED must be an unsigned integer");
          }
        }
      }
      return cmd_migrate_demo(seed, demo_requests, inject_fault);
    }
  } catch (const fograph::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
