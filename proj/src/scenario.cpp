#include "fograph/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "fograph/errors.hpp"
#include "fograph/json_util.hpp"

namespace fograph::netsim {

namespace ju = jsonutil;

double WorkUnits::of(Granularity g) const {
  switch (g) {
    case Granularity::Mini:
      return mini;
    case Granularity::Macro:
      return macro_;
    case Granularity::Mega:
      return mega;
  }
  return mini;
}

std::string Scenario::resolve_prober() const {
  if (prober) return *prober;
  for (const auto& id : topology.node_ids()) {
    if (topology.node(id).role == Role::ClusterFrontend) return id;
  }
  return topology.node_ids().front();
}

std::optional<std::string> Scenario::origin_for(const ServiceConfig& service) const {
  if (service.origin_node_id) return service.origin_node_id;
  for (const auto& w : workload) {
    if (w.service_name == service.descriptor.name) return w.client_node_id;
  }
  return std::nullopt;
}

namespace {

std::pair<double, double> parse_range(const nlohmann::json& obj, const std::string& key,
                                      const std::string& path,
                                      std::pair<double, double> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& arr = obj.at(key);
  const std::string full = ju::key_path(path, key);
  if (!arr.is_array() || arr.size() != 2) ju::fail(full, "expected [min, max]");
  return {ju::as_number(arr[0], full + "[0]"), ju::as_number(arr[1], full + "[1]")};
}

placement::PlacementPolicy parse_policy(const nlohmann::json& config) {
  placement::PlacementPolicy policy;
  if (!config.contains("placement_policy")) return policy;
  const auto& jp = config.at("placement_policy");
  const std::string path = "placement_policy";
  if (!jp.is_object()) ju::fail(path, "expected an object");
  policy.confidential_fog_only = ju::opt_bool(jp, "confidential_fog_only", path, true);
  policy.mega_prefers_premises = ju::opt_bool(jp, "mega_prefers_premises", path, true);
  policy.max_mega_hops_from_premises =
      static_cast<int>(ju::opt_uint(jp, "max_mega_hops_from_premises", path, 1));
  policy.strict_measured = ju::opt_bool(jp, "strict_measured", path, false);
  return policy;
}

metrics::BandPolicy parse_band_policy(const nlohmann::json& config) {
  if (!config.contains("band_policy")) return metrics::BandPolicy::quantile();
  const auto& jb = config.at("band_policy");
  const std::string path = "band_policy";
  if (!jb.is_object()) ju::fail(path, "expected an object");
  const auto kind = ju::opt_string(jb, "kind", path, "quantile");
  if (kind == "quantile") return metrics::BandPolicy::quantile();
  if (kind == "absolute") {
    return metrics::BandPolicy::absolute(ju::req_number(jb, "blue_max_ms", path),
                                         ju::req_number(jb, "yellow_max_ms", path));
  }
  ju::fail(path + ".kind", "expected 'quantile' or 'absolute'");
}

WorkUnits parse_work_units(const nlohmann::json& config) {
  WorkUnits work;
  if (!config.contains("work_units")) return work;
  const auto& jw = config.at("work_units");
  const std::string path = "work_units";
  if (!jw.is_object()) ju::fail(path, "expected an object");
  work.mini = ju::opt_number(jw, "mini", path, work.mini);
  work.macro_ = ju::opt_number(jw, "macro", path, work.macro_);
  work.mega = ju::opt_number(jw, "mega", path, work.mega);
  if (work.mini <= 0 || work.macro_ <= 0 || work.mega <= 0) {
    ju::fail(path, "work units must be positive");
  }
  return work;
}

SensorConfig parse_sensor(const nlohmann::json& js, const std::string& path) {
  SensorConfig sensor;
  auto& spec = sensor.spec;
  spec.sensor_id = ju::req_string(js, "sensor_id", path);
  spec.kind = sensors::sensor_kind_from_string(
      ju::opt_string(js, "kind", path, "temperature_humidity"));
  spec.host_node_id = ju::req_string(js, "host_node_id", path);
  spec.temp_range_c = parse_range(js, "temp_range_c", path, {-40.0, 80.0});
  spec.humidity_range_pct = parse_range(js, "humidity_range_pct", path, {0.0, 100.0});

  const double interval_s = ju::opt_number(js, "interval_s", path, 60.0);
  if (interval_s <= 0) {
    throw Error(Errc::InvalidInterval, ju::key_path(path, "interval_s") + " must be positive");
  }
  sensor.interval_us = s_to_us(interval_s);

  auto& model = spec.model;
  const double mid_t = (spec.temp_range_c.first + spec.temp_range_c.second) / 2.0;
  const double mid_h = (spec.humidity_range_pct.first + spec.humidity_range_pct.second) / 2.0;
  if (js.contains("model")) {
    const auto& jm = js.at("model");
    const std::string mpath = ju::key_path(path, "model");
    if (!jm.is_object()) ju::fail(mpath, "expected an object");
    const auto kind = ju::opt_string(jm, "kind", mpath, "constant");
    if (kind == "constant") {
      model.kind = sensors::SensorModel::Kind::Constant;
      model.temperature_c = ju::opt_number(jm, "temperature_c", mpath, model.temperature_c);
      model.humidity_pct = ju::opt_number(jm, "humidity_pct", mpath, model.humidity_pct);
    } else if (kind == "random_walk") {
      model.kind = sensors::SensorModel::Kind::RandomWalk;
      model.step_sd = ju::opt_number(jm, "step_sd", mpath, 0.5);
      model.temperature_c = ju::opt_number(jm, "start_temperature_c", mpath, mid_t);
      model.humidity_pct = ju::opt_number(jm, "start_humidity_pct", mpath, mid_h);
    } else {
      ju::fail(mpath + ".kind", "expected 'constant' or 'random_walk'");
    }
  }
  sensors::validate_spec(spec);
  return sensor;
}

}  // namespace

Scenario parse_scenario(const nlohmann::json& config) {
  if (!config.is_object()) ju::fail("$", "scenario config must be a JSON object");
  Scenario sc;
  sc.seed = ju::opt_uint(config, "seed", "", 0);

  const double duration_s = ju::opt_number(config, "duration_s", "", 300.0);
  if (duration_s <= 0) ju::fail("duration_s", "must be positive");
  sc.duration_us = s_to_us(duration_s);

  const double probe_interval_s = ju::opt_number(config, "probe_interval_s", "", 60.0);
  if (probe_interval_s <= 0) ju::fail("probe_interval_s", "must be positive");
  sc.probe_interval_us = s_to_us(probe_interval_s);

  sc.topology = build_topology(config);
  sc.policy = parse_policy(config);
  sc.band_policy = parse_band_policy(config);
  sc.work_units = parse_work_units(config);
  sc.pi_window = ju::opt_uint(config, "pi_window", "", 0);

  if (config.contains("prober")) {
    sc.prober = ju::as_string(config.at("prober"), "prober");
    if (!sc.topology.has_node(*sc.prober)) ju::fail("prober", "names an unknown node");
  }

  std::set<std::string> service_ids;
  std::set<std::string> service_names;
  for (const auto& [idx, js] : ju::req_array(config, "services", "").items()) {
    const std::string path = "services[" + idx + "]";
    ServiceConfig svc;
    auto& d = svc.descriptor;
    d.service_id = ju::req_string(js, "service_id", path);
    d.name = ju::req_string(js, "name", path);
    d.granularity = granularity_from_string(ju::req_string(js, "granularity", path));
    d.security = security_from_string(ju::req_string(js, "security", path));
    d.payload_bytes =
        ju::opt_uint(js, "payload_bytes", path, default_payload_bytes(d.granularity));
    d.version = ju::opt_uint(js, "version", path, 1);
    d.migration_state = ju::opt_string(js, "migration_state", path, "native");
    validate_descriptor(d);
    if (!service_ids.insert(d.service_id).second) {
      ju::fail(path + ".service_id", "is not unique");
    }
    service_names.insert(d.name);

    if (js.contains("hosts")) {
      const auto& jh = js.at("hosts");
      const std::string hpath = ju::key_path(path, "hosts");
      if (!jh.is_array()) ju::fail(hpath, "expected an array");
      for (std::size_t i = 0; i < jh.size(); ++i) {
        const std::string one = hpath + "[" + std::to_string(i) + "]";
        const auto host = ju::as_string(jh[i], one);
        if (!sc.topology.has_node(host)) ju::fail(one, "names an unknown node");
        svc.pinned_hosts.push_back(host);
      }
    }
    if (js.contains("origin")) {
      svc.origin_node_id = ju::as_string(js.at("origin"), ju::key_path(path, "origin"));
      if (!sc.topology.has_node(*svc.origin_node_id)) {
        ju::fail(ju::key_path(path, "origin"), "names an unknown node");
      }
    }
    sc.services.push_back(std::move(svc));
  }

  for (const auto& [idx, jw] : ju::req_array(config, "workload", "").items()) {
    const std::string path = "workload[" + idx + "]";
    WorkloadEntry entry;
    entry.client_node_id = ju::req_string(jw, "client", path);
    entry.service_name = ju::req_string(jw, "service_name", path);
    entry.rate_per_s = ju::req_number(jw, "rate_per_s", path);
    if (!sc.topology.has_node(entry.client_node_id)) {
      ju::fail(ju::key_path(path, "client"), "names an unknown node");
    }
    if (service_names.count(entry.service_name) == 0) {
      ju::fail(ju::key_path(path, "service_name"), "names an unknown service");
    }
    if (entry.rate_per_s < 0) {
      ju::fail(ju::key_path(path, "rate_per_s"), "must not be negative");
    }
    sc.workload.push_back(std::move(entry));
  }

  if (config.contains("sensors")) {
    std::set<std::string> sensor_ids;
    const auto& ja = config.at("sensors");
    if (!ja.is_array()) ju::fail("sensors", "expected an array");
    for (const auto& [idx, js] : ja.items()) {
      const std::string path = "sensors[" + idx + "]";
      auto sensor = parse_sensor(js, path);
      if (!sc.topology.has_node(sensor.spec.host_node_id)) {
        ju::fail(ju::key_path(path, "host_node_id"), "names an unknown node");
      }
      if (!sensor_ids.insert(sensor.spec.sensor_id).second) {
        ju::fail(ju::key_path(path, "sensor_id"), "is not unique");
      }
      sc.sensors.push_back(std::move(sensor));
    }
  }

  // Pinned hosts must pass the placement policy the simulation will enforce.
  for (std::size_t i = 0; i < sc.services.size(); ++i) {
    const auto& svc = sc.services[i];
    std::optional<std::string> origin_premises;
    if (auto origin = sc.origin_for(svc)) origin_premises = sc.topology.premises_of(*origin);
    for (std::size_t h = 0; h < svc.pinned_hosts.size(); ++h) {
      const auto& node = sc.topology.node(svc.pinned_hosts[h]);
      if (auto violation = placement::placement_violation(svc.descriptor, node, &sc.topology,
                                                          sc.policy, origin_premises)) {
        throw Error(Errc::ConstraintViolation, "services[" + std::to_string(i) + "].hosts[" +
                                                   std::to_string(h) + "]: " + *violation);
      }
    }
  }

  return sc;
}

nlohmann::ordered_json default_scenario_json() {
  nlohmann::ordered_json j;
  j["seed"] = 42;
  j["duration_s"] = 300;
  j["probe_interval_s"] = 60;

  auto node = [](const char* id, const char* plane, const char* premises, const char* role,
                 const char* link, bool mobile, double capacity, const char* tag) {
    nlohmann::ordered_json n;
    n["node_id"] = id;
    n["plane"] = plane;
    if (premises != nullptr) n["premises_id"] = premises;
    n["role"] = role;
    n["link"] = link;
    n["mobile"] = mobile;
    n["cpu_capacity"] = capacity;
    n["heterogeneity_tag"] = tag;
    return n;
  };
  j["nodes"] = nlohmann::ordered_json::array(
      {node("cluster-frontend", "fog", "tg-lab", "cluster_frontend", "wired", false, 4000.0,
            "x86-frontend"),
       node("tg-master-1", "fog", "tg-lab", "master", "wired", true, 1000.0, "sbc-arm"),
       node("tg-master-2", "fog", "tg-lab", "master", "wired", true, 1000.0, "sbc-arm"),
       node("tg-slave-1", "fog", "tg-lab", "slave", "wireless", true, 500.0, "sbc-arm"),
       node("tg-slave-2", "fog", "tg-lab", "slave", "wireless", true, 500.0, "sbc-arm"),
       node("tg-slave-3", "fog", "tg-lab", "slave", "wireless", true, 500.0, "sbc-arm"),
       node("tg-slave-4", "fog", "tg-lab", "slave", "wireless", true, 500.0, "sbc-arm"),
       node("cloud-dc", "cloud", nullptr, "cloud_dc", "wired", false, 10000.0, "datacenter-vm")});

  auto link = [](const char* a, const char* b, double latency_ms, const char* kind) {
    nlohmann::ordered_json l;
    l["a"] = a;
    l["b"] = b;
    l["base_latency_ms"] = latency_ms;
    l["kind"] = kind;
    return l;
  };
  j["links"] = nlohmann::ordered_json::array(
      {link("cluster-frontend", "tg-master-1", 2.0, "wired"),
       link("cluster-frontend", "tg-master-2", 2.0, "wired"),
       link("tg-master-1", "tg-slave-1", 2.0, "wireless"),
       link("tg-master-1", "tg-slave-2", 2.0, "wireless"),
       link("tg-master-2", "tg-slave-3", 2.0, "wireless"),
       link("tg-master-2", "tg-slave-4", 2.0, "wireless"),
       link("cluster-frontend", "cloud-dc", 50.0, "wired")});
  j["links"].back()["jitter_ms"] = 5.0;

  j["access_routers"] =
      nlohmann::ordered_json::array({{{"router_id", "ar-1"}, {"premises_id", "tg-lab"}}});

  auto service = [](const char* id, const char* name, const char* granularity,
                    const char* security, std::uint64_t payload, std::uint64_t version) {
    nlohmann::ordered_json s;
    s["service_id"] = id;
    s["name"] = name;
    s["granularity"] = granularity;
    s["security"] = security;
    s["payload_bytes"] = payload;
    s["version"] = version;
    return s;
  };
  j["services"] = nlohmann::ordered_json::array();
  {
    auto s = service("svc-temp", "temperature-service", "mini", "public", 256, 1);
    s["hosts"] = nlohmann::ordered_json::array({"tg-slave-1", "tg-slave-3"});
    j["services"].push_back(std::move(s));
  }
  {
    auto s = service("svc-humid", "humidity-service", "mini", "public", 256, 1);
    s["hosts"] = nlohmann::ordered_json::array({"tg-slave-2", "tg-slave-4"});
    j["services"].push_back(std::move(s));
  }
  j["services"].push_back(service("svc-calc", "calculating-service", "macro", "public", 1024, 2));
  j["services"].push_back(
      service("svc-archive", "premises-archive", "mega", "confidential", 1048576, 1));

  auto workload = [](const char* client, const char* name, double rate) {
    nlohmann::ordered_json w;
    w["client"] = client;
    w["service_name"] = name;
    w["rate_per_s"] = rate;
    return w;
  };
  j["workload"] = nlohmann::ordered_json::array(
      {workload("tg-slave-2", "temperature-service", 0.05),
       workload("tg-master-1", "calculating-service", 0.02),
       workload("cloud-dc", "temperature-service", 0.01),
       workload("tg-slave-4", "premises-archive", 0.005)});

  j["sensors"] = nlohmann::ordered_json::array();
  for (const auto& [id, host] :
       std::vector<std::pair<const char*, const char*>>{{"dht22-1", "tg-slave-1"},
                                                        {"dht22-2", "tg-slave-3"}}) {
    nlohmann::ordered_json s;
    s["sensor_id"] = id;
    s["kind"] = "temperature_humidity";
    s["host_node_id"] = host;
    s["interval_s"] = 60;
    s["temp_range_c"] = nlohmann::ordered_json::array({-40.0, 80.0});
    s["humidity_range_pct"] = nlohmann::ordered_json::array({0.0, 100.0});
    s["model"] = nlohmann::ordered_json{{"kind", "random_walk"},
                                        {"step_sd", 0.4},
                                        {"start_temperature_c", 21.0},
                                        {"start_humidity_pct", 45.0}};
    j["sensors"].push_back(std::move(s));
  }

  j["placement_policy"] = nlohmann::ordered_json{{"confidential_fog_only", true},
                                                 {"mega_prefers_premises", true},
                                                 {"max_mega_hops_from_premises", 1},
                                                 {"strict_measured", false}};
  j["band_policy"] = nlohmann::ordered_json{{"kind", "quantile"}};
  return j;
}

void apply_override(nlohmann::json& config, const std::string& dotted_key,
                    const std::string& value) {
  if (dotted_key.empty()) ju::fail("override", "key must not be empty");
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted_key.find('.', start);
    parts.push_back(dotted_key.substr(start, dot - start));
    if (parts.back().empty()) ju::fail(dotted_key, "override key has an empty segment");
    if (dot == std::string::npos) break;
    start = dot + 1;
  }

  nlohmann::json* cur = &config;
  std::string walked;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& part = parts[i];
    walked = walked.empty() ? part : walked + "." + part;
    const bool last = i + 1 == parts.size();
    if (cur->is_array()) {
      std::size_t index = 0;
      const char* first = part.data();
      const char* end = part.data() + part.size();
      auto [p, ec] = std::from_chars(first, end, index);
      if (ec != std::errc() || p != end) ju::fail(walked, "expected an array index");
      if (index >= cur->size()) ju::fail(walked, "array index out of range");
      cur = &(*cur)[index];
    } else if (cur->is_object() || cur->is_null()) {
      if (cur->is_null()) *cur = nlohmann::json::object();
      if (!last && !cur->contains(part)) (*cur)[part] = nlohmann::json::object();
      cur = &(*cur)[part];
    } else {
      ju::fail(walked, "cannot descend into a scalar");
    }
    if (last) {
      auto parsed = nlohmann::json::parse(value, nullptr, false);
      *cur = parsed.is_discarded() ? nlohmann::json(value) : parsed;
    }
  }
}

}  // namespace fograph::netsim
