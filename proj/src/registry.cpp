#include "fograph/registry.hpp"

#include <fnmatch.h>

#include <mutex>

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "fograph/errors.hpp"
#include "fograph/json_util.hpp"

namespace fograph::registry {

namespace {

std::string format_registration_id(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "reg-%06" PRIu64, n);
  return buf;
}

bool same_descriptor(const ServiceDescriptor& a, const ServiceDescriptor& b) {
  return a.name == b.name && a.granularity == b.granularity && a.security == b.security &&
         a.payload_bytes == b.payload_bytes && a.version == b.version &&
         a.migration_state == b.migration_state;
}

bool glob_match(const std::string& pattern, const std::string& name) {
  return ::fnmatch(pattern.c_str(), name.c_str(), 0) == 0;
}

}  // namespace

WrappedService wrap_legacy(const LegacyService& legacy, ServiceDescriptor descriptor) {
  if (legacy.call_shape != CallShape::LegacyV0) {
    throw Error(Errc::ShapeUnsupported,
                "legacy service " + legacy.legacy_id + " has an unsupported call shape");
  }
  if (!legacy.handler) {
    throw Error(Errc::InvalidDescriptor, "legacy service " + legacy.legacy_id + " has no handler");
  }
  descriptor.migration_state = "wrapped";
  validate_descriptor(descriptor);
  WrappedService wrapped;
  wrapped.descriptor = std::move(descriptor);
  LegacyHandler handler = legacy.handler;
  wrapped.invoke = [handler](const std::string& request) { return handler(request); };
  return wrapped;
}

std::string legacy_calculating_handler(const std::string& request) {
  std::istringstream in(request);
  std::string op;
  long long a = 0;
  long long b = 0;
  if (!(in >> op >> a >> b)) return "ERR";
  std::string rest;
  if (in >> rest) return "ERR";
  long long result = 0;
  if (op == "add") {
    result = a + b;
  } else if (op == "sub") {
    result = a - b;
  } else if (op == "mul") {
    result = a * b;
  } else {
    return "ERR";
  }
  return std::to_string(result);
}

void Registry::attach_topology(const netsim::Topology* topology) {
  std::unique_lock lock(mutex_);
  topology_ = topology;
}

void Registry::attach_metrics(const metrics::SampleStore* store) {
  std::unique_lock lock(mutex_);
  store_ = store;
}

void Registry::set_policy(placement::PlacementPolicy policy) {
  std::unique_lock lock(mutex_);
  policy_ = policy;
}

const placement::PlacementPolicy& Registry::policy() const { return policy_; }

void Registry::set_service_origin(const std::string& service_id, const std::string& premises_id) {
  std::unique_lock lock(mutex_);
  origin_premises_[service_id] = premises_id;
}

void Registry::add_node(const NodeDescriptor& node) {
  validate_node(node);
  std::unique_lock lock(mutex_);
  if (!nodes_.try_emplace(node.node_id, node).second) {
    throw Error(Errc::DuplicateNode, "node " + node.node_id + " already exists");
  }
}

bool Registry::has_node(const std::string& node_id) const {
  std::shared_lock lock(mutex_);
  return nodes_.count(node_id) != 0;
}

const NodeDescriptor& Registry::node(const std::string& node_id) const {
  std::shared_lock lock(mutex_);
  auto it = nodes_.find(node_id);
  if (it == nodes_.end()) throw Error(Errc::UnknownNode, "unknown node " + node_id);
  return it->second;
}

std::vector<NodeDescriptor> Registry::nodes() const {
  std::shared_lock lock(mutex_);
  std::vector<NodeDescriptor> out;
  out.reserve(nodes_.size());
  for (const auto& [id, n] : nodes_) out.push_back(n);
  return out;
}

Registration Registry::register_service(const ServiceDescriptor& service,
                                        const std::string& node_id, SimTimeUs at_us) {
  validate_descriptor(service);
  std::unique_lock lock(mutex_);
  auto node_it = nodes_.find(node_id);
  if (node_it == nodes_.end()) {
    throw Error(Errc::UnknownNode, "cannot register on unknown node " + node_id);
  }
  auto svc_it = services_.find(service.service_id);
  if (svc_it != services_.end() && !same_descriptor(svc_it->second, service)) {
    throw Error(Errc::InvalidDescriptor,
                "service " + service.service_id + " re-registered with a conflicting descriptor");
  }
  if (live_pairs_.count({service.service_id, node_id}) != 0) {
    throw Error(Errc::DuplicateRegistration,
                "service " + service.service_id + " is already live on node " + node_id);
  }
  std::optional<std::string> origin;
  if (auto it = origin_premises_.find(service.service_id); it != origin_premises_.end()) {
    origin = it->second;
  }
  if (auto violation =
          placement::placement_violation(service, node_it->second, topology_, policy_, origin)) {
    throw Error(Errc::ConstraintViolation, *violation);
  }

  services_[service.service_id] = service;
  Registration reg;
  reg.registration_id = format_registration_id(next_registration_++);
  reg.service_id = service.service_id;
  reg.node_id = node_id;
  reg.registered_at_us = at_us;
  live_[reg.registration_id] = reg;
  live_pairs_.insert({service.service_id, node_id});
  return reg;
}

void Registry::unregister(const std::string& registration_id) {
  std::unique_lock lock(mutex_);
  auto it = live_.find(registration_id);
  if (it == live_.end()) {
    throw Error(Errc::UnknownRegistration, "unknown registration " + registration_id);
  }
  live_pairs_.erase({it->second.service_id, it->second.node_id});
  live_.erase(it);
}

metrics::PiTable Registry::pi_table_or_empty() const {
  return store_ != nullptr ? store_->pi_table() : metrics::PiTable{};
}

std::vector<Registration> Registry::live_by_name_locked(const std::string& service_name) const {
  std::vector<Registration> out;
  for (const auto& [id, reg] : live_) {
    auto it = services_.find(reg.service_id);
    if (it != services_.end() && it->second.name == service_name) out.push_back(reg);
  }
  std::sort(out.begin(), out.end(), [](const Registration& a, const Registration& b) {
    return std::tie(a.node_id, a.service_id, a.registration_id) <
           std::tie(b.node_id, b.service_id, b.registration_id);
  });
  return out;
}

Registration Registry::lookup_unicast_locked(const std::string& service_name) const {
  const auto regs = live_by_name_locked(service_name);
  if (regs.empty()) {
    throw Error(Errc::NotFound, "service " + service_name + " has no live registration");
  }
  std::vector<std::string> node_order;
  for (const auto& r : regs) {
    if (node_order.empty() || node_order.back() != r.node_id) node_order.push_back(r.node_id);
  }
  const auto chosen =
      placement::lowest_pi_node(node_order, pi_table_or_empty(), policy_.strict_measured);
  for (const auto& r : regs) {
    if (r.node_id == *chosen) return r;
  }
  return regs.front();
}

Registration Registry::lookup_unicast(const std::string& service_name) const {
  std::shared_lock lock(mutex_);
  return lookup_unicast_locked(service_name);
}

std::vector<Registration> Registry::lookup_multicast(const std::string& pattern) const {
  std::shared_lock lock(mutex_);
  std::vector<Registration> out;
  for (const auto& [id, reg] : live_) {
    auto it = services_.find(reg.service_id);
    if (it != services_.end() && glob_match(pattern, it->second.name)) out.push_back(reg);
  }
  const auto pi = pi_table_or_empty();
  std::sort(out.begin(), out.end(), [&](const Registration& a, const Registration& b) {
    auto ia = pi.find(a.node_id);
    auto ib = pi.find(b.node_id);
    const bool ma = ia != pi.end() && ia->second.measured();
    const bool mb = ib != pi.end() && ib->second.measured();
    if (ma != mb) return ma;  // unmeasured hosts sort last
    if (ma && mb && !metrics::pi_equal(ia->second, ib->second)) {
      return metrics::pi_less(ia->second, ib->second);
    }
    return std::tie(a.node_id, a.service_id, a.registration_id) <
           std::tie(b.node_id, b.service_id, b.registration_id);
  });
  return out;
}

const ServiceDescriptor& Registry::service(const std::string& service_id) const {
  std::shared_lock lock(mutex_);
  auto it = services_.find(service_id);
  if (it == services_.end()) throw Error(Errc::NotFound, "unknown service " + service_id);
  return it->second;
}

bool Registry::has_service(const std::string& service_id) const {
  std::shared_lock lock(mutex_);
  return services_.count(service_id) != 0;
}

std::vector<ServiceDescriptor> Registry::services() const {
  std::shared_lock lock(mutex_);
  std::vector<ServiceDescriptor> out;
  out.reserve(services_.size());
  for (const auto& [id, s] : services_) out.push_back(s);
  return out;
}

std::vector<Registration> Registry::live_registrations() const {
  std::shared_lock lock(mutex_);
  std::vector<Registration> out;
  out.reserve(live_.size());
  for (const auto& [id, reg] : live_) out.push_back(reg);
  return out;
}

std::vector<Registration> Registry::registrations_by_name(const std::string& service_name) const {
  std::shared_lock lock(mutex_);
  return live_by_name_locked(service_name);
}

Registration Registry::registration_for(const std::string& service_name,
                                        const std::string& node_id) const {
  std::shared_lock lock(mutex_);
  for (const auto& r : live_by_name_locked(service_name)) {
    if (r.node_id == node_id) return r;
  }
  throw Error(Errc::NotFound,
              "service " + service_name + " has no live registration on node " + node_id);
}

std::optional<std::string> Registry::service_origin(const std::string& service_id) const {
  std::shared_lock lock(mutex_);
  auto it = origin_premises_.find(service_id);
  if (it == origin_premises_.end()) return std::nullopt;
  return it->second;
}

nlohmann::ordered_json Registry::dump_json() const {
  std::shared_lock lock(mutex_);
  nlohmann::ordered_json out;
  out["nodes"] = nlohmann::ordered_json::array();
  for (const auto& [id, n] : nodes_) {
    nlohmann::ordered_json j;
    j["node_id"] = n.node_id;
    j["plane"] = to_string(n.plane);
    if (n.premises_id) j["premises_id"] = *n.premises_id;
    j["role"] = to_string(n.role);
    j["link"] = to_string(n.link);
    j["mobile"] = n.mobile;
    j["cpu_capacity"] = n.cpu_capacity;
    j["heterogeneity_tag"] = n.heterogeneity_tag;
    out["nodes"].push_back(std::move(j));
  }
  out["services"] = nlohmann::ordered_json::array();
  for (const auto& [id, s] : services_) {
    nlohmann::ordered_json j;
    j["service_id"] = s.service_id;
    j["name"] = s.name;
    j["granularity"] = to_string(s.granularity);
    j["security"] = to_string(s.security);
    j["payload_bytes"] = s.payload_bytes;
    j["version"] = s.version;
    j["migration_state"] = s.migration_state;
    out["services"].push_back(std::move(j));
  }
  out["registrations"] = nlohmann::ordered_json::array();
  for (const auto& [id, r] : live_) {
    nlohmann::ordered_json j;
    j["registration_id"] = r.registration_id;
    j["service_id"] = r.service_id;
    j["node_id"] = r.node_id;
    j["registered_at"] = us_to_s(r.registered_at_us);
    out["registrations"].push_back(std::move(j));
  }
  return out;
}

void Registry::load_snapshot(const nlohmann::json& snapshot) {
  namespace ju = jsonutil;
  std::map<std::string, NodeDescriptor> nodes;
  std::map<std::string, ServiceDescriptor> services;
  std::map<std::string, Registration> live;
  std::set<std::pair<std::string, std::string>> live_pairs;

  for (const auto& [idx, jn] : ju::req_array(snapshot, "nodes", "").items()) {
    const std::string path = "nodes[" + idx + "]";
    NodeDescriptor n;
    n.node_id = ju::req_string(jn, "node_id", path);
    n.plane = plane_from_string(ju::req_string(jn, "plane", path));
    if (jn.contains("premises_id")) {
      n.premises_id = ju::as_string(jn.at("premises_id"), ju::key_path(path, "premises_id"));
    }
    n.role = role_from_string(ju::req_string(jn, "role", path));
    n.link = link_kind_from_string(ju::req_string(jn, "link", path));
    n.mobile = ju::opt_bool(jn, "mobile", path, false);
    n.cpu_capacity = ju::req_number(jn, "cpu_capacity", path);
    n.heterogeneity_tag = ju::opt_string(jn, "heterogeneity_tag", path, "");
    validate_node(n);
    if (!nodes.try_emplace(n.node_id, n).second) {
      ju::fail(path + ".node_id", "is not unique");
    }
  }
  for (const auto& [idx, js] : ju::req_array(snapshot, "services", "").items()) {
    const std::string path = "services[" + idx + "]";
    ServiceDescriptor s;
    s.service_id = ju::req_string(js, "service_id", path);
    s.name = ju::req_string(js, "name", path);
    s.granularity = granularity_from_string(ju::req_string(js, "granularity", path));
    s.security = security_from_string(ju::req_string(js, "security", path));
    s.payload_bytes =
        ju::opt_uint(js, "payload_bytes", path, default_payload_bytes(s.granularity));
    s.version = ju::opt_uint(js, "version", path, 1);
    s.migration_state = ju::opt_string(js, "migration_state", path, "native");
    validate_descriptor(s);
    if (!services.try_emplace(s.service_id, s).second) {
      ju::fail(path + ".service_id", "is not unique");
    }
  }
  std::uint64_t max_seq = 0;
  for (const auto& [idx, jr] : ju::req_array(snapshot, "registrations", "").items()) {
    const std::string path = "registrations[" + idx + "]";
    Registration r;
    r.registration_id = ju::req_string(jr, "registration_id", path);
    r.service_id = ju::req_string(jr, "service_id", path);
    r.node_id = ju::req_string(jr, "node_id", path);
    r.registered_at_us = s_to_us(ju::opt_number(jr, "registered_at", path, 0.0));
    if (services.count(r.service_id) == 0) {
      ju::fail(path + ".service_id", "references an unknown service");
    }
    if (nodes.count(r.node_id) == 0) {
      ju::fail(path + ".node_id", "references an unknown node");
    }
    if (!live_pairs.insert({r.service_id, r.node_id}).second) {
      ju::fail(path, "duplicates a live (service, node) pair");
    }
    if (!live.emplace(r.registration_id, r).second) {
      ju::fail(path + ".registration_id", "is not unique");
    }
    const auto dash = r.registration_id.rfind('-');
    if (dash != std::string::npos) {
      std::uint64_t seq = 0;
      const char* first = r.registration_id.data() + dash + 1;
      const char* last = r.registration_id.data() + r.registration_id.size();
      if (auto [p, ec] = std::from_chars(first, last, seq);
          ec == std::errc() && p == last && seq > max_seq) {
        max_seq = seq;
      }
    }
  }

  std::unique_lock lock(mutex_);
  nodes_ = std::move(nodes);
  services_ = std::move(services);
  live_ = std::move(live);
  live_pairs_ = std::move(live_pairs);
  origin_premises_.clear();
  next_registration_ = max_seq + 1;
}

}  // namespace fograph::registry
