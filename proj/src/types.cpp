#include "fograph/types.hpp"

#include <cmath>

#include "fograph/errors.hpp"

namespace fograph {

SimTimeUs ms_to_us(double ms) {
  if (ms < 0.0) {
    throw Error(Errc::NegativeRt, "negative duration: " + std::to_string(ms) + " ms");
  }
  return static_cast<SimTimeUs>(std::llround(ms * 1000.0));
}

SimTimeUs s_to_us(double s) {
  if (s < 0.0) {
    throw Error(Errc::NegativeRt, "negative duration: " + std::to_string(s) + " s");
  }
  return static_cast<SimTimeUs>(std::llround(s * 1.0e6));
}

const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::Mini: return "mini";
    case Granularity::Macro: return "macro";
    case Granularity::Mega: return "mega";
  }
  return "?";
}

const char* to_string(Security s) {
  return s == Security::Public ? "public" : "confidential";
}

const char* to_string(Plane p) { return p == Plane::Fog ? "fog" : "cloud"; }

const char* to_string(Role r) {
  switch (r) {
    case Role::Master: return "master";
    case Role::Slave: return "slave";
    case Role::ClusterFrontend: return "cluster_frontend";
    case Role::CloudDC: return "cloud_dc";
  }
  return "?";
}

const char* to_string(LinkKind k) { return k == LinkKind::Wired ? "wired" : "wireless"; }

namespace {
[[noreturn]] void bad_enum(const char* what, const std::string& value) {
  throw Error(Errc::SchemaError, std::string("unknown ") + what + " value: \"" + value + "\"");
}
}  // namespace

Granularity granularity_from_string(const std::string& s) {
  if (s == "mini") return Granularity::Mini;
  if (s == "macro") return Granularity::Macro;
  if (s == "mega") return Granularity::Mega;
  bad_enum("granularity", s);
}

Security security_from_string(const std::string& s) {
  if (s == "public") return Security::Public;
  if (s == "confidential") return Security::Confidential;
  bad_enum("security", s);
}

Plane plane_from_string(const std::string& s) {
  if (s == "fog") return Plane::Fog;
  if (s == "cloud") return Plane::Cloud;
  bad_enum("plane", s);
}

Role role_from_string(const std::string& s) {
  if (s == "master") return Role::Master;
  if (s == "slave") return Role::Slave;
  if (s == "cluster_frontend") return Role::ClusterFrontend;
  if (s == "cloud_dc") return Role::CloudDC;
  bad_enum("role", s);
}

LinkKind link_kind_from_string(const std::string& s) {
  if (s == "wired") return LinkKind::Wired;
  if (s == "wireless") return LinkKind::Wireless;
  bad_enum("link kind", s);
}

std::uint64_t default_payload_bytes(Granularity g) {
  switch (g) {
    case Granularity::Mini: return 256;
    case Granularity::Macro: return 4096;
    case Granularity::Mega: return 1048576;
  }
  return 0;
}

void validate_descriptor(const ServiceDescriptor& service) {
  if (service.service_id.empty()) {
    throw Error(Errc::InvalidDescriptor, "service_id must be non-empty");
  }
  if (service.name.empty()) {
    throw Error(Errc::InvalidDescriptor, "service \"" + service.service_id + "\" has empty name");
  }
}

void validate_node(const NodeDescriptor& node) {
  if (node.node_id.empty()) {
    throw Error(Errc::InvalidDescriptor, "node_id must be non-empty");
  }
  if (node.plane == Plane::Cloud && node.premises_id.has_value()) {
    throw Error(Errc::InvalidDescriptor,
                "cloud node \"" + node.node_id + "\" must not carry premises_id");
  }
  if (node.plane == Plane::Fog && !node.premises_id.has_value()) {
    throw Error(Errc::InvalidDescriptor,
                "fog node \"" + node.node_id + "\" requires premises_id");
  }
  if (!(node.cpu_capacity > 0.0)) {
    throw Error(Errc::InvalidDescriptor,
                "node \"" + node.node_id + "\" cpu_capacity must be > 0");
  }
}

}  // namespace fograph
