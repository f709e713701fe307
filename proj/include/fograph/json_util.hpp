#ifndef FOGRAPH_JSON_UTIL_HPP
#define FOGRAPH_JSON_UTIL_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "fograph/errors.hpp"

namespace fograph::jsonutil {

/// Typed accessors for config parsing. Every failure throws SchemaError with
/// the dotted key path, so diagnostics always name the offending key.

[[noreturn]] inline void fail(const std::string& key, const std::string& what) {
  throw Error(Errc::SchemaError, key + ": " + what);
}

inline const nlohmann::json& require(const nlohmann::json& obj, const std::string& key,
                                     const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(path.empty() ? key : path + "." + key, "missing required key");
  }
  return obj.at(key);
}

inline std::string key_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline std::string as_string(const nlohmann::json& value, const std::string& key) {
  if (!value.is_string()) fail(key, "expected a string");
  return value.get<std::string>();
}

inline double as_number(const nlohmann::json& value, const std::string& key) {
  if (!value.is_number()) fail(key, "expected a number");
  return value.get<double>();
}

inline std::uint64_t as_uint(const nlohmann::json& value, const std::string& key) {
  // signedness is a storage detail, not part of JSON; 42 and 42u both pass
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  }
  fail(key, "expected a non-negative integer");
}

inline bool as_bool(const nlohmann::json& value, const std::string& key) {
  if (!value.is_boolean()) fail(key, "expected a boolean");
  return value.get<bool>();
}

inline std::string req_string(const nlohmann::json& obj, const std::string& key,
                              const std::string& path) {
  return as_string(require(obj, key, path), key_path(path, key));
}

inline double req_number(const nlohmann::json& obj, const std::string& key,
                         const std::string& path) {
  return as_number(require(obj, key, path), key_path(path, key));
}

inline std::uint64_t req_uint(const nlohmann::json& obj, const std::string& key,
                              const std::string& path) {
  return as_uint(require(obj, key, path), key_path(path, key));
}

inline std::string opt_string(const nlohmann::json& obj, const std::string& key,
                              const std::string& path, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  return as_string(obj.at(key), key_path(path, key));
}

inline double opt_number(const nlohmann::json& obj, const std::string& key,
                         const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  return as_number(obj.at(key), key_path(path, key));
}

inline std::uint64_t opt_uint(const nlohmann::json& obj, const std::string& key,
                              const std::string& path, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  return as_uint(obj.at(key), key_path(path, key));
}

inline bool opt_bool(const nlohmann::json& obj, const std::string& key, const std::string& path,
                     bool fallback) {
  if (!obj.contains(key)) return fallback;
  return as_bool(obj.at(key), key_path(path, key));
}

inline const nlohmann::json& req_array(const nlohmann::json& obj, const std::string& key,
                                       const std::string& path) {
  const auto& value = require(obj, key, path);
  if (!value.is_array()) fail(key_path(path, key), "expected an array");
  return value;
}

}  // namespace fograph::jsonutil

#endif
