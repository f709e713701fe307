#include "fograph/sensors.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>

#include "fograph/errors.hpp"

namespace fograph::sensors {

namespace {

double clamp_to(double v, const std::pair<double, double>& range) {
  return std::clamp(v, range.first, range.second);
}

}  // namespace

const char* to_string(SensorKind k) {
  switch (k) {
    case SensorKind::TemperatureHumidity:
      return "temperature_humidity";
  }
  return "unknown";
}

SensorKind sensor_kind_from_string(const std::string& s) {
  if (s == "temperature_humidity") return SensorKind::TemperatureHumidity;
  throw Error(Errc::SchemaError, "unknown sensor kind '" + s + "'");
}

void validate_spec(const SensorSpec& spec) {
  if (spec.sensor_id.empty()) {
    throw Error(Errc::SchemaError, "sensor_id must not be empty");
  }
  if (spec.temp_range_c.first > spec.temp_range_c.second) {
    throw Error(Errc::SchemaError, "sensor " + spec.sensor_id + ": temperature range is inverted");
  }
  if (spec.humidity_range_pct.first > spec.humidity_range_pct.second) {
    throw Error(Errc::SchemaError, "sensor " + spec.sensor_id + ": humidity range is inverted");
  }
  if (spec.humidity_range_pct.first < 0.0 || spec.humidity_range_pct.second > 100.0) {
    throw Error(Errc::SchemaError,
                "sensor " + spec.sensor_id + ": humidity range must stay within 0..100");
  }
  if (spec.model.step_sd < 0.0) {
    throw Error(Errc::SchemaError, "sensor " + spec.sensor_id + ": step_sd must not be negative");
  }
}

SensorReading read_sensor(const SensorSpec& spec, SimTimeUs at_us, RngStream& rng,
                          const SensorReading* previous) {
  SensorReading r;
  r.sensor_id = spec.sensor_id;
  r.at_us = at_us;
  switch (spec.model.kind) {
    case SensorModel::Kind::Constant:
      r.temperature_c = spec.model.temperature_c;
      r.humidity_pct = spec.model.humidity_pct;
      break;
    case SensorModel::Kind::RandomWalk: {
      const double base_t = previous != nullptr ? previous->temperature_c : spec.model.temperature_c;
      const double base_h = previous != nullptr ? previous->humidity_pct : spec.model.humidity_pct;
      const double step_t = previous != nullptr ? rng.next_gaussian(0.0, spec.model.step_sd) : 0.0;
      const double step_h = previous != nullptr ? rng.next_gaussian(0.0, spec.model.step_sd) : 0.0;
      r.temperature_c = base_t + step_t;
      r.humidity_pct = base_h + step_h;
      break;
    }
  }
  r.temperature_c = clamp_to(r.temperature_c, spec.temp_range_c);
  r.humidity_pct = clamp_to(r.humidity_pct, spec.humidity_range_pct);
  return r;
}

std::vector<SensorReading> poll_series(const SensorSpec& spec, SimTimeUs interval_us,
                                       SimTimeUs duration_us, RngStream& rng) {
  if (interval_us <= 0) {
    throw Error(Errc::InvalidInterval,
                "sensor " + spec.sensor_id + ": poll interval must be positive");
  }
  std::vector<SensorReading> out;
  SensorReading previous;
  for (SimTimeUs at = interval_us; at <= duration_us; at += interval_us) {
    previous = read_sensor(spec, at, rng, out.empty() ? nullptr : &previous);
    out.push_back(previous);
  }
  return out;
}

void SensorStore::add_sensor(const SensorSpec& spec) {
  validate_spec(spec);
  std::unique_lock lock(mutex_);
  if (series_.count(spec.sensor_id) != 0) {
    throw Error(Errc::SchemaError, "sensor " + spec.sensor_id + " already exists");
  }
  series_[spec.sensor_id].spec = spec;
}

bool SensorStore::has_sensor(const std::string& sensor_id) const {
  std::shared_lock lock(mutex_);
  return series_.count(sensor_id) != 0;
}

const SensorStore::Series& SensorStore::series(const std::string& sensor_id) const {
  auto it = series_.find(sensor_id);
  if (it == series_.end()) {
    throw Error(Errc::UnknownSensor, "unknown sensor " + sensor_id);
  }
  return it->second;
}

const SensorSpec& SensorStore::spec(const std::string& sensor_id) const {
  std::shared_lock lock(mutex_);
  return series(sensor_id).spec;
}

std::vector<std::string> SensorStore::sensor_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  out.reserve(series_.size());
  for (const auto& [id, s] : series_) out.push_back(id);
  return out;
}

void SensorStore::store_reading(const SensorReading& reading) {
  std::unique_lock lock(mutex_);
  auto it = series_.find(reading.sensor_id);
  if (it == series_.end()) {
    throw Error(Errc::UnknownSensor, "unknown sensor " + reading.sensor_id);
  }
  auto& readings = it->second.readings;
  if (!readings.empty() && reading.at_us <= readings.back().at_us) {
    throw Error(Errc::SchemaError,
                "sensor " + reading.sensor_id + ": reading timestamps must strictly increase");
  }
  readings.push_back(reading);
}

SensorReading SensorStore::query_latest(const std::string& sensor_id) const {
  std::shared_lock lock(mutex_);
  const auto& s = series(sensor_id);
  if (s.readings.empty()) {
    throw Error(Errc::EmptySeries, "sensor " + sensor_id + " has no readings");
  }
  return s.readings.back();
}

std::vector<SensorReading> SensorStore::query_range(const std::string& sensor_id, SimTimeUs t0,
                                                    SimTimeUs t1) const {
  std::shared_lock lock(mutex_);
  const auto& s = series(sensor_id);
  std::vector<SensorReading> out;
  for (const auto& r : s.readings) {
    if (r.at_us >= t0 && r.at_us <= t1) out.push_back(r);
  }
  return out;
}

SensorSummary SensorStore::summarize(const std::string& sensor_id, SimTimeUs t0,
                                     SimTimeUs t1) const {
  const auto rows = query_range(sensor_id, t0, t1);
  if (rows.empty()) {
    throw Error(Errc::EmptySeries,
                "sensor " + sensor_id + " has no readings in the requested range");
  }
  SensorSummary sum;
  sum.count = rows.size();
  sum.min_temperature_c = sum.max_temperature_c = rows.front().temperature_c;
  sum.min_humidity_pct = sum.max_humidity_pct = rows.front().humidity_pct;
  double total_t = 0.0;
  double total_h = 0.0;
  for (const auto& r : rows) {
    total_t += r.temperature_c;
    total_h += r.humidity_pct;
    sum.min_temperature_c = std::min(sum.min_temperature_c, r.temperature_c);
    sum.max_temperature_c = std::max(sum.max_temperature_c, r.temperature_c);
    sum.min_humidity_pct = std::min(sum.min_humidity_pct, r.humidity_pct);
    sum.max_humidity_pct = std::max(sum.max_humidity_pct, r.humidity_pct);
  }
  sum.mean_temperature_c = total_t / static_cast<double>(rows.size());
  sum.mean_humidity_pct = total_h / static_cast<double>(rows.size());
  return sum;
}

std::string SensorStore::export_csv(const std::string& sensor_id, SimTimeUs t0,
                                    SimTimeUs t1) const {
  const auto rows = query_range(sensor_id, t0, t1);
  std::string out = "sensor_id,at_s,temperature_c,humidity_pct\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%s,%.3f,%.3f,%.3f\n", r.sensor_id.c_str(), us_to_s(r.at_us),
                  r.temperature_c, r.humidity_pct);
    out += line;
  }
  return out;
}

}  // namespace fograph::sensors
