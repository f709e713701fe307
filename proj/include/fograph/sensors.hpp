#ifndef FOGRAPH_SENSORS_HPP
#define FOGRAPH_SENSORS_HPP

#include <cstddef>
#include <map>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "fograph/rng.hpp"
#include "fograph/types.hpp"

namespace fograph::sensors {

enum class SensorKind { TemperatureHumidity };

const char* to_string(SensorKind k);
SensorKind sensor_kind_from_string(const std::string& s);

/// Synthetic signal behind a sensor. Constant repeats fixed values;
/// RandomWalk adds a gaussian step per poll (temperature drawn first, then
/// humidity) starting from the configured start values.
struct SensorModel {
  enum class Kind { Constant, RandomWalk };
  Kind kind = Kind::Constant;
  double temperature_c = 25.0;
  double humidity_pct = 40.0;
  double step_sd = 0.0;
};

struct SensorSpec {
  std::string sensor_id;
  SensorKind kind = SensorKind::TemperatureHumidity;
  std::string host_node_id;
  std::pair<double, double> temp_range_c{-40.0, 80.0};
  std::pair<double, double> humidity_range_pct{0.0, 100.0};
  SensorModel model;
};

/// Throws SchemaError for inverted ranges, humidity outside 0..100, or a
/// negative step.
void validate_spec(const SensorSpec& spec);

struct SensorReading {
  std::string sensor_id;
  SimTimeUs at_us = 0;
  double temperature_c = 0.0;
  double humidity_pct = 0.0;
};

struct SensorSummary {
  std::size_t count = 0;
  double mean_temperature_c = 0.0;
  double min_temperature_c = 0.0;
  double max_temperature_c = 0.0;
  double mean_humidity_pct = 0.0;
  double min_humidity_pct = 0.0;
  double max_humidity_pct = 0.0;
};

/// One poll. previous seeds the random walk; readings are clamped to the
/// spec's ranges.
SensorReading read_sensor(const SensorSpec& spec, SimTimeUs at_us, RngStream& rng,
                          const SensorReading* previous = nullptr);

/// Readings at k * interval for k = 1..floor(duration / interval). Throws
/// InvalidInterval when the interval is not positive.
std::vector<SensorReading> poll_series(const SensorSpec& spec, SimTimeUs interval_us,
                                       SimTimeUs duration_us, RngStream& rng);

/// Per-sensor time series with range queries and CSV export. Concurrent
/// readers are safe; timestamps must be strictly increasing per sensor.
class SensorStore {
 public:
  void add_sensor(const SensorSpec& spec);
  bool has_sensor(const std::string& sensor_id) const;
  const SensorSpec& spec(const std::string& sensor_id) const;
  std::vector<std::string> sensor_ids() const;

  void store_reading(const SensorReading& reading);
  SensorReading query_latest(const std::string& sensor_id) const;
  /// Readings with t0 <= at <= t1; t1 < t0 yields an empty result.
  std::vector<SensorReading> query_range(const std::string& sensor_id, SimTimeUs t0,
                                         SimTimeUs t1) const;
  SensorSummary summarize(const std::string& sensor_id, SimTimeUs t0, SimTimeUs t1) const;
  /// CSV with header sensor_id,at_s,temperature_c,humidity_pct, one row per
  /// reading in range, all numbers to three decimals, LF line endings.
  std::string export_csv(const std::string& sensor_id, SimTimeUs t0, SimTimeUs t1) const;

 private:
  struct Series {
    SensorSpec spec;
    std::vector<SensorReading> readings;
  };
  const Series& series(const std::string& sensor_id) const;

  mutable std::shared_mutex mutex_;
  std::map<std::string, Series> series_;
};

}  // namespace fograph::sensors

#endif
