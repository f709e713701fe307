#ifndef FOGRAPH_METRICS_HPP
#define FOGRAPH_METRICS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fograph/types.hpp"

namespace fograph::metrics {

enum class SampleSource { Probe, Request };

const char* to_string(SampleSource s);

/// One response-time measurement for a node.
struct RtSample {
  std::string node_id;
  SimTimeUs rt_us = 0;
  SimTimeUs at_us = 0;
  SampleSource source = SampleSource::Probe;

  double rt_ms() const { return us_to_ms(rt_us); }
};

/// Priority Index as an exact fraction: summed response time over sample
/// count. Comparisons cross-multiply in 128 bits, so ordering never suffers
/// float drift.
struct PiValue {
  SimTimeUs total_us = 0;
  std::int64_t count = 0;

  bool measured() const { return count > 0; }
  double ms() const { return measured() ? static_cast<double>(total_us) / (1000.0 * count) : 0.0; }
};

bool pi_less(const PiValue& a, const PiValue& b);
bool pi_less_equal(const PiValue& a, const PiValue& b);
bool pi_equal(const PiValue& a, const PiValue& b);

/// Recommendation bands of the priority visualization map. Unmeasured is the
/// explicit fourth state for hosts with no samples; it never competes in
/// argmin selection.
enum class Band { Blue, Yellow, Red, Unmeasured };

const char* to_string(Band b);
int band_rank(Band b);  // Blue < Yellow < Red < Unmeasured

/// Aggregated per-node record: mean response time plus assigned band.
struct PiRecord {
  std::string node_id;
  PiValue value;
  Band band = Band::Unmeasured;

  std::int64_t sample_count() const { return value.count; }
  double total_rt_ms() const { return us_to_ms(value.total_us); }
  double pi_ms() const { return value.ms(); }
};

struct BandPolicy {
  enum class Kind { Quantile, Absolute };

  Kind kind = Kind::Quantile;
  // Absolute thresholds; unused under Quantile.
  PiValue blue_max{};
  PiValue yellow_max{};

  static BandPolicy quantile();
  /// Throws Errc::InvalidPolicy when blue_max_ms > yellow_max_ms.
  static BandPolicy absolute(double blue_max_ms, double yellow_max_ms);
};

struct Classification {
  std::vector<PiRecord> records;
  std::optional<PiValue> blue_max;
  std::optional<PiValue> yellow_max;
};

/// Assigns bands. Quantile policy: nearest-rank terciles over the measured
/// records (thresholds at ranks ceil(n/3) and ceil(2n/3)); ties at a
/// threshold go to the better band. Absolute policy compares against fixed
/// thresholds. Unmeasured records stay Unmeasured.
Classification classify(std::vector<PiRecord> records, const BandPolicy& policy);

using PiTable = std::map<std::string, PiValue>;

/// Snapshot of the banded cluster state, serializable to JSON and DOT.
struct PriorityMap {
  SimTimeUs generated_at_us = 0;
  BandPolicy policy;
  std::vector<PiRecord> records;  // sorted by node_id
  std::optional<PiValue> blue_max;
  std::optional<PiValue> yellow_max;

  nlohmann::ordered_json to_json() const;
};

nlohmann::ordered_json band_policy_to_json(const BandPolicy& policy);

/// DOT rendering: one filled node per record (blue/yellow/red/gray), edges
/// copied from the caller's topology. Output is byte-deterministic: nodes and
/// edges are emitted in sorted order with fixed 3-decimal labels.
std::string render_dot(const PriorityMap& map,
                       const std::vector<std::pair<std::string, std::string>>& edges = {});

/// Append-only store of response-time samples, keyed by node. Safe for
/// concurrent appends and snapshot reads.
class SampleStore {
public:
  /// pi_window == 0 means all samples count toward the PI; otherwise the PI
  /// is the mean of the last pi_window samples per node.
  explicit SampleStore(std::size_t pi_window = 0);

  void add_node(const std::string& node_id);
  bool has_node(const std::string& node_id) const;
  std::vector<std::string> node_ids() const;

  /// Appends a sample. Throws UnknownNode / NegativeRt; timestamps must be
  /// non-decreasing per node.
  void record_sample(const RtSample& sample);
  void record_sample(const std::string& node_id, double rt_ms, double at_s,
                     SampleSource source);

  /// Eq. 1: summed response time over the given hosts, exact.
  SimTimeUs total_rt_us(const std::set<std::string>& node_ids) const;
  double total_response_time_ms(const std::set<std::string>& node_ids) const;

  /// Per-node Priority Index over the configured window.
  PiRecord priority_index(const std::string& node_id) const;

  /// Cluster-wide variant: one mean over every (windowed) sample of the set.
  PiValue cluster_priority_index(const std::set<std::string>& node_ids) const;

  PiTable pi_table() const;

  /// One banded record per requested node; unknown ids yield Unmeasured
  /// records. Never throws.
  PriorityMap priority_map(const std::vector<std::string>& cluster, const BandPolicy& policy,
                           SimTimeUs generated_at_us) const;

  std::size_t store_size() const;
  std::size_t node_sample_count(const std::string& node_id) const;
  std::vector<RtSample> samples(const std::string& node_id) const;

private:
  PiValue windowed_locked(const std::vector<RtSample>& samples) const;

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::vector<RtSample>> samples_;
  std::size_t window_;
};

}  // namespace fograph::metrics

#endif
