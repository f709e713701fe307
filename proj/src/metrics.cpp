#include "fograph/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>

#include "fograph/errors.hpp"

namespace fograph::metrics {

const char* to_string(SampleSource s) { return s == SampleSource::Probe ? "probe" : "request"; }

bool pi_less(const PiValue& a, const PiValue& b) {
  // Both sides must be measured; cross-multiplication stays within 128 bits.
  return static_cast<__int128>(a.total_us) * b.count < static_cast<__int128>(b.total_us) * a.count;
}

bool pi_equal(const PiValue& a, const PiValue& b) {
  return static_cast<__int128>(a.total_us) * b.count == static_cast<__int128>(b.total_us) * a.count;
}

bool pi_less_equal(const PiValue& a, const PiValue& b) { return !pi_less(b, a); }

const char* to_string(Band b) {
  switch (b) {
    case Band::Blue: return "blue";
    case Band::Yellow: return "yellow";
    case Band::Red: return "red";
    case Band::Unmeasured: return "unmeasured";
  }
  return "?";
}

int band_rank(Band b) { return static_cast<int>(b); }

BandPolicy BandPolicy::quantile() { return BandPolicy{}; }

BandPolicy BandPolicy::absolute(double blue_max_ms, double yellow_max_ms) {
  if (blue_max_ms > yellow_max_ms) {
    throw Error(Errc::InvalidPolicy, "blue_max_ms (" + std::to_string(blue_max_ms) +
                                         ") exceeds yellow_max_ms (" +
                                         std::to_string(yellow_max_ms) + ")");
  }
  BandPolicy policy;
  policy.kind = Kind::Absolute;
  policy.blue_max = PiValue{ms_to_us(blue_max_ms), 1};
  policy.yellow_max = PiValue{ms_to_us(yellow_max_ms), 1};
  return policy;
}

Classification classify(std::vector<PiRecord> records, const BandPolicy& policy) {
  Classification out;

  std::vector<PiValue> measured;
  for (const auto& record : records) {
    if (record.value.measured()) {
      measured.push_back(record.value);
    }
  }

  std::optional<PiValue> blue_max;
  std::optional<PiValue> yellow_max;
  if (policy.kind == BandPolicy::Kind::Absolute) {
    if (pi_less(policy.yellow_max, policy.blue_max)) {
      throw Error(Errc::InvalidPolicy, "blue_max exceeds yellow_max");
    }
    blue_max = policy.blue_max;
    yellow_max = policy.yellow_max;
  } else if (!measured.empty()) {
    std::sort(measured.begin(), measured.end(), pi_less);
    const std::size_t n = measured.size();
    const std::size_t k1 = (n + 2) / 3;      // ceil(n/3), nearest rank at 1/3
    const std::size_t k2 = (2 * n + 2) / 3;  // ceil(2n/3), nearest rank at 2/3
    blue_max = measured[k1 - 1];
    yellow_max = measured[k2 - 1];
  }

  for (auto& record : records) {
    if (!record.value.measured()) {
      record.band = Band::Unmeasured;
    } else if (blue_max && pi_less_equal(record.value, *blue_max)) {
      record.band = Band::Blue;
    } else if (yellow_max && pi_less_equal(record.value, *yellow_max)) {
      record.band = Band::Yellow;
    } else {
      record.band = Band::Red;
    }
  }

  out.records = std::move(records);
  out.blue_max = blue_max;
  out.yellow_max = yellow_max;
  return out;
}

nlohmann::ordered_json band_policy_to_json(const BandPolicy& policy) {
  nlohmann::ordered_json j;
  if (policy.kind == BandPolicy::Kind::Quantile) {
    j["kind"] = "quantile";
  } else {
    j["kind"] = "absolute";
    j["blue_max_ms"] = policy.blue_max.ms();
    j["yellow_max_ms"] = policy.yellow_max.ms();
  }
  return j;
}

nlohmann::ordered_json PriorityMap::to_json() const {
  nlohmann::ordered_json j;
  j["generated_at"] = us_to_s(generated_at_us);
  j["policy"] = band_policy_to_json(policy);
  nlohmann::ordered_json thresholds;
  thresholds["blue_max_ms"] = blue_max ? nlohmann::ordered_json(blue_max->ms())
                                       : nlohmann::ordered_json(nullptr);
  thresholds["yellow_max_ms"] = yellow_max ? nlohmann::ordered_json(yellow_max->ms())
                                           : nlohmann::ordered_json(nullptr);
  j["thresholds"] = thresholds;
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (const auto& record : records) {
    nlohmann::ordered_json r;
    r["node_id"] = record.node_id;
    r["pi_ms"] = record.value.measured() ? nlohmann::ordered_json(record.pi_ms())
                                         : nlohmann::ordered_json(nullptr);
    r["sample_count"] = record.sample_count();
    r["band"] = to_string(record.band);
    recs.push_back(std::move(r));
  }
  j["records"] = std::move(recs);
  return j;
}

std::string render_dot(const PriorityMap& map,
                       const std::vector<std::pair<std::string, std::string>>& edges) {
  const auto fill = [](Band b) {
    switch (b) {
      case Band::Blue: return "blue";
      case Band::Yellow: return "yellow";
      case Band::Red: return "red";
      case Band::Unmeasured: return "gray";
    }
    return "gray";
  };

  std::string out = "graph priority_map {\n  node [style=filled];\n";
  std::vector<PiRecord> sorted = map.records;
  std::sort(sorted.begin(), sorted.end(),
            [](const PiRecord& a, const PiRecord& b) { return a.node_id < b.node_id; });
  for (const auto& record : sorted) {
    char label[64];
    if (record.value.measured()) {
      std::snprintf(label, sizeof(label), "%.3f ms", record.pi_ms());
    } else {
      std::snprintf(label, sizeof(label), "unmeasured");
    }
    out += "  \"" + record.node_id + "\" [fillcolor=" + fill(record.band) + ", label=\"" +
           record.node_id + "\\n" + label + "\"];\n";
  }
  std::vector<std::pair<std::string, std::string>> sorted_edges;
  sorted_edges.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    sorted_edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(sorted_edges.begin(), sorted_edges.end());
  for (const auto& [a, b] : sorted_edges) {
    out += "  \"" + a + "\" -- \"" + b + "\";\n";
  }
  out += "}\n";
  return out;
}

SampleStore::SampleStore(std::size_t pi_window) : window_(pi_window) {}

void SampleStore::add_node(const std::string& node_id) {
  std::unique_lock lock(mutex_);
  samples_.try_emplace(node_id);
}

bool SampleStore::has_node(const std::string& node_id) const {
  std::shared_lock lock(mutex_);
  return samples_.count(node_id) > 0;
}

std::vector<std::string> SampleStore::node_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  ids.reserve(samples_.size());
  for (const auto& [id, _] : samples_) {
    ids.push_back(id);
  }
  return ids;
}

void SampleStore::record_sample(const RtSample& sample) {
  if (sample.rt_us < 0) {
    throw Error(Errc::NegativeRt,
                "sample for \"" + sample.node_id + "\" has negative response time");
  }
  std::unique_lock lock(mutex_);
  auto it = samples_.find(sample.node_id);
  if (it == samples_.end()) {
    throw Error(Errc::UnknownNode, "no such node: \"" + sample.node_id + "\"");
  }
  if (!it->second.empty() && sample.at_us < it->second.back().at_us) {
    throw Error(Errc::SchemaError, "out-of-order sample for node \"" + sample.node_id + "\"");
  }
  it->second.push_back(sample);
}

void SampleStore::record_sample(const std::string& node_id, double rt_ms, double at_s,
                                SampleSource source) {
  if (rt_ms < 0.0) {
    throw Error(Errc::NegativeRt, "sample for \"" + node_id + "\" has negative response time");
  }
  record_sample(RtSample{node_id, ms_to_us(rt_ms), s_to_us(at_s), source});
}

SimTimeUs SampleStore::total_rt_us(const std::set<std::string>& node_ids) const {
  std::shared_lock lock(mutex_);
  SimTimeUs total = 0;
  for (const auto& id : node_ids) {
    auto it = samples_.find(id);
    if (it == samples_.end()) {
      throw Error(Errc::UnknownNode, "no such node: \"" + id + "\"");
    }
    for (const auto& sample : it->second) {
      total += sample.rt_us;
    }
  }
  return total;
}

double SampleStore::total_response_time_ms(const std::set<std::string>& node_ids) const {
  return us_to_ms(total_rt_us(node_ids));
}

PiValue SampleStore::windowed_locked(const std::vector<RtSample>& samples) const {
  std::size_t begin = 0;
  if (window_ > 0 && samples.size() > window_) {
    begin = samples.size() - window_;
  }
  PiValue value;
  for (std::size_t i = begin; i < samples.size(); ++i) {
    value.total_us += samples[i].rt_us;
    value.count += 1;
  }
  return value;
}

PiRecord SampleStore::priority_index(const std::string& node_id) const {
  std::shared_lock lock(mutex_);
  auto it = samples_.find(node_id);
  if (it == samples_.end()) {
    throw Error(Errc::UnknownNode, "no such node: \"" + node_id + "\"");
  }
  PiRecord record;
  record.node_id = node_id;
  record.value = windowed_locked(it->second);
  record.band = Band::Unmeasured;  // classification assigns measured bands
  return record;
}

PiValue SampleStore::cluster_priority_index(const std::set<std::string>& node_ids) const {
  std::shared_lock lock(mutex_);
  PiValue value;
  for (const auto& id : node_ids) {
    auto it = samples_.find(id);
    if (it == samples_.end()) {
      throw Error(Errc::UnknownNode, "no such node: \"" + id + "\"");
    }
    const PiValue part = windowed_locked(it->second);
    value.total_us += part.total_us;
    value.count += part.count;
  }
  return value;
}

PiTable SampleStore::pi_table() const {
  std::shared_lock lock(mutex_);
  PiTable table;
  for (const auto& [id, samples] : samples_) {
    table[id] = windowed_locked(samples);
  }
  return table;
}

PriorityMap SampleStore::priority_map(const std::vector<std::string>& cluster,
                                      const BandPolicy& policy,
                                      SimTimeUs generated_at_us) const {
  std::vector<PiRecord> records;
  records.reserve(cluster.size());
  {
    std::shared_lock lock(mutex_);
    for (const auto& id : cluster) {
      PiRecord record;
      record.node_id = id;
      auto it = samples_.find(id);
      if (it != samples_.end()) {
        record.value = windowed_locked(it->second);
      }
      records.push_back(std::move(record));
    }
  }
  std::sort(records.begin(), records.end(),
            [](const PiRecord& a, const PiRecord& b) { return a.node_id < b.node_id; });

  Classification classified = classify(std::move(records), policy);
  PriorityMap map;
  map.generated_at_us = generated_at_us;
  map.policy = policy;
  map.records = std::move(classified.records);
  map.blue_max = classified.blue_max;
  map.yellow_max = classified.yellow_max;
  return map;
}

std::size_t SampleStore::store_size() const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [_, samples] : samples_) {
    n += samples.size();
  }
  return n;
}

std::size_t SampleStore::node_sample_count(const std::string& node_id) const {
  std::shared_lock lock(mutex_);
  auto it = samples_.find(node_id);
  if (it == samples_.end()) {
    throw Error(Errc::UnknownNode, "no such node: \"" + node_id + "\"");
  }
  return it->second.size();
}

std::vector<RtSample> SampleStore::samples(const std::string& node_id) const {
  std::shared_lock lock(mutex_);
  auto it = samples_.find(node_id);
  if (it == samples_.end()) {
    throw Error(Errc::UnknownNode, "no such node: \"" + node_id + "\"");
  }
  return it->second;
}

}  // namespace fograph::metrics
