#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fograph/errors.hpp"
#include "fograph/metrics.hpp"

using namespace fograph;
using namespace fograph::metrics;

namespace {

std::string node_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "n%02d", i);
  return buf;
}

}  // namespace

TEST_CASE("summed response time matches a naive re-sum") {
  std::mt19937_64 gen(1001);
  std::uniform_int_distribution<int> node_count(1, 8);
  std::uniform_int_distribution<int> sample_count(0, 40);
  std::uniform_int_distribution<SimTimeUs> rt(0, 5'000'000);

  for (int trial = 0; trial < 50; ++trial) {
    SampleStore store;
    std::set<std::string> cluster;
    long long naive = 0;
    const int nodes = node_count(gen);
    SimTimeUs at = 0;
    for (int i = 0; i < nodes; ++i) {
      const auto id = node_name(i);
      store.add_node(id);
      cluster.insert(id);
      const int k = sample_count(gen);
      for (int j = 0; j < k; ++j) {
        const SimTimeUs v = rt(gen);
        naive += v;
        store.record_sample(RtSample{id, v, at++, SampleSource::Probe});
      }
    }
    CHECK(store.total_rt_us(cluster) == naive);
    CHECK(store.total_response_time_ms(cluster) ==
          doctest::Approx(static_cast<double>(naive) / 1000.0));
  }
}

TEST_CASE("per-node priority index equals the naive mean") {
  std::mt19937_64 gen(1002);
  std::uniform_int_distribution<int> sample_count(1, 60);
  std::uniform_int_distribution<SimTimeUs> rt(1, 3'000'000);

  for (int trial = 0; trial < 50; ++trial) {
    SampleStore store;
    store.add_node("host");
    const int k = sample_count(gen);
    long long total = 0;
    for (int j = 0; j < k; ++j) {
      const SimTimeUs v = rt(gen);
      total += v;
      store.record_sample(RtSample{"host", v, j, SampleSource::Request});
    }
    const PiRecord record = store.priority_index("host");
    CHECK(record.value.total_us == total);
    CHECK(record.value.count == k);
    const double naive_mean_ms = static_cast<double>(total) / k / 1000.0;
    CHECK(record.pi_ms() == doctest::Approx(naive_mean_ms));
  }
}

TEST_CASE("cluster priority index pools every sample of the set") {
  SampleStore store;
  store.add_node("a");
  store.add_node("b");
  store.record_sample(RtSample{"a", 1000, 0, SampleSource::Probe});
  store.record_sample(RtSample{"a", 3000, 1, SampleSource::Probe});
  store.record_sample(RtSample{"b", 5000, 2, SampleSource::Probe});
  const PiValue v = store.cluster_priority_index({"a", "b"});
  CHECK(v.total_us == 9000);
  CHECK(v.count == 3);
  CHECK(v.ms() == doctest::Approx(3.0));
}

TEST_CASE("fraction comparison agrees with exact arithmetic") {
  // Magnitudes kept below 2^26 so the double products in the oracle are exact.
  std::mt19937_64 gen(1003);
  std::uniform_int_distribution<SimTimeUs> total(0, 1'000'000);
  std::uniform_int_distribution<std::int64_t> count(1, 1000);

  for (int trial = 0; trial < 2000; ++trial) {
    const PiValue a{total(gen), count(gen)};
    const PiValue b{total(gen), count(gen)};
    const double lhs = static_cast<double>(a.total_us) * static_cast<double>(b.count);
    const double rhs = static_cast<double>(b.total_us) * static_cast<double>(a.count);
    CHECK(pi_less(a, b) == (lhs < rhs));
    CHECK(pi_equal(a, b) == (lhs == rhs));
    CHECK(pi_less_equal(a, b) == (lhs <= rhs));
  }
}

TEST_CASE("equal means with different counts compare equal") {
  // 6/2 ms and 3/1 ms are the same mean; doubles would agree here, but the
  // comparison must hold exactly for fractions that do not divide evenly too.
  CHECK(pi_equal(PiValue{6000, 2}, PiValue{3000, 1}));
  CHECK(pi_equal(PiValue{1, 3}, PiValue{2, 6}));
  CHECK(pi_less(PiValue{1, 3}, PiValue{1, 2}));
  CHECK(!pi_less(PiValue{1, 2}, PiValue{1, 3}));
}

TEST_CASE("tercile classification of three distinct means") {
  std::vector<PiRecord> records;
  records.push_back(PiRecord{"a", PiValue{10000, 1}, Band::Unmeasured});
  records.push_back(PiRecord{"b", PiValue{20000, 1}, Band::Unmeasured});
  records.push_back(PiRecord{"c", PiValue{30000, 1}, Band::Unmeasured});
  const auto classified = classify(records, BandPolicy::quantile());
  REQUIRE(classified.records.size() == 3);
  CHECK(classified.records[0].band == Band::Blue);
  CHECK(classified.records[1].band == Band::Yellow);
  CHECK(classified.records[2].band == Band::Red);
  REQUIRE(classified.blue_max.has_value());
  REQUIRE(classified.yellow_max.has_value());
  CHECK(classified.blue_max->ms() == doctest::Approx(10.0));
  CHECK(classified.yellow_max->ms() == doctest::Approx(20.0));
}

TEST_CASE("threshold ties go to the better band") {
  std::vector<PiRecord> records;
  records.push_back(PiRecord{"a", PiValue{10000, 1}, Band::Unmeasured});
  records.push_back(PiRecord{"b", PiValue{10000, 1}, Band::Unmeasured});
  records.push_back(PiRecord{"c", PiValue{30000, 1}, Band::Unmeasured});
  const auto classified = classify(records, BandPolicy::quantile());
  CHECK(classified.records[0].band == Band::Blue);
  CHECK(classified.records[1].band == Band::Blue);
  CHECK(classified.records[2].band == Band::Red);
}

TEST_CASE("degenerate table sizes classify sensibly") {
  SUBCASE("single record is blue") {
    std::vector<PiRecord> one{PiRecord{"a", PiValue{5000, 1}, Band::Unmeasured}};
    CHECK(classify(one, BandPolicy::quantile()).records[0].band == Band::Blue);
  }
  SUBCASE("two records split blue / yellow") {
    std::vector<PiRecord> two{PiRecord{"a", PiValue{5000, 1}, Band::Unmeasured},
                              PiRecord{"b", PiValue{9000, 1}, Band::Unmeasured}};
    const auto classified = classify(two, BandPolicy::quantile());
    CHECK(classified.records[0].band == Band::Blue);
    CHECK(classified.records[1].band == Band::Yellow);
  }
  SUBCASE("all-equal means are all blue") {
    std::vector<PiRecord> same;
    for (int i = 0; i < 5; ++i) {
      same.push_back(PiRecord{node_name(i), PiValue{7000, 1}, Band::Unmeasured});
    }
    for (const auto& r : classify(same, BandPolicy::quantile()).records) {
      CHECK(r.band == Band::Blue);
    }
  }
  SUBCASE("empty table yields no thresholds") {
    const auto classified = classify({}, BandPolicy::quantile());
    CHECK(classified.records.empty());
    CHECK(!classified.blue_max.has_value());
    CHECK(!classified.yellow_max.has_value());
  }
}

TEST_CASE("band order follows the priority order") {
  std::mt19937_64 gen(1004);
  std::uniform_int_distribution<int> size(1, 25);
  std::uniform_int_distribution<SimTimeUs> total(1, 10'000'000);
  std::uniform_int_distribution<std::int64_t> count(1, 100);

  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PiRecord> records;
    const int n = size(gen);
    for (int i = 0; i < n; ++i) {
      records.push_back(PiRecord{node_name(i), PiValue{total(gen), count(gen)}, Band::Unmeasured});
    }
    auto classified = classify(records, BandPolicy::quantile()).records;
    std::sort(classified.begin(), classified.end(),
              [](const PiRecord& a, const PiRecord& b) { return pi_less(a.value, b.value); });
    for (std::size_t i = 1; i < classified.size(); ++i) {
      // a lower PI never sits in a worse band
      CHECK(band_rank(classified[i - 1].band) <= band_rank(classified[i].band));
      if (pi_equal(classified[i - 1].value, classified[i].value)) {
        CHECK(classified[i - 1].band == classified[i].band);
      }
    }
  }
}

TEST_CASE("quantile bands are invariant under positive scaling") {
  std::mt19937_64 gen(1005);
  std::uniform_int_distribution<int> size(1, 20);
  std::uniform_int_distribution<SimTimeUs> total(1, 1'000'000);
  std::uniform_int_distribution<std::int64_t> count(1, 50);

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PiRecord> base;
    const int n = size(gen);
    for (int i = 0; i < n; ++i) {
      base.push_back(PiRecord{node_name(i), PiValue{total(gen), count(gen)}, Band::Unmeasured});
    }
    const auto reference = classify(base, BandPolicy::quantile()).records;

    // c = 2 and c = 10 scale the numerator; c = 1/2 scales the denominator,
    // so every scaled mean stays an exact fraction.
    const auto scale = [&](auto transform) {
      std::vector<PiRecord> scaled = base;
      for (auto& r : scaled) transform(r.value);
      const auto result = classify(scaled, BandPolicy::quantile()).records;
      REQUIRE(result.size() == reference.size());
      for (std::size_t i = 0; i < result.size(); ++i) {
        CHECK(result[i].band == reference[i].band);
      }
    };
    scale([](PiValue& v) { v.total_us *= 2; });
    scale([](PiValue& v) { v.total_us *= 10; });
    scale([](PiValue& v) { v.count *= 2; });
  }
}

TEST_CASE("unmeasured records never compete") {
  std::vector<PiRecord> records;
  records.push_back(PiRecord{"a", PiValue{10000, 1}, Band::Unmeasured});
  records.push_back(PiRecord{"idle", PiValue{}, Band::Unmeasured});
  records.push_back(PiRecord{"b", PiValue{20000, 1}, Band::Unmeasured});
  records.push_back(PiRecord{"c", PiValue{30000, 1}, Band::Unmeasured});
  const auto classified = classify(records, BandPolicy::quantile());
  // thresholds computed over the three measured records only
  CHECK(classified.blue_max->ms() == doctest::Approx(10.0));
  CHECK(classified.yellow_max->ms() == doctest::Approx(20.0));
  CHECK(classified.records[0].band == Band::Blue);
  CHECK(classified.records[1].band == Band::Unmeasured);
  CHECK(classified.records[2].band == Band::Yellow);
  CHECK(classified.records[3].band == Band::Red);
  CHECK(band_rank(Band::Blue) < band_rank(Band::Yellow));
  CHECK(band_rank(Band::Yellow) < band_rank(Band::Red));
  CHECK(band_rank(Band::Red) < band_rank(Band::Unmeasured));
}

TEST_CASE("absolute thresholds classify against fixed bounds") {
  const auto policy = BandPolicy::absolute(15.0, 25.0);
  std::vector<PiRecord> records;
  records.push_back(PiRecord{"a", PiValue{10000, 1}, Band::Unmeasured});
  records.push_back(PiRecord{"b", PiValue{20000, 1}, Band::Unmeasured});
  records.push_back(PiRecord{"c", PiValue{30000, 1}, Band::Unmeasured});
  records.push_back(PiRecord{"edge", PiValue{15000, 1}, Band::Unmeasured});
  const auto classified = classify(records, policy);
  CHECK(classified.records[0].band == Band::Blue);
  CHECK(classified.records[1].band == Band::Yellow);
  CHECK(classified.records[2].band == Band::Red);
  CHECK(classified.records[3].band == Band::Blue);  // boundary value stays blue
}

TEST_CASE("inverted absolute thresholds are rejected") {
  CHECK_THROWS_AS((void)BandPolicy::absolute(25.0, 15.0), Error);
  try {
    (void)BandPolicy::absolute(25.0, 15.0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidPolicy);
  }
}

TEST_CASE("store rejects bad samples") {
  SampleStore store;
  store.add_node("a");
  CHECK_THROWS_AS(store.record_sample(RtSample{"ghost", 1000, 0, SampleSource::Probe}), Error);
  CHECK_THROWS_AS(store.record_sample(RtSample{"a", -5, 0, SampleSource::Probe}), Error);
  store.record_sample(RtSample{"a", 1000, 100, SampleSource::Probe});
  CHECK_THROWS_AS(store.record_sample(RtSample{"a", 1000, 50, SampleSource::Probe}), Error);
  try {
    store.record_sample(RtSample{"a", 1000, 50, SampleSource::Probe});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaError);
  }
  // equal timestamps are fine (several events can share a tick)
  CHECK_NOTHROW(store.record_sample(RtSample{"a", 2000, 100, SampleSource::Request}));
  CHECK(store.node_sample_count("a") == 2);
  CHECK(store.store_size() == 2);
  CHECK_THROWS_AS((void)store.node_sample_count("ghost"), Error);
  CHECK_THROWS_AS((void)store.priority_index("ghost"), Error);
  CHECK_THROWS_AS((void)store.total_rt_us({"ghost"}), Error);
}

TEST_CASE("windowed store means only the trailing samples") {
  SampleStore store(3);
  store.add_node("a");
  const SimTimeUs values[] = {1000, 2000, 3000, 4000, 5000};
  SimTimeUs at = 0;
  for (const auto v : values) {
    store.record_sample(RtSample{"a", v, at++, SampleSource::Probe});
  }
  const PiRecord record = store.priority_index("a");
  CHECK(record.value.total_us == 3000 + 4000 + 5000);
  CHECK(record.value.count == 3);
  // raw history is retained even when the PI window trims
  CHECK(store.node_sample_count("a") == 5);
  CHECK(store.total_rt_us({"a"}) == 15000);
}

TEST_CASE("priority map covers unknown hosts as unmeasured") {
  SampleStore store;
  store.add_node("b");
  store.record_sample(RtSample{"b", 4000, 0, SampleSource::Probe});
  const auto map = store.priority_map({"b", "a", "unknown"}, BandPolicy::quantile(), s_to_us(300));
  REQUIRE(map.records.size() == 3);
  CHECK(map.records[0].node_id == "a");  // sorted output
  CHECK(map.records[0].band == Band::Unmeasured);
  CHECK(map.records[1].node_id == "b");
  CHECK(map.records[1].band == Band::Blue);
  CHECK(map.records[2].node_id == "unknown");
  CHECK(map.records[2].band == Band::Unmeasured);

  const auto j = map.to_json();
  CHECK(j["generated_at"] == doctest::Approx(300.0));
  CHECK(j["policy"]["kind"] == "quantile");
  CHECK(j["thresholds"]["blue_max_ms"] == doctest::Approx(4.0));
  CHECK(j["records"].size() == 3);
  CHECK(j["records"][0]["pi_ms"].is_null());
  CHECK(j["records"][1]["pi_ms"] == doctest::Approx(4.0));
  CHECK(j["records"][1]["sample_count"] == 1);
  CHECK(j["records"][1]["band"] == "blue");
}

TEST_CASE("absolute policy serializes its thresholds") {
  const auto j = band_policy_to_json(BandPolicy::absolute(15.0, 25.0));
  CHECK(j["kind"] == "absolute");
  CHECK(j["blue_max_ms"] == doctest::Approx(15.0));
  CHECK(j["yellow_max_ms"] == doctest::Approx(25.0));
}

TEST_CASE("dot rendering is deterministic and normalized") {
  SampleStore store;
  store.add_node("beta");
  store.add_node("alpha");
  store.record_sample(RtSample{"beta", 2500, 0, SampleSource::Probe});
  const auto map = store.priority_map({"beta", "alpha"}, BandPolicy::quantile(), 0);
  const auto dot1 = render_dot(map, {{"beta", "alpha"}});
  const auto dot2 = render_dot(map, {{"alpha", "beta"}});
  CHECK(dot1 == dot2);  // edge endpoints are normalized
  CHECK(dot1.find("\"beta\" [fillcolor=blue") != std::string::npos);
  CHECK(dot1.find("\"alpha\" [fillcolor=gray") != std::string::npos);
  CHECK(dot1.find("2.500 ms") != std::string::npos);
  CHECK(dot1.find("\"alpha\" -- \"beta\";") != std::string::npos);
  CHECK(dot1.rfind("graph priority_map {", 0) == 0);
}
