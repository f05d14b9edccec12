#include <doctest.h>

#include <cmath>
#include <map>

#include "fuzzmon/crash.hpp"
#include "fuzzmon/error.hpp"
#include "fuzzmon/random.hpp"
#include "fuzzmon/scenario.hpp"
#include "test_util.hpp"

using namespace fuzzmon;

namespace {

SimConfig small(std::int64_t episodes, std::uint64_t seed) {
  SimConfig c = default_scenario();
  c.episodes = episodes;
  c.seed = seed;
  return c;
}

std::vector<std::size_t> brute_force_crashes(const std::vector<bool>& misses, int k_track, int k_crash) {
  const std::size_t threshold = static_cast<std::size_t>(k_track + k_crash);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < misses.size(); ++i) {
    std::size_t run = 0;
    for (std::size_t j = i + 1; j-- > 0 && misses[j];) ++run;
    if (run >= threshold && run % threshold == 0) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("default scenario is valid and round-trips through JSON") {
  const SimConfig c = default_scenario();
  CHECK_NOTHROW(validate(c));
  CHECK(c.clusters.size() == 5);
  const SimConfig back = sim_config_from_json(nlohmann::json::parse(sim_config_to_json(c).dump()));
  CHECK(sim_config_to_json(back).dump() == sim_config_to_json(c).dump());
  CHECK(back.schema == c.schema);
}

TEST_CASE("config validation rejects bad values") {
  auto expect_bad = [](auto mutate) {
    SimConfig c = default_scenario();
    mutate(c);
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
  };
  expect_bad([](SimConfig& c) { c.clusters.clear(); });
  expect_bad([](SimConfig& c) { c.roi_probability = 1.5; });
  expect_bad([](SimConfig& c) { c.episode_max = c.episode_min - 1; });
  expect_bad([](SimConfig& c) { c.clusters[0].weight = 0.0; });
  expect_bad([](SimConfig& c) { c.clusters[1].name = c.clusters[0].name; });
  expect_bad([](SimConfig& c) { c.clusters[0].center.pop_back(); });
  expect_bad([](SimConfig& c) { c.clusters[0].center[0] = 300.0; });
  expect_bad([](SimConfig& c) { c.clusters[0].fixed["weather"] = std::string("hail"); });
  expect_bad([](SimConfig& c) { c.clusters[0].fixed.erase("blurry"); });
  expect_bad([](SimConfig& c) { c.k_crash = 0; });

  auto doc = sim_config_to_json(default_scenario());
  doc["episode_length"] = {5};
  CHECK_THROWS(sim_config_from_json(doc));
  testutil::TempDir dir;
  CHECK_THROWS_AS(load_sim_config(dir.file("missing.json")), Error);
  testutil::write_file(dir.file("bad.json"), "{oops");
  CHECK_THROWS_AS(load_sim_config(dir.file("bad.json")), Error);
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = flatten(generate(small(40, 5)));
  const auto b = flatten(generate(small(40, 5)));
  const auto c = flatten(generate(small(40, 6)));
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("episodes have consistent structure") {
  const SimConfig c = small(60, 8);
  const auto episodes = generate(c);
  REQUIRE(episodes.size() == 60);
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& ep = episodes[e];
    CHECK(ep.id == static_cast<std::int64_t>(e));
    CHECK(static_cast<std::int64_t>(ep.frames.size()) >= c.episode_min);
    CHECK(static_cast<std::int64_t>(ep.frames.size()) <= c.episode_max);
    for (std::size_t i = 0; i < ep.frames.size(); ++i) {
      const auto& f = ep.frames[i];
      REQUIRE(f.record.frame == static_cast<std::int64_t>(i));
      REQUIRE(f.record.episode == ep.id);
      REQUIRE(f.record.hmp == (f.record.mp && f.in_roi));
      REQUIRE((!f.in_roi || f.record.mp));
      REQUIRE(cluster_of(f.record) == c.clusters[f.cluster].name);
      REQUIRE_NOTHROW(encode(f.record, c.schema));
      const auto& cl = c.clusters[f.cluster];
      const auto numeric = c.schema.numeric_indices();
      for (std::size_t d = 0; d < numeric.size(); ++d) {
        const double v = std::get<double>(f.record.values.at(c.schema.features()[numeric[d]].name));
        REQUIRE(std::abs(v - cl.center[d]) <= cl.spread[d] + 1e-12);
      }
    }
  }
}

TEST_CASE("mp rates track the planted probabilities") {
  SimConfig c = small(250, 9);  // about 10000 frames
  const auto episodes = generate(c);
  std::vector<std::size_t> n(c.clusters.size()), mp(c.clusters.size());
  std::size_t total = 0;
  for (const auto& ep : episodes)
    for (const auto& f : ep.frames) {
      ++n[f.cluster];
      mp[f.cluster] += f.record.mp ? 1 : 0;
      ++total;
    }
  CHECK(total >= 9000);
  for (std::size_t k = 0; k < c.clusters.size(); ++k) {
    REQUIRE(n[k] > 0);
    CHECK(std::abs(static_cast<double>(mp[k]) / n[k] - c.clusters[k].mp_probability) <= 0.03);
    CHECK(std::abs(static_cast<double>(n[k]) / total - c.clusters[k].weight) <= 0.03);
  }
}

TEST_CASE("extreme probabilities") {
  SimConfig c = small(20, 10);
  for (auto& cl : c.clusters) cl.mp_probability = 0.0;
  for (const auto& r : flatten(generate(c))) CHECK_FALSE(r.mp);
  for (auto& cl : c.clusters) cl.mp_probability = 1.0;
  c.roi_probability = 1.0;
  for (const auto& r : flatten(generate(c))) CHECK(r.hmp);
  c.roi_probability = 0.0;
  for (const auto& r : flatten(generate(c))) {
    CHECK(r.mp);
    CHECK_FALSE(r.hmp);
  }
}

TEST_CASE("planted centers and exemplar parsing") {
  const SimConfig c = default_scenario();
  const auto p = planted_center(c, 0);
  CHECK(p.size() == static_cast<Eigen::Index>(c.schema.encoded_dim()));
  CHECK(p[0] == 1.0);  // weather = clear
  CHECK(p[c.schema.offset(5)] == doctest::Approx(150.0 / 255.0));
  CHECK_THROWS_AS(planted_center(c, 99), std::out_of_range);

  RawRecord r;
  CHECK(cluster_of(r).empty());
  r.exemplar = "sim://snowy-city-day/ep3/f7";
  CHECK(cluster_of(r) == "snowy-city-day");
  r.exemplar = "file://x";
  CHECK(cluster_of(r).empty());
}

TEST_CASE("crash detector on fixed runs") {
  auto run = [](std::size_t len) { return std::vector<bool>(len, true); };
  CHECK(detect_crashes(run(13)).empty());
  CHECK(detect_crashes(run(14)) == std::vector<std::size_t>{13});
  CHECK(detect_crashes(run(28)) == std::vector<std::size_t>{13, 27});
  std::vector<bool> broken = run(20);
  broken[10] = false;
  CHECK(detect_crashes(broken).empty());
  CHECK(detect_crashes(run(3), 1, 1) == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(detect_crashes(run(3), 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(detect_crashes(run(3), 9, 0), std::invalid_argument);
}

TEST_CASE("crash detector matches a brute-force oracle") {
  Rng rng(12);
  for (int t = 0; t < 500; ++t) {
    const double p = rng.uniform(0.5, 1.0);
    const int k_track = 1 + static_cast<int>(rng.below(10));
    const int k_crash = 1 + static_cast<int>(rng.below(6));
    std::vector<bool> misses(rng.below(120));
    for (std::size_t i = 0; i < misses.size(); ++i) misses[i] = rng.bernoulli(p);
    REQUIRE(detect_crashes(misses, k_track, k_crash) == brute_force_crashes(misses, k_track, k_crash));
  }
}

TEST_CASE("episode overload uses hmp frames") {
  Episode ep;
  for (int i = 0; i < 14; ++i) {
    SimFrame f;
    f.record.mp = true;
    f.record.hmp = i != 3;
    ep.frames.push_back(f);
  }
  CHECK(detect_crashes(ep).empty());
  ep.frames[3].record.hmp = true;
  CHECK(detect_crashes(ep) == std::vector<std::size_t>{13});
}
