#include <doctest.h>

#include <cmath>

#include "fuzzmon/error.hpp"
#include "fuzzmon/evidence.hpp"
#include "fuzzmon/normal_quantile.hpp"
#include "fuzzmon/random.hpp"
#include "test_util.hpp"

using namespace fuzzmon;
using testutil::tiny_record;
using testutil::tiny_schema;

namespace {

FuzzyMonitor two_regimes(std::uint64_t seed) {
  FuzzyMonitor m(tiny_schema(), Hyperparameters{}, seed);
  Rng rng(seed);
  for (int i = 0; i < 3000; ++i) {
    const bool bad = rng.bernoulli(0.3);
    const bool mp = rng.bernoulli(bad ? 0.9 : 0.01);
    const auto r = tiny_record(bad ? "blue" : "red", bad, bad ? rng.uniform(0.5, 1.5) : rng.uniform(7.5, 9.0), mp,
                               mp && rng.bernoulli(0.5));
    m.learn_one(encode(r, m.schema()).values, r.mp, r.hmp);
  }
  return m;
}

}  // namespace

TEST_CASE("normal quantile against table values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489).epsilon(1e-12));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404).epsilon(1e-9));
  for (double p = 0.001; p < 1.0; p += 0.01) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("sampling error values") {
  CHECK(sampling_error(0.5, 100, 99) == doctest::Approx(0.128791).epsilon(1e-6));
  CHECK(sampling_error(0.1, 1000, 95) == doctest::Approx(0.018594).epsilon(1e-5));
  CHECK(sampling_error(0.0, 50, 99) == 0.0);
  CHECK(sampling_error(1.0, 50, 99) == 0.0);
  CHECK_THROWS_AS(sampling_error(0.5, 0, 99), std::domain_error);
  CHECK_THROWS_AS(sampling_error(1.5, 10, 99), std::domain_error);
  CHECK_THROWS_AS(sampling_error(0.5, 10, 100), std::domain_error);
}

TEST_CASE("sampling error is symmetric, decreasing in n and increasing in q") {
  for (int i = 1; i < 100; ++i) {
    const double g = i / 100.0;
    CHECK(sampling_error(g, 77, 95) == doctest::Approx(sampling_error(1 - g, 77, 95)).epsilon(1e-14));
    CHECK(sampling_error(g, 78, 95) < sampling_error(g, 77, 95));
    CHECK(sampling_error(g, 77, 99) > sampling_error(g, 77, 95));
  }
}

TEST_CASE("rates and exposure from crisp counts") {
  const CloudCounts c{3, 200, 10, 4};
  CHECK(misperception_rate(c) == 0.05);
  CHECK(hmp_rate(c) == 0.02);
  CHECK(exposure(c, 1000) == 0.2);
  CHECK_THROWS_AS(misperception_rate(CloudCounts{1, 0, 0, 0}), std::domain_error);
  CHECK_THROWS_AS(exposure(c, 100), std::domain_error);
}

TEST_CASE("safety case arithmetic") {
  SafetyCaseParams p;
  CHECK(sca_rate(p) == doctest::Approx(40.0 / 3.6 / 10.0 / 500.0));
  const SafetyCase sc = safety_case_from_bound(0.23185, p);
  CHECK(sc.gamma_sca == doctest::Approx(2.2222222e-3).epsilon(1e-7));
  CHECK(sc.gamma_a == doctest::Approx(5.15222e-4).epsilon(1e-5));
  CHECK(sc.acceptable);
  CHECK(sc.gamma_res == doctest::Approx(1e-3 - sc.gamma_a));
  p.gamma_c = 1e-4;
  CHECK_FALSE(safety_case_from_bound(0.23185, p).acceptable);
  p.speed_kmh = 0;
  CHECK_THROWS_AS(safety_case_from_bound(0.1, p), std::invalid_argument);
}

TEST_CASE("gamma_B sums over reliable clouds only") {
  std::vector<CloudEvidence> ev(3);
  ev[0].id = 0;
  ev[0].reliable = true;
  ev[0].hmp_rate = 0.01;
  ev[0].exposure = 0.5;
  ev[1].id = 1;
  ev[1].reliable = false;
  ev[1].hmp_rate = 0.9;
  ev[1].exposure = 0.3;
  ev[2].id = 2;
  ev[2].reliable = true;
  ev[2].hmp_rate = 0.02;
  ev[2].exposure = 0.2;
  const SafetyCase sc = assemble_safety_case(ev, SafetyCaseParams{});
  CHECK(sc.gamma_b == doctest::Approx(0.01 * 0.5 + 0.02 * 0.2));
  CHECK(sc.included.size() == 2);
  CHECK(sc.excluded == std::vector<int>{1});
  CHECK(sc.warnings.empty());
  ev[0].reliable = ev[2].reliable = false;
  const SafetyCase none = assemble_safety_case(ev, SafetyCaseParams{});
  CHECK(none.gamma_b == 0.0);
  CHECK(none.warnings.size() == 1);
}

TEST_CASE("shortlist separates reliable and unreliable regimes") {
  const FuzzyMonitor m = two_regimes(21);
  const auto counts = training_counts(m);
  const auto evidence = collect_evidence(m, counts, m.state().global.n_seen, ShortlistCriteria{});
  double exposure_sum = 0.0;
  for (const auto& e : evidence) {
    exposure_sum += e.exposure;
    CHECK(e.reliable == (e.rule_output < 0.5 && e.mp_rate + e.mp_rate_error <= 0.1));
  }
  CHECK(exposure_sum == doctest::Approx(static_cast<double>(m.state().global.n_seen - m.state().dropped_by_prune) /
                                        static_cast<double>(m.state().global.n_seen)));
  const Shortlist s = shortlist_clouds(m, ShortlistCriteria{});
  CHECK_FALSE(s.included.empty());
  CHECK_FALSE(s.excluded.empty());
  const auto bad_o = encode(tiny_record("blue", true, 1.0), m.schema()).values;
  const int bad_id = m.clouds()[m.best_cloud(bad_o)].id;
  CHECK(std::find(s.excluded.begin(), s.excluded.end(), bad_id) != s.excluded.end());
}

TEST_CASE("tally assigns each instance to its best cloud") {
  const FuzzyMonitor m = two_regimes(22);
  std::vector<LabeledObservation> data;
  data.push_back({encode(tiny_record("red", false, 8.0), m.schema()).values, false, false});
  data.push_back({encode(tiny_record("blue", true, 1.0), m.schema()).values, true, true});
  data.push_back({encode(tiny_record("blue", true, 1.1), m.schema()).values, true, false});
  const auto counts = tally(m, data);
  std::uint64_t total = 0, mp = 0, hmp = 0;
  for (const auto& c : counts) {
    total += c.support;
    mp += c.mp;
    hmp += c.hmp;
  }
  CHECK(total == 3);
  CHECK(mp == 2);
  CHECK(hmp == 1);
  CHECK_THROWS_AS(tally(FuzzyMonitor(tiny_schema()), data), UntrainedModelError);
}

TEST_CASE("reports carry the table rows and verdict") {
  const FuzzyMonitor m = two_regimes(23);
  const auto evidence = collect_evidence(m, training_counts(m), m.state().global.n_seen, ShortlistCriteria{});
  const SafetyCase sc = assemble_safety_case(evidence, SafetyCaseParams{});
  const auto j = evidence_report_json(sc, SafetyCaseParams{}, m.schema(), m.state().global.n_seen);
  CHECK(j["table"].size() == 4);
  CHECK(j["table"][3]["value"].get<double>() == sc.gamma_a);
  CHECK(j["verdict"] == (sc.acceptable ? "acceptable" : "unacceptable"));
  const std::string text = evidence_report_text(sc, SafetyCaseParams{}, m.schema());
  CHECK(text.find("mP occurrence rate") != std::string::npos);
  CHECK(text.find("HmP_SCA rate") != std::string::npos);
}

TEST_CASE("prototype description decodes raw units") {
  const FeatureSchema s = tiny_schema();
  const auto o = encode(tiny_record("green", true, 2.5), s).values;
  CHECK(describe_prototype(s, o) == "color=green, wet=true, level=2.5");
}
