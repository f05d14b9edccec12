#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fuzzmon/benchmark.hpp"
#include "fuzzmon/error.hpp"
#include "fuzzmon/metrics.hpp"
#include "fuzzmon/monitors.hpp"
#include "fuzzmon/random.hpp"
#include "test_util.hpp"

using namespace fuzzmon;

namespace {

Eigen::VectorXd v1(double x) {
  Eigen::VectorXd out(1);
  out[0] = x;
  return out;
}

std::vector<Sample> noisy_2d(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x(2);
    x << rng.uniform(), rng.uniform();
    const int label = (x[0] + 0.3 * x[1] > 0.6) != rng.bernoulli(0.1) ? 1 : 0;
    out.push_back({x, label});
  }
  return out;
}

}  // namespace

TEST_CASE("return functions") {
  CHECK(safety_return(1, 0) == 0);
  CHECK(safety_return(1, 1) == 1);
  CHECK(safety_return(0, 0) == 1);
  CHECK(safety_return(0, 1) == 1);
  CHECK(mission_return(0, 1) == 0);
  CHECK(mission_return(1, 1) == 1);
  CHECK(mission_return(0, 0) == 1);
  CHECK(mission_return(1, 0) == 1);
  CHECK_THROWS_AS(safety_return(2, 0), std::invalid_argument);
}

TEST_CASE("evaluate on the worked example") {
  const auto m = evaluate_predictions({1, 0, 0, 1}, {1, 1, 0, 0});
  CHECK(m.sg == 0.25);
  CHECK(m.rh == 0.25);
  CHECK(m.ac == 0.25);
  CHECK(m.base_rate == 0.5);
  CHECK(m.confusion == Confusion{1, 1, 1, 1});
  CHECK_THROWS_AS(evaluate_predictions({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_predictions({1, 0}, {1}), std::invalid_argument);
}

TEST_CASE("metric identities on random datasets") {
  Rng rng(3);
  for (int d = 0; d < 300; ++d) {
    const std::size_t n = 1 + rng.below(100);
    std::vector<int> tau(n), m(n);
    for (std::size_t i = 0; i < n; ++i) {
      tau[i] = rng.bernoulli(0.35);
      m[i] = rng.bernoulli(0.5);
    }
    const auto r = evaluate_predictions(tau, m);
    const auto pos = std::accumulate(tau.begin(), tau.end(), std::int64_t{0});
    REQUIRE(r.sg_sum + r.rh_sum == pos);
    REQUIRE(r.sg_sum == static_cast<std::int64_t>(r.confusion.tp));
    REQUIRE(r.rh_sum == static_cast<std::int64_t>(r.confusion.fn));
    REQUIRE(r.ac_sum == static_cast<std::int64_t>(r.confusion.fp));
    REQUIRE(r.ac_sum <= static_cast<std::int64_t>(n) - pos);
    REQUIRE(r.confusion.n() == n);
  }
}

TEST_CASE("random monitor") {
  RandomMonitor never(1, 0.0), always(1, 1.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(never.predict(v1(0)) == 0);
    CHECK(always.predict(v1(0)) == 1);
  }
  CHECK_THROWS_AS(RandomMonitor(1, 1.5), std::invalid_argument);

  // SG within 3 sigma of 0.5 * mean(tau) on n = 10000.
  Rng rng(11);
  std::vector<int> tau(10000), m(10000);
  RandomMonitor coin(12, 0.5);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    tau[i] = rng.bernoulli(0.2);
    m[i] = coin.predict(v1(0));
  }
  const auto r = evaluate_predictions(tau, m);
  const double expected = 0.5 * r.base_rate;
  const double sigma = std::sqrt(expected * (1 - expected) / 10000.0);
  CHECK(std::abs(r.sg - expected) <= 3 * sigma);

  RandomMonitor a(5), b(5);
  for (int i = 0; i < 50; ++i) CHECK(a.predict(v1(0)) == b.predict(v1(0)));
}

TEST_CASE("naive Bayes: likelihood dominance, tie rule, degenerate prior") {
  std::vector<Sample> data;
  for (double x : {-1.0, 0.0, 1.0}) data.push_back({v1(x), 0});
  for (double x : {9.0, 10.0, 11.0}) data.push_back({v1(x), 1});
  GaussianNaiveBayes gnb;
  gnb.fit(data);
  CHECK(gnb.mean(0)[0] == doctest::Approx(0.0));
  CHECK(gnb.variance(1)[0] == doctest::Approx(2.0 / 3.0));
  CHECK(gnb.predict(v1(9.8)) == 1);
  CHECK(gnb.predict(v1(0.3)) == 0);
  CHECK(gnb.predict(v1(5.0)) == 1);  // equal posteriors at the midpoint

  GaussianNaiveBayes single;
  single.fit({{v1(1), 0}, {v1(2), 0}});
  CHECK(single.degenerate());
  CHECK(single.predict(v1(100)) == 0);
  CHECK(single.describe()["degenerate_prior"] == true);

  GaussianNaiveBayes unfitted;
  CHECK_THROWS_AS(unfitted.predict(v1(0)), std::logic_error);
  CHECK_THROWS_AS(unfitted.fit({}), std::invalid_argument);
}

TEST_CASE("variance floor applies to constant features") {
  GaussianNaiveBayes gnb;
  gnb.fit({{v1(1), 0}, {v1(1), 0}, {v1(2), 1}, {v1(2), 1}});
  CHECK(gnb.variance(0)[0] == GaussianNaiveBayes::kVarianceFloor);
  CHECK(gnb.predict(v1(1)) == 0);
  CHECK(gnb.predict(v1(2)) == 1);
}

TEST_CASE("decision tree: separable data, constant labels, depth zero") {
  std::vector<Sample> sep;
  for (int i = 0; i < 20; ++i) sep.push_back({v1(i), i >= 12 ? 1 : 0});
  DecisionTree tree(1, 5);
  tree.fit(sep);
  CHECK(tree.depth() == 1);
  for (const auto& s : sep) CHECK(tree.predict(s.x) == s.label);
  CHECK(tree.nodes()[0].threshold == 11.5);

  std::vector<Sample> constant;
  for (int i = 0; i < 20; ++i) constant.push_back({v1(i), 1});
  DecisionTree c;
  c.fit(constant);
  CHECK(c.nodes().size() == 1);

  DecisionTree stump(0, 1);
  auto noise = noisy_2d(101, 4);
  stump.fit(noise);
  const auto ones = std::count_if(noise.begin(), noise.end(), [](const Sample& s) { return s.label == 1; });
  CHECK(stump.predict(noise[0].x) == (2 * ones >= 101 ? 1 : 0));
  CHECK_THROWS_AS(DecisionTree(5, 5).fit({{v1(0), 0}}), std::invalid_argument);
}

TEST_CASE("tree respects depth and leaf size limits") {
  DecisionTree tree(3, 7);
  const auto data = noisy_2d(500, 5);
  tree.fit(data);
  CHECK(tree.depth() <= 3);
  for (const auto& n : tree.nodes())
    if (n.feature < 0) CHECK(n.count[0] + n.count[1] >= 7);
}

TEST_CASE("tie-breaking prefers the lowest feature and threshold") {
  // Feature 0 and 1 are identical copies: the split must use feature 0.
  std::vector<Sample> data;
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x(2);
    x << i, i;
    data.push_back({x, i >= 10 ? 1 : 0});
  }
  DecisionTree tree(1, 1);
  tree.fit(data);
  CHECK(tree.nodes()[0].feature == 0);
}

TEST_CASE("GNB and tree fits are invariant to record order") {
  auto data = noisy_2d(400, 6);
  GaussianNaiveBayes g1, g2;
  DecisionTree t1, t2;
  g1.fit(data);
  t1.fit(data);
  Rng rng(7);
  rng.shuffle(data.begin(), data.end());
  g2.fit(data);
  t2.fit(data);
  for (int c = 0; c < 2; ++c) {
    CHECK(g1.prior(c) == g2.prior(c));
    CHECK(g1.mean(c) == g2.mean(c));
    CHECK(g1.variance(c) == g2.variance(c));
  }
  CHECK(t1.nodes() == t2.nodes());
}

TEST_CASE("fuzzy adapter delegates to the engine") {
  const auto schema = testutil::tiny_schema();
  auto model = std::make_shared<FuzzyMonitor>(schema);
  CHECK_THROWS_AS(FuzzyMonitorAdapter{model}, UntrainedModelError);
  const auto o = encode(testutil::tiny_record("red", false, 4), schema).values;
  model->learn_one(o, true);
  FuzzyMonitorAdapter adapter(model);
  CHECK(adapter.predict(o) == 1);

  Rng rng(8);
  std::vector<Sample> train;
  for (int i = 0; i < 300; ++i) {
    const bool bad = rng.bernoulli(0.5);
    train.push_back({encode(testutil::tiny_record(bad ? "blue" : "red", bad, rng.uniform(0, 10)), schema).values,
                     bad ? 1 : 0});
  }
  adapter.fit(train);
  const auto tests_before = model->state().prequential.tests;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(5);
    for (Eigen::Index d = 0; d < 5; ++d) x[d] = rng.uniform();
    CHECK(adapter.predict(x) == model->predict(x).label);
  }
  CHECK(model->state().prequential.tests == tests_before);
}

TEST_CASE("benchmark: rows, filter, retention, determinism") {
  const auto schema = testutil::tiny_schema();
  Rng rng(9);
  std::vector<EvalRecord> records;
  std::vector<Sample> train;
  for (int i = 0; i < 400; ++i) {
    const bool bad = rng.bernoulli(0.3);
    const bool mp = rng.bernoulli(bad ? 0.9 : 0.05);
    const auto o = encode(testutil::tiny_record(bad ? "blue" : "red", bad, rng.uniform(0, 10)), schema).values;
    train.push_back({o, mp});
    records.push_back({o, mp, mp && rng.bernoulli(0.5), !bad});
  }
  auto model = std::make_shared<FuzzyMonitor>(schema);
  for (const auto& s : train) model->learn_one(s.x, s.label == 1);

  auto run = [&](bool filter) {
    RandomMonitor random(3);
    GaussianNaiveBayes gnb;
    DecisionTree tree;
    gnb.fit(train);
    tree.fit(train);
    FuzzyMonitorAdapter fuzzy(model);
    return benchmark({&random, &gnb, &tree, &fuzzy}, records, filter, {{"seed", 3}});
  };
  const auto full = run(false);
  CHECK(full.rows.size() == 8);
  CHECK(full.evaluated == 400);
  CHECK(full.retention == 1.0);
  for (const auto& row : full.rows) {
    CHECK(row.metrics.sg_sum + row.metrics.rh_sum == static_cast<std::int64_t>(row.metrics.positives));
  }
  const auto filtered = run(true);
  const auto kept = std::count_if(records.begin(), records.end(), [](const EvalRecord& r) { return r.within_odd; });
  CHECK(filtered.evaluated == static_cast<std::size_t>(kept));
  CHECK(filtered.retention == doctest::Approx(kept / 400.0));
  CHECK(benchmark_report_json(run(true)).dump() == benchmark_report_json(filtered).dump());
  CHECK(benchmark_report_text(filtered).find("tau_HmP") != std::string::npos);

  std::vector<EvalRecord> none = records;
  for (auto& r : none) r.within_odd = false;
  RandomMonitor random(1);
  CHECK_THROWS_AS(benchmark({&random}, none, true), Error);
}
