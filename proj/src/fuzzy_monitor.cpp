#include "fuzzmon/fuzzy_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "fuzzmon/error.hpp"
#include "fuzzmon/rls.hpp"

namespace fuzzmon {

double Datacloud::raw_variance(const std::vector<Eigen::Index>& dims) const {
  double v = 0.0;
  for (auto d : dims) v += dim_mean_square[d] - prototype[d] * prototype[d];
  return v;
}

void Datacloud::absorb(const Eigen::VectorXd& o, bool mp, bool hmp) {
  ++support;
  const double inv = 1.0 / static_cast<double>(support);
  prototype += (o - prototype) * inv;
  mean_square += (o.squaredNorm() - mean_square) * inv;
  dim_mean_square += (o.cwiseProduct(o) - dim_mean_square) * inv;
  mp_count += mp ? 1 : 0;
  hmp_count += hmp ? 1 : 0;
}

void GlobalStats::update(const Eigen::VectorXd& o) {
  ++n_seen;
  const double inv = 1.0 / static_cast<double>(n_seen);
  mean += (o - mean) * inv;
  mean_square += (o.squaredNorm() - mean_square) * inv;
}

void validate(const Hyperparameters& h) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(h.omega0 > 0.0 && std::isfinite(h.omega0), "omega0 must be positive");
  require(h.merge_threshold > 0.0 && h.merge_threshold <= 1.0, "merge threshold must lie in (0, 1]");
  require(h.utility_threshold >= 0.0 && h.utility_threshold <= 1.0, "utility threshold must lie in [0, 1]");
  require(h.min_support_for_prune >= 1, "prune support guard must be >= 1");
  require(h.window >= 1, "window must be >= 1");
  require(h.acceptable_accuracy >= 0.0 && h.acceptable_accuracy <= 1.0, "acceptable accuracy must lie in [0, 1]");
  require(std::isfinite(h.locality_radius), "locality radius must be finite");
  require(h.variance_floor > 0.0, "variance floor must be positive");
  require(h.variance_fraction >= 0.0, "variance fraction must be >= 0");
}

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::created:
      return "created";
    case ActionKind::updated:
      return "updated";
    case ActionKind::merged:
      return "merged";
    case ActionKind::pruned:
      return "pruned";
  }
  return "?";
}

double membership(const Eigen::VectorXd& prototype, double variance, const Eigen::VectorXd& o) {
  return 1.0 / (1.0 + (o - prototype).squaredNorm() / variance);
}

FuzzyMonitor::FuzzyMonitor(FeatureSchema schema, Hyperparameters hyper, std::uint64_t seed) {
  require_valid(schema);
  validate(hyper);
  state_.schema = std::move(schema);
  state_.hyper = hyper;
  state_.seed = seed;
  state_.global.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state_.schema.encoded_dim()));
}

FuzzyMonitor::FuzzyMonitor(ModelState state) : state_(std::move(state)) {
  auto fail = [](const std::string& what) { throw StateFormatError("inconsistent model state: " + what); };
  if (!validate_schema(state_.schema).empty()) fail("invalid schema");
  try {
    validate(state_.hyper);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  const auto dim = static_cast<Eigen::Index>(state_.schema.encoded_dim());
  if (state_.global.mean.size() != dim) fail("global mean dimension");
  std::uint64_t support_sum = 0;
  int last_id = -1;
  for (const auto& c : state_.clouds) {
    if (c.id <= last_id) fail("cloud ids must be unique and ascending");
    last_id = c.id;
    if (c.id >= state_.next_id) fail("cloud id >= next_id");
    if (c.prototype.size() != dim || c.dim_mean_square.size() != dim) fail("prototype dimension");
    if (c.consequent.size() != dim + 1 || c.covariance.rows() != dim + 1 || c.covariance.cols() != dim + 1)
      fail("consequent dimension");
    if (c.support < 1 || c.mp_count > c.support || c.hmp_count > c.mp_count) fail("cloud counts");
    if (c.creation_index >= std::max<std::uint64_t>(state_.global.n_seen, 1)) fail("creation index");
    support_sum += c.support;
  }
  if (support_sum + state_.dropped_by_prune != state_.global.n_seen) fail("support accounting");
  const auto& pq = state_.prequential;
  if (pq.hits > pq.tests || pq.window.size() > state_.hyper.window || pq.window.size() > pq.tests)
    fail("prequential counters");
}

const Datacloud* FuzzyMonitor::find(int id) const {
  for (const auto& c : state_.clouds)
    if (c.id == id) return &c;
  return nullptr;
}

double FuzzyMonitor::global_variance() const {
  return std::max(state_.global.raw_variance(), state_.hyper.variance_floor);
}

double FuzzyMonitor::epsilon_variance() const {
  const double scaled = state_.global.n_seen > 0 ? global_variance() * state_.hyper.variance_fraction : 0.0;
  return std::max(state_.hyper.variance_floor, scaled);
}

double FuzzyMonitor::cloud_variance(const Datacloud& cloud) const {
  return std::max(cloud.raw_variance(), epsilon_variance());
}

double FuzzyMonitor::membership(const Datacloud& cloud, const Eigen::VectorXd& o) const {
  return fuzzmon::membership(cloud.prototype, cloud_variance(cloud), o);
}

double FuzzyMonitor::global_density(const Eigen::VectorXd& o) const {
  if (state_.global.n_seen == 0) throw std::logic_error("global density needs at least one sample");
  return fuzzmon::membership(state_.global.mean, global_variance(), o);
}

double FuzzyMonitor::rule_output(const Datacloud& cloud, const Eigen::VectorXd& o) const {
  return cloud.consequent[0] + cloud.consequent.tail(o.size()).dot(o);
}

void FuzzyMonitor::check_dim(const Eigen::VectorXd& o) const {
  if (o.size() != static_cast<Eigen::Index>(state_.schema.encoded_dim()))
    throw SchemaError("observation has dimension " + std::to_string(o.size()) + ", model expects " +
                      std::to_string(state_.schema.encoded_dim()));
}

std::vector<double> FuzzyMonitor::normalized_firings(const Eigen::VectorXd& o) const {
  std::vector<double> firing;
  firing.reserve(state_.clouds.size());
  double total = 0.0;
  for (const auto& c : state_.clouds) {
    firing.push_back(membership(c, o));
    total += firing.back();
  }
  for (auto& f : firing) f /= total;
  return firing;
}

Prediction FuzzyMonitor::predict(const Eigen::VectorXd& o) const {
  check_dim(o);
  if (empty()) throw UntrainedModelError();
  Prediction out;
  out.firings = normalized_firings(o);
  double score = 0.0;
  for (std::size_t k = 0; k < state_.clouds.size(); ++k) score += out.firings[k] * rule_output(state_.clouds[k], o);
  out.score = std::clamp(score, 0.0, 1.0);
  out.label = out.score >= 0.5 ? 1 : 0;
  return out;
}

std::size_t FuzzyMonitor::best_cloud(const Eigen::VectorXd& o) const {
  check_dim(o);
  if (empty()) throw UntrainedModelError();
  std::size_t best = 0;
  double best_mu = -1.0;
  for (std::size_t k = 0; k < state_.clouds.size(); ++k) {
    const double mu = membership(state_.clouds[k], o);
    if (mu > best_mu) {
      best_mu = mu;
      best = k;
    }
  }
  return best;
}

int FuzzyMonitor::create_cloud(const Eigen::VectorXd& o, bool phi, bool hmp, CloudOrigin origin) {
  const auto dim = o.size();
  Datacloud c;
  c.id = state_.next_id++;
  c.prototype = o;
  c.mean_square = o.squaredNorm();
  c.dim_mean_square = o.cwiseProduct(o);
  c.support = 1;
  c.mp_count = phi ? 1 : 0;
  c.hmp_count = hmp ? 1 : 0;
  c.consequent = Eigen::VectorXd::Zero(dim + 1);
  c.consequent[0] = phi ? 1.0 : 0.0;
  c.covariance = state_.hyper.omega0 * Eigen::MatrixXd::Identity(dim + 1, dim + 1);
  c.creation_index = state_.global.n_seen - 1;
  c.origin = origin;
  state_.clouds.push_back(std::move(c));
  return state_.clouds.back().id;
}

bool FuzzyMonitor::creation_test(const Eigen::VectorXd& o) const {
  if (empty()) return true;
  double lowest = std::numeric_limits<double>::infinity();
  double highest = -lowest;
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& c : state_.clouds) {
    const double d = global_density(c.prototype);
    lowest = std::min(lowest, d);
    highest = std::max(highest, d);
    nearest = std::min(nearest, (o - c.prototype).squaredNorm());
  }
  const double density = global_density(o);
  if (density > highest || density < lowest) return true;
  const double radius = state_.hyper.locality_radius;
  return radius > 0.0 && nearest > radius * global_variance();
}

UpdateOutcome FuzzyMonitor::learn_one(const Eigen::VectorXd& o, bool phi, bool hmp) {
  check_dim(o);
  if (hmp && !phi) throw std::invalid_argument("hmp requires phi = 1");
  UpdateOutcome out;

  // Test before train: the prediction only sees the state prior to this label.
  if (!empty()) {
    const int label = predict(o).label;
    out.predicted = label;
    out.correct = label == (phi ? 1 : 0);
    auto& pq = state_.prequential;
    ++pq.tests;
    pq.hits += *out.correct ? 1 : 0;
    pq.window.push_back(*out.correct);
    while (pq.window.size() > state_.hyper.window) pq.window.pop_front();
  }

  if (state_.global.mean.size() == 0) state_.global.mean = Eigen::VectorXd::Zero(o.size());
  state_.global.update(o);

  if (creation_test(o)) {
    out.actions.push_back({ActionKind::created, create_cloud(o, phi, hmp, CloudOrigin::discovered)});
  } else {
    auto& winner = state_.clouds[best_cloud(o)];
    winner.absorb(o, phi, hmp);
    out.actions.push_back({ActionKind::updated, winner.id});
  }

  const auto firings = normalized_firings(o);
  const Eigen::VectorXd x = extend_input(o);
  const double target = phi ? 1.0 : 0.0;
  for (std::size_t k = 0; k < state_.clouds.size(); ++k) {
    auto& c = state_.clouds[k];
    update_consequent(c.consequent, c.covariance, x, std::clamp(firings[k], 0.0, 1.0), target);
    c.accumulated_firing += firings[k];
  }

  for (auto& action : refine()) out.actions.push_back(action);

  out.accuracy = rolling_accuracy();
  out.human_review_due = out.accuracy.window_full && out.accuracy.windowed &&
                         *out.accuracy.windowed >= state_.hyper.acceptable_accuracy;
  return out;
}

int FuzzyMonitor::seed_prototype(const RawRecord& record, bool phi) {
  const auto o = encode(record, state_.schema).values;
  const bool hmp = phi && record.hmp;
  state_.global.update(o);
  return create_cloud(o, phi, hmp, CloudOrigin::user_seeded);
}

std::optional<CloudAction> FuzzyMonitor::merge_once() {
  auto& clouds = state_.clouds;
  const double theta = state_.hyper.merge_threshold;
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    for (std::size_t j = i + 1; j < clouds.size(); ++j) {
      if (!(membership(clouds[i], clouds[j].prototype) > theta && membership(clouds[j], clouds[i].prototype) > theta))
        continue;
      // The higher-support cloud keeps its id and consequent; ties keep the lower id.
      const std::size_t keep = clouds[j].support > clouds[i].support ? j : i;
      const std::size_t drop = keep == i ? j : i;
      auto& k = clouds[keep];
      const auto& d = clouds[drop];
      const double total = static_cast<double>(k.support + d.support);
      const double wk = static_cast<double>(k.support) / total;
      const double wd = static_cast<double>(d.support) / total;
      k.prototype = wk * k.prototype + wd * d.prototype;
      k.mean_square = wk * k.mean_square + wd * d.mean_square;
      k.dim_mean_square = wk * k.dim_mean_square + wd * d.dim_mean_square;
      k.support += d.support;
      k.mp_count += d.mp_count;
      k.hmp_count += d.hmp_count;
      k.accumulated_firing += d.accumulated_firing;
      k.creation_index = std::min(k.creation_index, d.creation_index);
      CloudAction action{ActionKind::merged, k.id, d.id};
      clouds.erase(clouds.begin() + static_cast<std::ptrdiff_t>(drop));
      return action;
    }
  }
  return std::nullopt;
}

std::optional<CloudAction> FuzzyMonitor::prune_once() {
  auto& clouds = state_.clouds;
  if (clouds.size() < 2) return std::nullopt;
  std::optional<std::size_t> victim;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < clouds.size(); ++k) {
    const auto& c = clouds[k];
    if (c.support < state_.hyper.min_support_for_prune) continue;
    const auto age = state_.global.n_seen - c.creation_index;
    const double utility = c.accumulated_firing / static_cast<double>(std::max<std::uint64_t>(age, 1));
    if (utility < state_.hyper.utility_threshold && utility < lowest) {
      lowest = utility;
      victim = k;
    }
  }
  if (!victim) return std::nullopt;
  CloudAction action{ActionKind::pruned, clouds[*victim].id};
  state_.dropped_by_prune += clouds[*victim].support;
  clouds.erase(clouds.begin() + static_cast<std::ptrdiff_t>(*victim));
  return action;
}

std::vector<CloudAction> FuzzyMonitor::refine() {
  std::vector<CloudAction> report;
  if (auto merged = merge_once()) report.push_back(*merged);
  if (auto pruned = prune_once()) report.push_back(*pruned);
  return report;
}

AccuracySnapshot FuzzyMonitor::rolling_accuracy() const {
  const auto& pq = state_.prequential;
  AccuracySnapshot snap;
  if (pq.tests > 0) snap.cumulative = static_cast<double>(pq.hits) / static_cast<double>(pq.tests);
  if (!pq.window.empty()) {
    const auto hits = std::count(pq.window.begin(), pq.window.end(), true);
    snap.windowed = static_cast<double>(hits) / static_cast<double>(pq.window.size());
  }
  snap.window_full = pq.window.size() == state_.hyper.window;
  return snap;
}

}  // namespace fuzzmon
