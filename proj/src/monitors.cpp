#include "fuzzmon/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fuzzmon/error.hpp"

namespace fuzzmon {

namespace {

Eigen::Index check_data(const std::vector<Sample>& data) {
  if (data.empty()) throw std::invalid_argument("cannot fit a monitor on an empty training set");
  const Eigen::Index dim = data.front().x.size();
  for (const auto& s : data) {
    if (s.x.size() != dim) throw std::invalid_argument("training samples differ in dimension");
    if (s.label != 0 && s.label != 1) throw std::invalid_argument("training labels must be 0 or 1");
  }
  return dim;
}

nlohmann::ordered_json to_json(const Eigen::VectorXd& v) {
  return nlohmann::ordered_json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

RandomMonitor::RandomMonitor(std::uint64_t seed, double p) : rng_(seed), seed_(seed), p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("random monitor probability must lie in [0, 1]");
}

nlohmann::ordered_json RandomMonitor::describe() const { return {{"seed", seed_}, {"p", p_}}; }

// Sums run over sorted values so the fitted parameters do not depend on record order.
void GaussianNaiveBayes::fit(const std::vector<Sample>& data) {
  const Eigen::Index dim = check_data(data);
  std::vector<std::size_t> members[2];
  for (std::size_t i = 0; i < data.size(); ++i) members[data[i].label].push_back(i);

  std::vector<double> column;
  for (int c = 0; c < 2; ++c) {
    const auto& idx = members[c];
    prior_[c] = static_cast<double>(idx.size()) / static_cast<double>(data.size());
    mean_[c] = Eigen::VectorXd::Zero(dim);
    var_[c] = Eigen::VectorXd::Constant(dim, kVarianceFloor);
    if (idx.empty()) continue;
    const double n = static_cast<double>(idx.size());
    for (Eigen::Index d = 0; d < dim; ++d) {
      column.clear();
      for (std::size_t i : idx) column.push_back(data[i].x[d]);
      std::sort(column.begin(), column.end());
      const double mu = std::accumulate(column.begin(), column.end(), 0.0) / n;
      std::vector<double> sq;
      sq.reserve(column.size());
      for (double v : column) sq.push_back((v - mu) * (v - mu));
      std::sort(sq.begin(), sq.end());
      mean_[c][d] = mu;
      var_[c][d] = std::max(std::accumulate(sq.begin(), sq.end(), 0.0) / n, kVarianceFloor);
    }
  }
  degenerate_ = members[0].empty() || members[1].empty();
  constant_ = members[1].empty() ? 0 : 1;
  fitted_ = true;
}

int GaussianNaiveBayes::classify(const Eigen::VectorXd& x) const {
  if (!fitted_) throw std::logic_error("naive Bayes monitor used before fit");
  if (x.size() != mean_[0].size()) throw std::invalid_argument("query dimension differs from training data");
  if (degenerate_) return constant_;
  double logp[2];
  for (int c = 0; c < 2; ++c) {
    double s = std::log(prior_[c]);
    for (Eigen::Index d = 0; d < x.size(); ++d) {
      const double diff = x[d] - mean_[c][d];
      s -= 0.5 * std::log(2.0 * std::numbers::pi * var_[c][d]) + diff * diff / (2.0 * var_[c][d]);
    }
    logp[c] = s;
  }
  return logp[1] >= logp[0] ? 1 : 0;
}

nlohmann::ordered_json GaussianNaiveBayes::describe() const {
  nlohmann::ordered_json out = {{"variance_floor", kVarianceFloor}, {"degenerate_prior", degenerate_}};
  if (fitted_) {
    for (int c = 0; c < 2; ++c) {
      out["class_" + std::to_string(c)] = {{"prior", prior_[c]}, {"mean", to_json(mean_[c])}, {"variance", to_json(var_[c])}};
    }
  }
  return out;
}

DecisionTree::DecisionTree(int max_depth, std::size_t min_leaf) : max_depth_(max_depth), min_leaf_(min_leaf) {
  if (max_depth < 0) throw std::invalid_argument("tree depth must be >= 0");
  if (min_leaf < 1) throw std::invalid_argument("tree min_leaf must be >= 1");
}

void DecisionTree::fit(const std::vector<Sample>& data) {
  check_data(data);
  if (data.size() < min_leaf_) throw std::invalid_argument("decision tree needs at least min_leaf samples");
  nodes_.clear();
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  build(data, idx, 0);
}

namespace {

// Sum over children of n_child * gini_child, times n_parent; lower is better.
// Returned as a double from integer counts so equal count patterns compare equal.
double weighted_impurity(std::uint64_t l0, std::uint64_t l1, std::uint64_t r0, std::uint64_t r1) {
  auto part = [](std::uint64_t a, std::uint64_t b) {
    const double n = static_cast<double>(a + b);
    if (n == 0.0) return 0.0;
    return n - (static_cast<double>(a) * static_cast<double>(a) + static_cast<double>(b) * static_cast<double>(b)) / n;
  };
  return part(l0, l1) + part(r0, r1);
}

}  // namespace

int DecisionTree::build(const std::vector<Sample>& data, std::vector<std::size_t>& idx, int depth) {
  Node node;
  for (std::size_t i : idx) ++node.count[data[i].label];
  node.label = node.count[1] >= node.count[0] ? 1 : 0;
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  const std::uint64_t n = idx.size();
  if (depth >= max_depth_ || node.count[0] == 0 || node.count[1] == 0 || n < 2 * min_leaf_) return self;

  const double parent = weighted_impurity(node.count[0], node.count[1], 0, 0);
  double best = parent;
  int best_feature = -1;
  double best_threshold = 0.0;
  const Eigen::Index dim = data[idx.front()].x.size();
  std::vector<std::pair<double, int>> column(n);
  for (Eigen::Index f = 0; f < dim; ++f) {
    for (std::size_t k = 0; k < n; ++k) column[k] = {data[idx[k]].x[f], data[idx[k]].label};
    std::sort(column.begin(), column.end());
    std::uint64_t left[2] = {0, 0};
    for (std::size_t k = 0; k + 1 < n; ++k) {
      ++left[column[k].second];
      if (column[k].first == column[k + 1].first) continue;
      const std::uint64_t nl = k + 1;
      if (nl < min_leaf_ || n - nl < min_leaf_) continue;
      const double imp = weighted_impurity(left[0], left[1], node.count[0] - left[0], node.count[1] - left[1]);
      if (imp < best - 1e-12 * static_cast<double>(n)) {
        best = imp;
        best_feature = static_cast<int>(f);
        best_threshold = 0.5 * (column[k].first + column[k + 1].first);
      }
    }
  }
  if (best_feature < 0) return self;

  std::vector<std::size_t> lo, hi;
  for (std::size_t i : idx) (data[i].x[best_feature] <= best_threshold ? lo : hi).push_back(i);
  const int l = build(data, lo, depth + 1);
  const int r = build(data, hi, depth + 1);
  nodes_[self].feature = best_feature;
  nodes_[self].threshold = best_threshold;
  nodes_[self].left = l;
  nodes_[self].right = r;
  return self;
}

int DecisionTree::classify(const Eigen::VectorXd& x) const {
  if (nodes_.empty()) throw std::logic_error("decision tree used before fit");
  int at = 0;
  while (nodes_[at].feature >= 0) {
    if (nodes_[at].feature >= x.size()) throw std::invalid_argument("query dimension differs from training data");
    at = x[nodes_[at].feature] <= nodes_[at].threshold ? nodes_[at].left : nodes_[at].right;
  }
  return nodes_[at].label;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].feature < 0) continue;
    d[nodes_[i].left] = d[nodes_[i].right] = d[i] + 1;
    deepest = std::max(deepest, d[i] + 1);
  }
  return deepest;
}

nlohmann::ordered_json DecisionTree::describe() const {
  std::size_t leaves = 0;
  for (const auto& nd : nodes_) leaves += nd.feature < 0 ? 1 : 0;
  return {{"max_depth", max_depth_}, {"min_leaf", min_leaf_}, {"nodes", nodes_.size()}, {"leaves", leaves}, {"depth", depth()}};
}

FuzzyMonitorAdapter::FuzzyMonitorAdapter(std::shared_ptr<FuzzyMonitor> model) : model_(std::move(model)) {
  if (!model_ || model_->empty()) throw UntrainedModelError();
}

void FuzzyMonitorAdapter::fit(const std::vector<Sample>& data) {
  for (const auto& s : data) model_->learn_one(s.x, s.label == 1);
}

nlohmann::ordered_json FuzzyMonitorAdapter::describe() const {
  return {{"clouds", model_->clouds().size()}, {"samples_seen", model_->state().global.n_seen}};
}

}  // namespace fuzzmon
