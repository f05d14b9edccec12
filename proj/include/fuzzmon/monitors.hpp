#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "fuzzmon/fuzzy_monitor.hpp"
#include "fuzzmon/random.hpp"

namespace fuzzmon {

struct Sample {
  Eigen::VectorXd x;
  int label = 0;  // phi
};

// Runtime monitor m_C: 1 means "do not trust the perception output".
class Monitor {
 public:
  virtual ~Monitor() = default;
  virtual std::string name() const = 0;
  virtual bool trainable() const = 0;
  virtual void fit(const std::vector<Sample>& data) = 0;
  // Non-const: the random baseline advances its generator.
  virtual int predict(const Eigen::VectorXd& x) = 0;
  // Fitted parameters and flags for the report.
  virtual nlohmann::ordered_json describe() const { return nlohmann::ordered_json::object(); }
};

class RandomMonitor final : public Monitor {
 public:
  explicit RandomMonitor(std::uint64_t seed, double p = 0.5);
  std::string name() const override { return "random"; }
  bool trainable() const override { return false; }
  void fit(const std::vector<Sample>&) override {}
  int predict(const Eigen::VectorXd&) override { return rng_.bernoulli(p_) ? 1 : 0; }
  nlohmann::ordered_json describe() const override;

 private:
  Rng rng_;
  std::uint64_t seed_;
  double p_;
};

class GaussianNaiveBayes final : public Monitor {
 public:
  static constexpr double kVarianceFloor = 1e-9;

  std::string name() const override { return "gnb"; }
  bool trainable() const override { return true; }
  // Throws std::invalid_argument on empty data or mixed dimensions.
  void fit(const std::vector<Sample>& data) override;
  int predict(const Eigen::VectorXd& x) override { return classify(x); }
  int classify(const Eigen::VectorXd& x) const;
  nlohmann::ordered_json describe() const override;

  bool degenerate() const noexcept { return degenerate_; }
  double prior(int label) const { return prior_[label]; }
  const Eigen::VectorXd& mean(int label) const { return mean_[label]; }
  const Eigen::VectorXd& variance(int label) const { return var_[label]; }

 private:
  bool fitted_ = false;
  bool degenerate_ = false;
  int constant_ = 0;
  double prior_[2] = {0.0, 0.0};
  Eigen::VectorXd mean_[2];
  Eigen::VectorXd var_[2];
};

class DecisionTree final : public Monitor {
 public:
  struct Node {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;  // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    int label = 0;
    std::uint64_t count[2] = {0, 0};
    bool operator==(const Node& o) const {
      return feature == o.feature && threshold == o.threshold && left == o.left && right == o.right &&
             label == o.label && count[0] == o.count[0] && count[1] == o.count[1];
    }
  };

  explicit DecisionTree(int max_depth = 5, std::size_t min_leaf = 5);
  std::string name() const override { return "tree"; }
  bool trainable() const override { return true; }
  // Throws std::invalid_argument with fewer than min_leaf samples.
  void fit(const std::vector<Sample>& data) override;
  int predict(const Eigen::VectorXd& x) override { return classify(x); }
  int classify(const Eigen::VectorXd& x) const;
  nlohmann::ordered_json describe() const override;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  int depth() const;

 private:
  int build(const std::vector<Sample>& data, std::vector<std::size_t>& idx, int depth);

  int max_depth_;
  std::size_t min_leaf_;
  std::vector<Node> nodes_;
};

// Uses the fuzzy engine's phi-hat. fit continues online learning.
class FuzzyMonitorAdapter final : public Monitor {
 public:
  // Throws UntrainedModelError for a model without clouds.
  explicit FuzzyMonitorAdapter(std::shared_ptr<FuzzyMonitor> model);
  std::string name() const override { return "fuzzy"; }
  bool trainable() const override { return true; }
  void fit(const std::vector<Sample>& data) override;
  int predict(const Eigen::VectorXd& x) override { return model_->predict(x).label; }
  nlohmann::ordered_json describe() const override;

 private:
  std::shared_ptr<FuzzyMonitor> model_;
};

}  // namespace fuzzmon
