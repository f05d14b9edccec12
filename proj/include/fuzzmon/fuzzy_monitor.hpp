#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fuzzmon/record.hpp"
#include "fuzzmon/schema.hpp"

namespace fuzzmon {

enum class CloudOrigin { discovered, user_seeded };

// One fuzzy rule: datacloud antecedent plus affine consequent.
struct Datacloud {
  int id = 0;
  Eigen::VectorXd prototype;        // mean of assigned members
  double mean_square = 0.0;         // mean of ||o||^2 over members
  Eigen::VectorXd dim_mean_square;  // per-dimension mean of o_i^2, for restricted variances
  std::uint64_t support = 0;
  std::uint64_t mp_count = 0;
  std::uint64_t hmp_count = 0;
  Eigen::VectorXd consequent;       // length 1 + dim, applied to [1, o]
  Eigen::MatrixXd covariance;       // RLS covariance
  std::uint64_t creation_index = 0;
  double accumulated_firing = 0.0;
  CloudOrigin origin = CloudOrigin::discovered;

  // X - ||p||^2 before clamping.
  double raw_variance() const { return mean_square - prototype.squaredNorm(); }
  // Variance over a subset of encoded dimensions, before clamping.
  double raw_variance(const std::vector<Eigen::Index>& dims) const;

  // Recursive mean / mean-square update with one more member.
  void absorb(const Eigen::VectorXd& o, bool mp, bool hmp);
};

struct GlobalStats {
  std::uint64_t n_seen = 0;
  Eigen::VectorXd mean;
  double mean_square = 0.0;

  double raw_variance() const { return mean_square - mean.squaredNorm(); }
  void update(const Eigen::VectorXd& o);
};

struct Hyperparameters {
  double omega0 = 1000.0;            // initial RLS covariance scale
  double merge_threshold = 0.8;
  double utility_threshold = 0.01;
  std::uint64_t min_support_for_prune = 20;
  std::size_t window = 500;          // prequential window W
  double acceptable_accuracy = 0.9;  // A*
  // Extra creation condition: new cloud when every prototype is farther than
  // locality_radius * sigma_g^2 (squared distance). <= 0 disables it.
  double locality_radius = 0.5;
  double variance_floor = 1e-6;
  double variance_fraction = 0.01;   // eps_var = max(floor, fraction * sigma_g^2)

  bool operator==(const Hyperparameters&) const = default;
};

// Throws std::invalid_argument for out-of-range hyperparameters.
void validate(const Hyperparameters& hyper);

struct PrequentialState {
  std::uint64_t tests = 0;
  std::uint64_t hits = 0;
  std::deque<bool> window;
};

struct AccuracySnapshot {
  std::optional<double> cumulative;  // nullopt before the first test
  std::optional<double> windowed;
  bool window_full = false;
};

enum class ActionKind { created, updated, merged, pruned };
const char* to_string(ActionKind kind);

struct CloudAction {
  ActionKind kind = ActionKind::updated;
  int cloud = 0;
  int other = -1;  // merged: the absorbed cloud

  bool operator==(const CloudAction&) const = default;
};

struct UpdateOutcome {
  std::optional<int> predicted;  // test step; empty when the model had no clouds
  std::optional<bool> correct;
  std::vector<CloudAction> actions;
  AccuracySnapshot accuracy;
  bool human_review_due = false;
};

struct Prediction {
  double score = 0.0;
  int label = 0;
  std::vector<double> firings;  // normalized, same order as clouds()
};

struct ModelState {
  FeatureSchema schema;
  Hyperparameters hyper;
  GlobalStats global;
  std::vector<Datacloud> clouds;  // ascending id
  int next_id = 0;
  std::uint64_t dropped_by_prune = 0;
  PrequentialState prequential;
  std::uint64_t seed = 0;
};

// 1 / (1 + ||o - p||^2 / variance)
double membership(const Eigen::VectorXd& prototype, double variance, const Eigen::VectorXd& o);

// The evolving fuzzy classifier. learn_one is single-writer; the const
// members may run concurrently with each other.
class FuzzyMonitor {
 public:
  explicit FuzzyMonitor(FeatureSchema schema, Hyperparameters hyper = {}, std::uint64_t seed = 0);
  // Restores a saved state; throws StateFormatError when invariants fail.
  explicit FuzzyMonitor(ModelState state);

  const ModelState& state() const noexcept { return state_; }
  const FeatureSchema& schema() const noexcept { return state_.schema; }
  const Hyperparameters& hyperparameters() const noexcept { return state_.hyper; }
  const std::vector<Datacloud>& clouds() const noexcept { return state_.clouds; }
  const Datacloud* find(int id) const;
  bool empty() const noexcept { return state_.clouds.empty(); }

  double global_variance() const;
  double epsilon_variance() const;
  double cloud_variance(const Datacloud& cloud) const;

  double membership(const Datacloud& cloud, const Eigen::VectorXd& o) const;
  // Throws std::logic_error before the first sample.
  double global_density(const Eigen::VectorXd& o) const;
  double rule_output(const Datacloud& cloud, const Eigen::VectorXd& o) const;

  // Throws UntrainedModelError when there are no clouds.
  Prediction predict(const Eigen::VectorXd& o) const;
  // Index into clouds() of the highest membership; ties go to the lowest id.
  std::size_t best_cloud(const Eigen::VectorXd& o) const;

  UpdateOutcome learn_one(const Eigen::VectorXd& o, bool phi, bool hmp = false);
  int seed_prototype(const RawRecord& record, bool phi);
  std::vector<CloudAction> refine();

  AccuracySnapshot rolling_accuracy() const;

 private:
  void check_dim(const Eigen::VectorXd& o) const;
  int create_cloud(const Eigen::VectorXd& o, bool phi, bool hmp, CloudOrigin origin);
  bool creation_test(const Eigen::VectorXd& o) const;
  std::vector<double> normalized_firings(const Eigen::VectorXd& o) const;
  std::optional<CloudAction> merge_once();
  std::optional<CloudAction> prune_once();

  ModelState state_;
};

}  // namespace fuzzmon
