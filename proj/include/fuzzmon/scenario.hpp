#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzmon/record.hpp"
#include "fuzzmon/schema.hpp"

namespace fuzzmon {

struct PlantedCluster {
  std::string name;
  std::map<std::string, FeatureValue> fixed;  // every categorical and boolean feature
  std::vector<double> center;                 // raw units, numeric features in schema order
  std::vector<double> spread;                 // half-width of the uniform noise
  double mp_probability = 0.0;
  double weight = 1.0;
};

struct SimConfig {
  FeatureSchema schema;
  std::vector<PlantedCluster> clusters;
  double roi_probability = 0.5;  // chance that a misperception lies in the region of interest
  std::int64_t episode_min = 20;
  std::int64_t episode_max = 60;
  std::int64_t episodes = 715;
  std::uint64_t seed = 7;
  int k_track = 9;
  int k_crash = 5;
};

// Throws std::invalid_argument naming the first violation.
void validate(const SimConfig& config);

nlohmann::ordered_json sim_config_to_json(const SimConfig& config);
SimConfig sim_config_from_json(const nlohmann::json& doc);
SimConfig load_sim_config(const std::string& path);

// Three reliable and two unreliable clusters over driving_schema().
SimConfig default_scenario();

struct SimFrame {
  RawRecord record;
  bool in_roi = false;
  std::size_t cluster = 0;
};

struct Episode {
  std::int64_t id = 0;
  std::vector<SimFrame> frames;
};

std::vector<Episode> generate(const SimConfig& config);
std::vector<RawRecord> flatten(const std::vector<Episode>& episodes);

// Encoded planted center (one-hot/boolean slots plus scaled numerics).
Eigen::VectorXd planted_center(const SimConfig& config, std::size_t cluster);

// Cluster name from a simulated exemplar "sim://<name>/ep<e>/f<i>"; empty if absent.
std::string cluster_of(const RawRecord& record);

}  // namespace fuzzmon
