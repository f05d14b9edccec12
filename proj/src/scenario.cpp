#include "fuzzmon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "fuzzmon/error.hpp"
#include "fuzzmon/random.hpp"

namespace fuzzmon {

void validate(const SimConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("simulation config: " + what); };
  if (!validate_schema(c.schema).empty()) fail("invalid schema");
  if (c.clusters.empty()) fail("no clusters");
  if (!(c.roi_probability >= 0.0 && c.roi_probability <= 1.0)) fail("roi_probability must lie in [0, 1]");
  if (c.episode_min < 1 || c.episode_max < c.episode_min) fail("episode length range must satisfy 1 <= min <= max");
  if (c.episodes < 1) fail("episodes must be >= 1");
  if (c.k_track < 1 || c.k_crash < 1) fail("k_track and k_crash must be >= 1");
  const auto numeric = c.schema.numeric_indices();
  std::set<std::string> names;
  for (const auto& cl : c.clusters) {
    const std::string where = "cluster '" + cl.name + "': ";
    if (cl.name.empty() || cl.name.find('/') != std::string::npos) fail(where + "name must be non-empty and contain no '/'");
    if (!names.insert(cl.name).second) fail(where + "duplicate name");
    if (!(cl.weight > 0.0 && std::isfinite(cl.weight))) fail(where + "weight must be positive");
    if (!(cl.mp_probability >= 0.0 && cl.mp_probability <= 1.0)) fail(where + "mp_probability must lie in [0, 1]");
    if (cl.center.size() != numeric.size() || cl.spread.size() != numeric.size())
      fail(where + "center and spread need one value per numeric feature");
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      const auto& def = c.schema.features()[numeric[k]];
      if (!(cl.center[k] >= def.lo && cl.center[k] <= def.hi)) fail(where + "center outside range of " + def.name);
      if (!(cl.spread[k] >= 0.0 && std::isfinite(cl.spread[k]))) fail(where + "spread must be >= 0");
    }
    for (const auto& def : c.schema.features()) {
      if (def.kind == FeatureKind::numeric) continue;
      auto it = cl.fixed.find(def.name);
      if (it == cl.fixed.end()) fail(where + "missing value for " + def.name);
      if (def.kind == FeatureKind::boolean && !std::holds_alternative<bool>(it->second))
        fail(where + def.name + " must be a boolean");
      if (def.kind == FeatureKind::categorical) {
        if (!std::holds_alternative<std::string>(it->second)) fail(where + def.name + " must be a category");
        const auto& v = std::get<std::string>(it->second);
        if (std::find(def.values.begin(), def.values.end(), v) == def.values.end())
          fail(where + "unknown " + def.name + " value '" + v + "'");
      }
    }
    if (cl.fixed.size() != c.schema.features().size() - numeric.size()) fail(where + "fixed values name unknown features");
  }
}

nlohmann::ordered_json sim_config_to_json(const SimConfig& c) {
  using nlohmann::ordered_json;
  ordered_json clusters = ordered_json::array();
  for (const auto& cl : c.clusters) {
    ordered_json fixed = ordered_json::object();
    for (const auto& def : c.schema.features()) {
      auto it = cl.fixed.find(def.name);
      if (it == cl.fixed.end()) continue;
      if (std::holds_alternative<bool>(it->second)) fixed[def.name] = std::get<bool>(it->second);
      else if (std::holds_alternative<std::string>(it->second)) fixed[def.name] = std::get<std::string>(it->second);
    }
    clusters.push_back({{"name", cl.name},
                        {"fixed", std::move(fixed)},
                        {"center", cl.center},
                        {"spread", cl.spread},
                        {"mp_probability", cl.mp_probability},
                        {"weight", cl.weight}});
  }
  return {{"schema", schema_to_json(c.schema)},
          {"clusters", std::move(clusters)},
          {"roi_probability", c.roi_probability},
          {"episode_length", {c.episode_min, c.episode_max}},
          {"episodes", c.episodes},
          {"seed", c.seed},
          {"k_track", c.k_track},
          {"k_crash", c.k_crash}};
}

SimConfig sim_config_from_json(const nlohmann::json& doc) {
  SimConfig c;
  try {
    c.schema = doc.contains("schema") ? schema_from_json(doc.at("schema")) : driving_schema();
    for (const auto& j : doc.at("clusters")) {
      PlantedCluster cl;
      cl.name = j.at("name").get<std::string>();
      for (const auto& [key, value] : j.at("fixed").items()) {
        if (value.is_boolean()) cl.fixed[key] = value.get<bool>();
        else cl.fixed[key] = value.get<std::string>();
      }
      cl.center = j.at("center").get<std::vector<double>>();
      cl.spread = j.at("spread").get<std::vector<double>>();
      cl.mp_probability = j.at("mp_probability").get<double>();
      cl.weight = j.value("weight", 1.0);
      c.clusters.push_back(std::move(cl));
    }
    c.roi_probability = doc.value("roi_probability", c.roi_probability);
    if (doc.contains("episode_length")) {
      const auto range = doc.at("episode_length").get<std::vector<std::int64_t>>();
      if (range.size() != 2) throw std::invalid_argument("episode_length must be [min, max]");
      c.episode_min = range[0];
      c.episode_max = range[1];
    }
    c.episodes = doc.value("episodes", c.episodes);
    c.seed = doc.value("seed", c.seed);
    c.k_track = doc.value("k_track", c.k_track);
    c.k_crash = doc.value("k_crash", c.k_crash);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("simulation config: ") + e.what());
  }
  validate(c);
  return c;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open simulation config '" + path + "'");
  try {
    return sim_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("simulation config '" + path + "': " + e.what());
  }
}

SimConfig default_scenario() {
  SimConfig c;
  c.schema = driving_schema();
  auto cluster = [](std::string name, std::string weather, std::string scene, std::string tod, bool blurry, bool low_contrast,
                    std::vector<double> center, std::vector<double> spread, double mp, double weight) {
    PlantedCluster cl;
    cl.name = std::move(name);
    cl.fixed = {{"weather", std::move(weather)}, {"scene", std::move(scene)}, {"timeofday", std::move(tod)},
                {"blurry", blurry}, {"low_contrast", low_contrast}};
    cl.center = std::move(center);
    cl.spread = std::move(spread);
    cl.mp_probability = mp;
    cl.weight = weight;
    return cl;
  };
  // numeric order: brightness, clearness_score, contrast_score
  c.clusters = {
      cluster("clear-city-day", "clear", "city-street", "daytime", false, false, {150, 0.7, 5.0}, {15, 0.05, 0.5}, 0.01, 0.25),
      cluster("snowy-city-day", "snowy", "city-street", "daytime", false, false, {190, 0.55, 3.8}, {15, 0.05, 0.5}, 0.02, 0.2),
      cluster("overcast-highway-dusk", "overcast", "highway", "dawn/dusk", false, false, {95, 0.6, 4.4}, {12, 0.05, 0.5}, 0.01, 0.2),
      cluster("clear-city-night", "clear", "city-street", "night", true, true, {18.167, 0.12, 2.18}, {8, 0.04, 0.4}, 0.85, 0.2),
      cluster("rainy-highway-night", "rainy", "highway", "night", true, false, {40, 0.3, 1.4}, {8, 0.04, 0.4}, 0.9, 0.15),
  };
  return c;
}

std::vector<Episode> generate(const SimConfig& config) {
  validate(config);
  Rng rng(config.seed);
  const auto numeric = config.schema.numeric_indices();
  double total_weight = 0.0;
  for (const auto& cl : config.clusters) total_weight += cl.weight;

  std::vector<Episode> out;
  out.reserve(static_cast<std::size_t>(config.episodes));
  for (std::int64_t e = 0; e < config.episodes; ++e) {
    Episode ep;
    ep.id = e;
    const auto span = static_cast<std::uint64_t>(config.episode_max - config.episode_min + 1);
    const auto length = config.episode_min + static_cast<std::int64_t>(rng.below(span));
    for (std::int64_t i = 0; i < length; ++i) {
      double pick = rng.uniform() * total_weight;
      std::size_t k = 0;
      while (k + 1 < config.clusters.size() && pick >= config.clusters[k].weight) {
        pick -= config.clusters[k].weight;
        ++k;
      }
      const auto& cl = config.clusters[k];
      SimFrame frame;
      frame.cluster = k;
      RawRecord& r = frame.record;
      r.values = cl.fixed;
      for (std::size_t d = 0; d < numeric.size(); ++d) {
        const auto& def = config.schema.features()[numeric[d]];
        const double v = cl.center[d] + rng.uniform(-cl.spread[d], cl.spread[d]);
        r.values[def.name] = std::clamp(v, def.lo, def.hi);
      }
      r.mp = rng.bernoulli(cl.mp_probability);
      frame.in_roi = r.mp && rng.bernoulli(config.roi_probability);
      r.hmp = r.mp && frame.in_roi;
      r.episode = e;
      r.frame = i;
      r.exemplar = "sim://" + cl.name + "/ep" + std::to_string(e) + "/f" + std::to_string(i);
      ep.frames.push_back(std::move(frame));
    }
    out.push_back(std::move(ep));
  }
  return out;
}

std::vector<RawRecord> flatten(const std::vector<Episode>& episodes) {
  std::vector<RawRecord> out;
  for (const auto& ep : episodes)
    for (const auto& f : ep.frames) out.push_back(f.record);
  return out;
}

Eigen::VectorXd planted_center(const SimConfig& config, std::size_t cluster) {
  const auto& cl = config.clusters.at(cluster);
  RawRecord r;
  r.values = cl.fixed;
  const auto numeric = config.schema.numeric_indices();
  for (std::size_t d = 0; d < numeric.size(); ++d) r.values[config.schema.features()[numeric[d]].name] = cl.center[d];
  return encode(r, config.schema).values;
}

std::string cluster_of(const RawRecord& record) {
  if (!record.exemplar) return {};
  const std::string& ex = *record.exemplar;
  const std::string prefix = "sim://";
  if (ex.rfind(prefix, 0) != 0) return {};
  const auto slash = ex.find('/', prefix.size());
  return ex.substr(prefix.size(), slash == std::string::npos ? std::string::npos : slash - prefix.size());
}

}  // namespace fuzzmon
