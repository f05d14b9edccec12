#include "fuzzmon/schema.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fuzzmon/error.hpp"

namespace fuzzmon {

const char* to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::categorical:
      return "categorical";
    case FeatureKind::boolean:
      return "boolean";
    case FeatureKind::numeric:
      return "numeric";
  }
  return "?";
}

std::optional<FeatureKind> feature_kind_from_string(const std::string& text) {
  if (text == "categorical") return FeatureKind::categorical;
  if (text == "boolean") return FeatureKind::boolean;
  if (text == "numeric") return FeatureKind::numeric;
  return std::nullopt;
}

FeatureSchema::FeatureSchema(std::vector<FeatureDef> features) : features_(std::move(features)) {
  offsets_.reserve(features_.size());
  for (const auto& f : features_) {
    offsets_.push_back(encoded_dim_);
    encoded_dim_ += f.kind == FeatureKind::categorical ? f.values.size() : 1;
  }
}

std::optional<std::size_t> FeatureSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return i;
  return std::nullopt;
}

const FeatureDef& FeatureSchema::feature(const std::string& name) const {
  auto idx = index_of(name);
  if (!idx) throw SchemaError("unknown feature '" + name + "'");
  return features_[*idx];
}

std::vector<std::size_t> FeatureSchema::categorical_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].kind == FeatureKind::categorical) out.push_back(i);
  return out;
}

std::vector<std::size_t> FeatureSchema::numeric_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].kind == FeatureKind::numeric) out.push_back(i);
  return out;
}

std::vector<std::string> validate_schema(const FeatureSchema& schema) {
  std::vector<std::string> violations;
  std::set<std::string> names;
  static const std::set<std::string> reserved = {"mp", "hmp", "episode", "frame", "exemplar"};
  if (schema.features().empty()) violations.push_back("schema has no features");
  for (const auto& f : schema.features()) {
    if (f.name.empty()) violations.push_back("feature with empty name");
    if (!names.insert(f.name).second) violations.push_back("duplicate name '" + f.name + "'");
    if (reserved.count(f.name)) violations.push_back("reserved name '" + f.name + "'");
    switch (f.kind) {
      case FeatureKind::categorical: {
        if (f.values.empty()) violations.push_back("'" + f.name + "': categorical value list is empty");
        std::set<std::string> seen;
        for (const auto& v : f.values)
          if (!seen.insert(v).second)
            violations.push_back("'" + f.name + "': duplicate value '" + v + "'");
        break;
      }
      case FeatureKind::numeric:
        if (!std::isfinite(f.lo) || !std::isfinite(f.hi) || !(f.lo < f.hi))
          violations.push_back("'" + f.name + "': lo < hi required");
        break;
      case FeatureKind::boolean:
        break;
    }
  }
  return violations;
}

void require_valid(const FeatureSchema& schema) {
  auto violations = validate_schema(schema);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid schema:";
  for (const auto& v : violations) msg << "\n  " << v;
  throw SchemaError(msg.str());
}

nlohmann::json schema_to_json(const FeatureSchema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : schema.features()) {
    nlohmann::json item = {{"name", f.name}, {"kind", to_string(f.kind)}};
    if (f.kind == FeatureKind::categorical) item["values"] = f.values;
    if (f.kind == FeatureKind::numeric) item["range"] = {f.lo, f.hi};
    features.push_back(std::move(item));
  }
  return {{"features", std::move(features)}};
}

FeatureSchema schema_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array())
    throw SchemaError("schema document needs a \"features\" array");
  std::vector<FeatureDef> defs;
  for (const auto& item : doc["features"]) {
    if (!item.is_object() || !item.contains("name") || !item.contains("kind"))
      throw SchemaError("feature entries need \"name\" and \"kind\"");
    FeatureDef def;
    def.name = item["name"].get<std::string>();
    auto kind = feature_kind_from_string(item["kind"].get<std::string>());
    if (!kind) throw SchemaError("'" + def.name + "': unknown kind " + item["kind"].dump());
    def.kind = *kind;
    if (def.kind == FeatureKind::categorical) {
      if (!item.contains("values") || !item["values"].is_array())
        throw SchemaError("'" + def.name + "': categorical feature needs \"values\"");
      def.values = item["values"].get<std::vector<std::string>>();
    }
    if (def.kind == FeatureKind::numeric) {
      if (!item.contains("range") || !item["range"].is_array() || item["range"].size() != 2)
        throw SchemaError("'" + def.name + "': numeric feature needs \"range\": [lo, hi]");
      def.lo = item["range"][0].get<double>();
      def.hi = item["range"][1].get<double>();
    }
    defs.push_back(std::move(def));
  }
  return FeatureSchema(std::move(defs));
}

FeatureSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schema file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("schema '" + path + "': " + e.what());
  } catch (const nlohmann::json::type_error& e) {
    throw SchemaError("schema '" + path + "': " + e.what());
  }
  try {
    auto schema = schema_from_json(doc);
    require_valid(schema);
    return schema;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("schema '" + path + "': " + e.what());
  }
}

void save_schema(const FeatureSchema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write schema file '" + path + "'");
  out << schema_to_json(schema).dump(2) << '\n';
}

FeatureSchema driving_schema() {
  return FeatureSchema({
      {"weather", FeatureKind::categorical,
       {"clear", "overcast", "partly cloudy", "rainy", "snowy", "foggy"}, 0, 1},
      {"scene", FeatureKind::categorical, {"city-street", "highway", "residential", "parking lot", "tunnel"}, 0, 1},
      {"timeofday", FeatureKind::categorical, {"daytime", "dawn/dusk", "night"}, 0, 1},
      {"blurry", FeatureKind::boolean, {}, 0, 1},
      {"low_contrast", FeatureKind::boolean, {}, 0, 1},
      {"brightness", FeatureKind::numeric, {}, 0.0, 255.0},
      {"clearness_score", FeatureKind::numeric, {}, 0.0, 1.0},
      {"contrast_score", FeatureKind::numeric, {}, 0.0, 10.0},
  });
}

}  // namespace fuzzmon
