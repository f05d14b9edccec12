#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fuzzmon {

enum class FeatureKind { categorical, boolean, numeric };

const char* to_string(FeatureKind kind);
std::optional<FeatureKind> feature_kind_from_string(const std::string& text);

struct FeatureDef {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> values;  // categorical only
  double lo = 0.0;                  // numeric only, raw units
  double hi = 1.0;

  bool operator==(const FeatureDef&) const = default;
};

// Ordered operating-condition features. The encoded layout follows the
// declaration order: one-hot block per categorical, one slot per boolean and
// numeric feature.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureDef> features);

  const std::vector<FeatureDef>& features() const noexcept { return features_; }
  std::size_t encoded_dim() const noexcept { return encoded_dim_; }

  // Offset of the feature's first slot in the encoded vector.
  std::size_t offset(std::size_t feature_index) const { return offsets_.at(feature_index); }
  std::optional<std::size_t> index_of(const std::string& name) const;
  const FeatureDef& feature(const std::string& name) const;

  std::vector<std::size_t> categorical_indices() const;
  std::vector<std::size_t> numeric_indices() const;

  bool operator==(const FeatureSchema& other) const { return features_ == other.features_; }

 private:
  std::vector<FeatureDef> features_;
  std::vector<std::size_t> offsets_;
  std::size_t encoded_dim_ = 0;
};

// All violations, empty when the schema is usable.
std::vector<std::string> validate_schema(const FeatureSchema& schema);

// Throws SchemaError listing violations.
void require_valid(const FeatureSchema& schema);

nlohmann::json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& doc);
FeatureSchema load_schema(const std::string& path);
void save_schema(const FeatureSchema& schema, const std::string& path);

// weather/scene/timeofday, blurry/low_contrast, brightness/clearness_score/contrast_score.
FeatureSchema driving_schema();

}  // namespace fuzzmon
