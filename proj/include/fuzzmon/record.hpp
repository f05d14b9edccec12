#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "fuzzmon/schema.hpp"

namespace fuzzmon {

using FeatureValue = std::variant<std::string, bool, double>;

// One streamed (operating-condition, misperception) instance.
struct RawRecord {
  std::map<std::string, FeatureValue> values;
  bool mp = false;   // misperception flag (phi)
  bool hmp = false;  // hazardous misperception; implies mp
  std::int64_t episode = 0;
  std::int64_t frame = 0;
  std::optional<std::string> exemplar;

  bool operator==(const RawRecord&) const = default;
};

// Encoded operating condition; every component in [0,1].
struct ObservationVector {
  Eigen::VectorXd values;
  const RawRecord* source = nullptr;  // non-owning, may be null
};

// Throws SchemaError for a missing feature or wrong value kind and
// UnknownCategoryError for a value outside a categorical list.
ObservationVector encode(const RawRecord& record, const FeatureSchema& schema);

// Inverse mapping for a single numeric slot: lo + v * (hi - lo).
double decode_numeric(const FeatureDef& def, double encoded);
double encode_numeric(const FeatureDef& def, double raw);

// Category whose one-hot slot is largest (first wins on ties).
const std::string& decode_category(const FeatureDef& def, const Eigen::Ref<const Eigen::VectorXd>& block);

}  // namespace fuzzmon
