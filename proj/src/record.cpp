#include "fuzzmon/record.hpp"

#include <algorithm>
#include <cmath>

#include "fuzzmon/error.hpp"

namespace fuzzmon {

double encode_numeric(const FeatureDef& def, double raw) {
  return std::clamp((raw - def.lo) / (def.hi - def.lo), 0.0, 1.0);
}

double decode_numeric(const FeatureDef& def, double encoded) {
  return def.lo + encoded * (def.hi - def.lo);
}

const std::string& decode_category(const FeatureDef& def, const Eigen::Ref<const Eigen::VectorXd>& block) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < block.size(); ++i)
    if (block[i] > block[best]) best = i;
  return def.values.at(static_cast<std::size_t>(best));
}

ObservationVector encode(const RawRecord& record, const FeatureSchema& schema) {
  ObservationVector out;
  out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(schema.encoded_dim()));
  out.source = &record;
  const auto& defs = schema.features();
  for (std::size_t i = 0; i < defs.size(); ++i) {
    const auto& def = defs[i];
    auto it = record.values.find(def.name);
    if (it == record.values.end()) throw SchemaError("record lacks feature '" + def.name + "'");
    const auto slot = static_cast<Eigen::Index>(schema.offset(i));
    switch (def.kind) {
      case FeatureKind::categorical: {
        const auto* text = std::get_if<std::string>(&it->second);
        if (!text) throw SchemaError("feature '" + def.name + "' expects a categorical value");
        auto pos = std::find(def.values.begin(), def.values.end(), *text);
        if (pos == def.values.end()) throw UnknownCategoryError(def.name, *text);
        out.values[slot + (pos - def.values.begin())] = 1.0;
        break;
      }
      case FeatureKind::boolean: {
        const auto* flag = std::get_if<bool>(&it->second);
        if (!flag) throw SchemaError("feature '" + def.name + "' expects a boolean value");
        out.values[slot] = *flag ? 1.0 : 0.0;
        break;
      }
      case FeatureKind::numeric: {
        const auto* number = std::get_if<double>(&it->second);
        if (!number) throw SchemaError("feature '" + def.name + "' expects a numeric value");
        if (!std::isfinite(*number)) throw SchemaError("feature '" + def.name + "' is not finite");
        out.values[slot] = encode_numeric(def, *number);
        break;
      }
    }
  }
  return out;
}

}  // namespace fuzzmon
