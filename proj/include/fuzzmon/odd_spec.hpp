#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fuzzmon/evidence.hpp"
#include "fuzzmon/fuzzy_monitor.hpp"
#include "fuzzmon/record.hpp"
#include "fuzzmon/schema.hpp"

namespace fuzzmon {

struct IncludeClause {
  std::string feature;
  std::vector<std::string> values;  // sorted, unique
  bool operator==(const IncludeClause&) const = default;
};

// Rejects records whose categorical trigger matches and whose named numeric
// attributes have membership >= threshold to the prototype.
struct ExcludeBlock {
  std::vector<std::string> attributes;  // numeric feature names
  std::string group = "visibility";
  std::vector<std::string> trigger;     // one value per categorical feature, schema order
  std::vector<double> values;           // raw units, one per attribute
  std::optional<int> source_cloud;
  std::optional<double> variance;       // encoded space, restricted to attributes
  double threshold = 0.5;
  bool operator==(const ExcludeBlock&) const = default;
};

struct OddSpecification {
  std::vector<IncludeClause> includes;
  std::vector<ExcludeBlock> excludes;
  bool operator==(const OddSpecification&) const = default;
};

struct DeriveOptions {
  std::string group = "visibility";
  std::vector<std::string> attributes;  // empty: every numeric feature in schema order
  double threshold = 0.5;
};

struct OddDerivation {
  OddSpecification spec;
  std::vector<std::string> warnings;
};

OddDerivation derive_odd(const FuzzyMonitor& model, const Shortlist& shortlist, const DeriveOptions& options = {});

std::string emit(const OddSpecification& spec);
// Throws ParseError pointing at the first offending token.
OddSpecification parse_odd(const std::string& text);
OddSpecification load_odd(const std::string& path);
void save_odd(const OddSpecification& spec, const std::string& path);

// Violations of the spec against a schema; empty when usable.
std::vector<std::string> validate_odd(const OddSpecification& spec, const FeatureSchema& schema);

struct OddVerdict {
  bool within = true;
  std::string reason;                 // empty when within
  std::optional<std::size_t> block;   // exclude block index that fired
};

// Spec bound to a schema. Construction throws SchemaError when the spec names
// unknown features or values.
class OddFilter {
 public:
  OddFilter(OddSpecification spec, FeatureSchema schema);
  OddVerdict check(const RawRecord& record) const;
  const OddSpecification& spec() const noexcept { return spec_; }

 private:
  struct BoundBlock {
    std::vector<std::size_t> features;  // schema indices of attributes
    Eigen::VectorXd prototype;          // encoded
    double variance = 0.0;
  };
  OddSpecification spec_;
  FeatureSchema schema_;
  std::vector<std::size_t> categorical_;
  std::vector<BoundBlock> blocks_;
};

OddVerdict within_odd(const OddSpecification& spec, const RawRecord& record, const FeatureSchema& schema);

}  // namespace fuzzmon
