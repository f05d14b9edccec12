#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "fuzzmon/fuzzy_monitor.hpp"

namespace fuzzmon {

// Crisp per-cloud counts the evidence rates are computed from.
struct CloudCounts {
  int id = 0;
  std::uint64_t support = 0;
  std::uint64_t mp = 0;
  std::uint64_t hmp = 0;
};

// Counts accumulated while training (support, mp_count, hmp_count).
std::vector<CloudCounts> training_counts(const FuzzyMonitor& model);

struct LabeledObservation {
  Eigen::VectorXd o;
  bool mp = false;
  bool hmp = false;
};

// Counts over a dataset, each instance assigned to its highest-membership cloud.
std::vector<CloudCounts> tally(const FuzzyMonitor& model, const std::vector<LabeledObservation>& data);

// P(mP | D_k) = mp / support. Throws std::domain_error for support 0.
double misperception_rate(const CloudCounts& counts);
// gamma_mu = hmp / support.
double hmp_rate(const CloudCounts& counts);
// gamma_o = support / total.
double exposure(const CloudCounts& counts, std::uint64_t total);

// Delta_q = z * sqrt(rate (1 - rate) / n), z the standard normal quantile at
// (100 + q) / 200.
double sampling_error(double rate, std::uint64_t n, double q);

struct CloudEvidence {
  int id = 0;
  std::uint64_t support = 0;
  double mp_rate = 0.0;
  double mp_rate_error = 0.0;  // Delta_q of mp_rate
  double hmp_rate = 0.0;       // gamma_mu
  double hmp_rate_error = 0.0;
  double exposure = 0.0;       // gamma_o
  double rule_output = 0.0;    // consequent evaluated at the prototype
  bool reliable = false;       // passed the shortlist
  Eigen::VectorXd prototype;
};

struct ShortlistCriteria {
  double confidence = 99.0;    // q in percent
  double max_mp_rate = 0.1;
};

// Per-cloud evidence for every cloud with at least one counted instance.
// reliable = rule output at the prototype < 0.5 and mp_rate + Delta_q <= max_mp_rate.
std::vector<CloudEvidence> collect_evidence(const FuzzyMonitor& model, const std::vector<CloudCounts>& counts,
                                            std::uint64_t total_instances, const ShortlistCriteria& criteria);

struct Shortlist {
  std::vector<int> included;
  std::vector<int> excluded;
};

// Shortlist on training counts. Throws UntrainedModelError for an empty model.
Shortlist shortlist_clouds(const FuzzyMonitor& model, const ShortlistCriteria& criteria);
Shortlist shortlist_from(const std::vector<CloudEvidence>& evidence);

struct SafetyCaseParams {
  double gamma_c = 1e-3;     // acceptable top-level bound
  double gamma_cr = 1.0;     // crash given HmP
  double speed_kmh = 40.0;
  double frame_rate = 10.0;  // frames per second
  double spacing_m = 500.0;  // distance between stopped-car-ahead encounters
  double confidence = 99.0;  // q in percent

  void validate() const;
};

// (v / 3.6 / f) / d: stopped-car-ahead encounters per frame.
double sca_rate(const SafetyCaseParams& params);

struct SafetyCase {
  std::vector<CloudEvidence> included;
  std::vector<int> excluded;
  double gamma_b = 0.0;
  double gamma_sca = 0.0;
  double gamma_cr = 0.0;
  double gamma_a = 0.0;
  double gamma_c = 0.0;
  double gamma_res = 0.0;
  bool acceptable = false;
  std::vector<std::string> warnings;
};

// gamma_B = sum over reliable clouds of gamma_mu * gamma_o; gamma_A = gamma_cr * gamma_B * gamma_SCA.
SafetyCase assemble_safety_case(const std::vector<CloudEvidence>& evidence, const SafetyCaseParams& params);
// Same arithmetic from an already aggregated gamma_B.
SafetyCase safety_case_from_bound(double gamma_b, const SafetyCaseParams& params);

nlohmann::ordered_json evidence_report_json(const SafetyCase& sc, const SafetyCaseParams& params,
                                            const FeatureSchema& schema, std::uint64_t total_instances);
std::string evidence_report_text(const SafetyCase& sc, const SafetyCaseParams& params, const FeatureSchema& schema);

// "clear, city-street, night | blurry=false ... | brightness=18.167 ..."
std::string describe_prototype(const FeatureSchema& schema, const Eigen::VectorXd& prototype);

}  // namespace fuzzmon
