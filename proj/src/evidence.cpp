#include "fuzzmon/evidence.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fuzzmon/error.hpp"
#include "fuzzmon/normal_quantile.hpp"
#include "fuzzmon/record.hpp"
#include "fuzzmon/record_io.hpp"

namespace fuzzmon {

std::vector<CloudCounts> training_counts(const FuzzyMonitor& model) {
  std::vector<CloudCounts> out;
  for (const auto& c : model.clouds()) out.push_back({c.id, c.support, c.mp_count, c.hmp_count});
  return out;
}

std::vector<CloudCounts> tally(const FuzzyMonitor& model, const std::vector<LabeledObservation>& data) {
  if (model.empty()) throw UntrainedModelError();
  std::vector<CloudCounts> out;
  for (const auto& c : model.clouds()) out.push_back({c.id, 0, 0, 0});
  for (const auto& item : data) {
    auto& slot = out[model.best_cloud(item.o)];
    ++slot.support;
    slot.mp += item.mp ? 1 : 0;
    slot.hmp += item.hmp ? 1 : 0;
  }
  return out;
}

double misperception_rate(const CloudCounts& counts) {
  if (counts.support == 0) throw std::domain_error("misperception rate of an empty cloud");
  return static_cast<double>(counts.mp) / static_cast<double>(counts.support);
}

double hmp_rate(const CloudCounts& counts) {
  if (counts.support == 0) throw std::domain_error("hmp rate of an empty cloud");
  return static_cast<double>(counts.hmp) / static_cast<double>(counts.support);
}

double exposure(const CloudCounts& counts, std::uint64_t total) {
  if (total == 0) throw std::domain_error("exposure needs a non-empty instance set");
  if (counts.support > total) throw std::domain_error("cloud support exceeds instance count");
  return static_cast<double>(counts.support) / static_cast<double>(total);
}

double sampling_error(double rate, std::uint64_t n, double q) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::domain_error("rate must lie in [0, 1]");
  if (n == 0) throw std::domain_error("sampling error needs n >= 1");
  if (!(q > 0.0 && q < 100.0)) throw std::domain_error("confidence q must lie in (0, 100)");
  const double z = normal_quantile((100.0 + q) / 200.0);
  return z * std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

std::vector<CloudEvidence> collect_evidence(const FuzzyMonitor& model, const std::vector<CloudCounts>& counts,
                                            std::uint64_t total_instances, const ShortlistCriteria& criteria) {
  std::vector<CloudEvidence> out;
  for (const auto& cc : counts) {
    if (cc.support == 0) continue;
    const Datacloud* cloud = model.find(cc.id);
    if (!cloud) throw std::invalid_argument("counts refer to unknown cloud " + std::to_string(cc.id));
    CloudEvidence ev;
    ev.id = cc.id;
    ev.support = cc.support;
    ev.mp_rate = misperception_rate(cc);
    ev.mp_rate_error = sampling_error(ev.mp_rate, cc.support, criteria.confidence);
    ev.hmp_rate = hmp_rate(cc);
    ev.hmp_rate_error = sampling_error(ev.hmp_rate, cc.support, criteria.confidence);
    ev.exposure = exposure(cc, total_instances);
    ev.rule_output = model.rule_output(*cloud, cloud->prototype);
    ev.reliable = ev.rule_output < 0.5 && ev.mp_rate + ev.mp_rate_error <= criteria.max_mp_rate;
    ev.prototype = cloud->prototype;
    out.push_back(std::move(ev));
  }
  return out;
}

Shortlist shortlist_from(const std::vector<CloudEvidence>& evidence) {
  Shortlist out;
  for (const auto& ev : evidence) (ev.reliable ? out.included : out.excluded).push_back(ev.id);
  return out;
}

Shortlist shortlist_clouds(const FuzzyMonitor& model, const ShortlistCriteria& criteria) {
  if (model.empty()) throw UntrainedModelError();
  return shortlist_from(collect_evidence(model, training_counts(model), model.state().global.n_seen, criteria));
}

void SafetyCaseParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(gamma_c >= 0.0 && gamma_c <= 1.0, "gamma_C must lie in [0, 1]");
  require(gamma_cr >= 0.0 && gamma_cr <= 1.0, "gamma_cr must lie in [0, 1]");
  require(speed_kmh > 0.0, "speed must be positive");
  require(frame_rate > 0.0, "frame rate must be positive");
  require(spacing_m > 0.0, "encounter spacing must be positive");
  require(confidence > 0.0 && confidence < 100.0, "confidence must lie in (0, 100)");
}

double sca_rate(const SafetyCaseParams& p) { return (p.speed_kmh / 3.6 / p.frame_rate) / p.spacing_m; }

SafetyCase safety_case_from_bound(double gamma_b, const SafetyCaseParams& params) {
  params.validate();
  SafetyCase sc;
  sc.gamma_b = gamma_b;
  sc.gamma_sca = sca_rate(params);
  sc.gamma_cr = params.gamma_cr;
  sc.gamma_a = sc.gamma_cr * sc.gamma_b * sc.gamma_sca;
  sc.gamma_c = params.gamma_c;
  sc.gamma_res = sc.gamma_c - sc.gamma_a;
  sc.acceptable = sc.gamma_res >= 0.0;
  return sc;
}

SafetyCase assemble_safety_case(const std::vector<CloudEvidence>& evidence, const SafetyCaseParams& params) {
  double gamma_b = 0.0;
  std::vector<CloudEvidence> included;
  std::vector<int> excluded;
  for (const auto& ev : evidence) {
    if (ev.reliable) {
      gamma_b += ev.hmp_rate * ev.exposure;
      included.push_back(ev);
    } else {
      excluded.push_back(ev.id);
    }
  }
  SafetyCase sc = safety_case_from_bound(gamma_b, params);
  sc.included = std::move(included);
  sc.excluded = std::move(excluded);
  if (sc.included.empty()) sc.warnings.push_back("no reliable dataclouds: gamma_B is vacuously 0");
  return sc;
}

std::string describe_prototype(const FeatureSchema& schema, const Eigen::VectorXd& prototype) {
  std::ostringstream out;
  const auto& defs = schema.features();
  bool first = true;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    const auto& def = defs[i];
    const auto off = static_cast<Eigen::Index>(schema.offset(i));
    if (!first) out << ", ";
    first = false;
    switch (def.kind) {
      case FeatureKind::categorical:
        out << def.name << '=' << decode_category(def, prototype.segment(off, static_cast<Eigen::Index>(def.values.size())));
        break;
      case FeatureKind::boolean:
        out << def.name << '=' << (prototype[off] >= 0.5 ? "true" : "false");
        break;
      case FeatureKind::numeric:
        out << def.name << '=' << format_double(std::round(decode_numeric(def, prototype[off]) * 1000.0) / 1000.0);
        break;
    }
  }
  return out.str();
}

namespace {

const char* kRowNames[] = {"mP occurrence rate", "SCA occurrence rate", "crash rate", "HmP_SCA rate"};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

}  // namespace

nlohmann::ordered_json evidence_report_json(const SafetyCase& sc, const SafetyCaseParams& params,
                                            const FeatureSchema& schema, std::uint64_t total_instances) {
  using nlohmann::ordered_json;
  ordered_json table = ordered_json::array();
  table.push_back({{"bound", kRowNames[0]}, {"description", "gamma_B = sum_k(gamma_mu * gamma_o) over included clouds"}, {"value", sc.gamma_b}});
  table.push_back({{"bound", kRowNames[1]},
                   {"description", "gamma_SCA = (" + format_double(params.speed_kmh) + " km/h / 3.6 / " +
                                       format_double(params.frame_rate) + " fps) / " + format_double(params.spacing_m) + " m"},
                   {"value", sc.gamma_sca}});
  table.push_back({{"bound", kRowNames[2]}, {"description", "gamma_cr (conservative: HmP always leads to crash when 1)"}, {"value", sc.gamma_cr}});
  table.push_back({{"bound", kRowNames[3]}, {"description", "gamma_A = gamma_cr * gamma_B * gamma_SCA"}, {"value", sc.gamma_a}});

  ordered_json clouds = ordered_json::array();
  for (const auto& ev : sc.included) {
    clouds.push_back({{"id", ev.id},
                      {"support", ev.support},
                      {"mp_rate", ev.mp_rate},
                      {"mp_rate_error", ev.mp_rate_error},
                      {"gamma_mu", ev.hmp_rate},
                      {"gamma_mu_error", ev.hmp_rate_error},
                      {"gamma_o", ev.exposure},
                      {"rule_output", ev.rule_output},
                      {"prototype", describe_prototype(schema, ev.prototype)}});
  }
  return {{"confidence_q", params.confidence},
          {"total_instances", total_instances},
          {"table", std::move(table)},
          {"included_clouds", std::move(clouds)},
          {"excluded_clouds", sc.excluded},
          {"gamma_c", sc.gamma_c},
          {"gamma_res", sc.gamma_res},
          {"verdict", sc.acceptable ? "acceptable" : "unacceptable"},
          {"warnings", sc.warnings}};
}

std::string evidence_report_text(const SafetyCase& sc, const SafetyCaseParams& params, const FeatureSchema& schema) {
  std::ostringstream out;
  std::string ids;
  for (const auto& ev : sc.included) ids += (ids.empty() ? "" : ",") + std::to_string(ev.id);
  char line[256];
  std::snprintf(line, sizeof line, "%-22s | %-44s | %s\n", "Safety Bound", "Description",
                ("Value for D_{" + ids + "}").c_str());
  out << line << std::string(90, '-') << '\n';
  const std::string sca_desc = "gamma_SCA = (" + format_double(params.speed_kmh) + "[km/h]/3.6/" +
                               format_double(params.frame_rate) + "[fps])/" + format_double(params.spacing_m) + "[m]";
  const std::pair<std::string, double> rows[] = {{"gamma_B = sum_k(gamma_mu * gamma_o)", sc.gamma_b},
                                                 {sca_desc, sc.gamma_sca},
                                                 {"gamma_cr", sc.gamma_cr},
                                                 {"gamma_A = gamma_cr * gamma_B * gamma_SCA", sc.gamma_a}};
  for (int i = 0; i < 4; ++i) {
    std::snprintf(line, sizeof line, "%-22s | %-44s | %s\n", kRowNames[i], rows[i].first.c_str(), sci(rows[i].second).c_str());
    out << line;
  }
  out << '\n'
      << "gamma_C   = " << sci(sc.gamma_c) << '\n'
      << "gamma_res = " << sci(sc.gamma_res) << "  (" << (sc.acceptable ? "acceptable" : "unacceptable") << ")\n";
  if (!sc.excluded.empty()) {
    out << "excluded dataclouds:";
    for (int id : sc.excluded) out << ' ' << id;
    out << '\n';
  }
  for (const auto& w : sc.warnings) out << "warning: " << w << '\n';
  out << "\nPer-cloud evidence (q = " << format_double(params.confidence) << "%)\n";
  for (const auto& ev : sc.included) {
    std::snprintf(line, sizeof line, "D_%-3d S=%-7llu mP=%.5f (+%.5f)  gamma_mu=%.5f  gamma_o=%.5f  ", ev.id,
                  static_cast<unsigned long long>(ev.support), ev.mp_rate, ev.mp_rate_error, ev.hmp_rate, ev.exposure);
    out << line << describe_prototype(schema, ev.prototype) << '\n';
  }
  return out.str();
}

}  // namespace fuzzmon
