#include "fuzzmon/benchmark.hpp"

#include <cstdio>
#include <sstream>

#include "fuzzmon/error.hpp"

namespace fuzzmon {

std::vector<EvalRecord> to_eval_records(const std::vector<RawRecord>& records, const FeatureSchema& schema,
                                        const OddFilter* filter) {
  std::vector<EvalRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    EvalRecord e;
    e.o = encode(r, schema).values;
    e.tau_mp = r.mp ? 1 : 0;
    e.tau_hmp = r.hmp ? 1 : 0;
    e.within_odd = filter ? filter->check(r).within : true;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Sample> to_samples(const std::vector<RawRecord>& records, const FeatureSchema& schema) {
  std::vector<Sample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({encode(r, schema).values, r.mp ? 1 : 0});
  return out;
}

const char* to_string(Status status) { return status == Status::mp ? "tau_mP" : "tau_HmP"; }

BenchmarkReport benchmark(const std::vector<Monitor*>& monitors, const std::vector<EvalRecord>& records,
                          bool apply_odd_filter, nlohmann::ordered_json config) {
  BenchmarkReport report;
  report.total = records.size();
  report.odd_filtered = apply_odd_filter;
  report.config = std::move(config);

  std::vector<const EvalRecord*> kept;
  for (const auto& r : records)
    if (!apply_odd_filter || r.within_odd) kept.push_back(&r);
  if (kept.empty()) throw Error("benchmark has no records left to evaluate");
  report.evaluated = kept.size();
  report.retention = static_cast<double>(kept.size()) / static_cast<double>(records.size());

  std::vector<int> tau_mp, tau_hmp;
  for (const auto* r : kept) {
    tau_mp.push_back(r->tau_mp);
    tau_hmp.push_back(r->tau_hmp);
  }
  for (Monitor* m : monitors) {
    std::vector<int> pred;
    pred.reserve(kept.size());
    for (const auto* r : kept) pred.push_back(m->predict(r->o));
    report.rows.push_back({m->name(), Status::mp, evaluate_predictions(tau_mp, pred)});
    report.rows.push_back({m->name(), Status::hmp, evaluate_predictions(tau_hmp, pred)});
    report.monitors[m->name()] = m->describe();
  }
  return report;
}

nlohmann::ordered_json benchmark_report_json(const BenchmarkReport& report) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    const auto& m = row.metrics;
    const double n = static_cast<double>(m.n);
    rows.push_back({{"monitor", row.monitor},
                    {"status", to_string(row.status)},
                    {"n", m.n},
                    {"base_rate", m.base_rate},
                    {"SG", m.sg},
                    {"RH", m.rh},
                    {"AC", m.ac},
                    {"counts", {{"tp", m.confusion.tp}, {"fn", m.confusion.fn}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn}}},
                    {"fractions",
                     {{"tp", static_cast<double>(m.confusion.tp) / n},
                      {"fn", static_cast<double>(m.confusion.fn) / n},
                      {"fp", static_cast<double>(m.confusion.fp) / n},
                      {"tn", static_cast<double>(m.confusion.tn) / n}}}});
  }
  return {{"total_records", report.total},
          {"evaluated_records", report.evaluated},
          {"odd_filtered", report.odd_filtered},
          {"retention", report.retention},
          {"rows", std::move(rows)},
          {"monitors", report.monitors},
          {"config", report.config}};
}

std::string benchmark_report_text(const BenchmarkReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "records: %zu evaluated of %zu (retention %.4f%s)\n", report.evaluated, report.total,
                report.retention, report.odd_filtered ? ", ODD filter applied" : "");
  out << line;
  for (Status status : {Status::mp, Status::hmp}) {
    bool header = false;
    for (const auto& row : report.rows) {
      if (row.status != status) continue;
      if (!header) {
        std::snprintf(line, sizeof line, "\n%s (base rate %.4f)\n%-10s | %8s | %8s | %8s\n", to_string(status),
                      row.metrics.base_rate, "monitor", "SG", "RH", "AC");
        out << line << std::string(45, '-') << '\n';
        header = true;
      }
      std::snprintf(line, sizeof line, "%-10s | %8.4f | %8.4f | %8.4f\n", row.monitor.c_str(), row.metrics.sg,
                    row.metrics.rh, row.metrics.ac);
      out << line;
    }
  }
  return out.str();
}

}  // namespace fuzzmon
