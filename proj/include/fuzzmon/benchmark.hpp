#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "fuzzmon/metrics.hpp"
#include "fuzzmon/monitors.hpp"
#include "fuzzmon/odd_spec.hpp"
#include "fuzzmon/record.hpp"

namespace fuzzmon {

struct EvalRecord {
  Eigen::VectorXd o;
  int tau_mp = 0;
  int tau_hmp = 0;
  bool within_odd = true;
};

// Encodes records; within_odd comes from the filter when one is given.
std::vector<EvalRecord> to_eval_records(const std::vector<RawRecord>& records, const FeatureSchema& schema,
                                        const OddFilter* filter = nullptr);

std::vector<Sample> to_samples(const std::vector<RawRecord>& records, const FeatureSchema& schema);

enum class Status { mp, hmp };
const char* to_string(Status status);

struct BenchmarkRow {
  std::string monitor;
  Status status = Status::mp;
  MonitorMetrics metrics;
};

struct BenchmarkReport {
  std::size_t total = 0;
  std::size_t evaluated = 0;
  bool odd_filtered = false;
  double retention = 1.0;  // evaluated / total
  std::vector<BenchmarkRow> rows;  // monitor-major, mp before hmp
  nlohmann::ordered_json monitors = nlohmann::ordered_json::object();
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

// Each monitor predicts once per retained record; both statuses are scored
// from the same predictions. Throws Error when the filter leaves no records.
BenchmarkReport benchmark(const std::vector<Monitor*>& monitors, const std::vector<EvalRecord>& records,
                          bool apply_odd_filter, nlohmann::ordered_json config = nlohmann::ordered_json::object());

nlohmann::ordered_json benchmark_report_json(const BenchmarkReport& report);
std::string benchmark_report_text(const BenchmarkReport& report);

}  // namespace fuzzmon
