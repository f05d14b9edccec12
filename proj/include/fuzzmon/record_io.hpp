#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fuzzmon/record.hpp"
#include "fuzzmon/schema.hpp"

namespace fuzzmon {

enum class RecordFormat { jsonl, csv };

// ".csv" selects CSV, anything else JSON-lines.
RecordFormat format_from_path(const std::string& path);

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct ReadOptions {
  RecordFormat format = RecordFormat::jsonl;
  bool fail_fast = false;  // throw ParseError on the first bad line
};

// Single-consumer stream over a record file. In collect mode malformed
// lines are skipped and reported through errors().
class RecordReader {
 public:
  RecordReader(const std::string& path, const FeatureSchema& schema, ReadOptions options);

  std::optional<RawRecord> next();
  const std::vector<LineError>& errors() const noexcept { return errors_; }

 private:
  bool next_csv_row(std::vector<std::string>& fields, std::size_t& start_line);
  std::optional<RawRecord> parse_json_line(const std::string& line, std::size_t line_no);
  std::optional<RawRecord> parse_csv_row(const std::vector<std::string>& fields, std::size_t line_no);
  void report(std::size_t line, std::string message);

  const FeatureSchema& schema_;
  ReadOptions options_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::vector<std::string> header_;
  std::vector<LineError> errors_;
};

struct ReadResult {
  std::vector<RawRecord> records;
  std::vector<LineError> errors;
};

ReadResult read_records(const std::string& path, const FeatureSchema& schema, ReadOptions options = {});

void write_records(const std::string& path, const std::vector<RawRecord>& records, const FeatureSchema& schema,
                   RecordFormat format);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace fuzzmon
