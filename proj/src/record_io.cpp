#include "fuzzmon/record_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <json.hpp>

#include "fuzzmon/error.hpp"

namespace fuzzmon {

namespace {

const std::array<const char*, 4> kRequiredKeys = {"mp", "hmp", "episode", "frame"};

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::optional<double> parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_int(const std::string& text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<bool> parse_bool(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  if (text == "true") return true;
  if (text == "false") return false;
  return std::nullopt;
}

void check_flags(const RawRecord& r) {
  if (r.hmp && !r.mp) throw std::invalid_argument("hmp=1 requires mp=1");
  if (r.frame < 0) throw std::invalid_argument("frame must be >= 0");
}

bool json_flag(const nlohmann::json& v, const char* key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() || v.is_number_unsigned()) {
    auto n = v.get<std::int64_t>();
    if (n == 0 || n == 1) return n == 1;
  }
  throw std::invalid_argument(std::string("\"") + key + "\" must be 0 or 1, got " + v.dump());
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

RecordFormat format_from_path(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == "csv") return RecordFormat::csv;
  }
  return RecordFormat::jsonl;
}

RecordReader::RecordReader(const std::string& path, const FeatureSchema& schema, ReadOptions options)
    : schema_(schema), options_(options), in_(path, std::ios::binary) {
  if (!in_) throw Error("cannot open record file '" + path + "'");
  if (options_.format == RecordFormat::csv) {
    std::size_t start = 0;
    if (!next_csv_row(header_, start)) return;  // empty file
    std::set<std::string> seen(header_.begin(), header_.end());
    std::vector<std::string> missing;
    for (const auto& f : schema_.features())
      if (!seen.count(f.name)) missing.push_back(f.name);
    for (const char* key : kRequiredKeys)
      if (!seen.count(key)) missing.push_back(key);
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw ParseError(start, 0, "CSV header lacks columns: " + list);
    }
  }
}

void RecordReader::report(std::size_t line, std::string message) {
  if (options_.fail_fast) throw ParseError(line, 0, message);
  errors_.push_back({line, std::move(message)});
}

std::optional<RawRecord> RecordReader::next() {
  if (options_.format == RecordFormat::jsonl) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (is_blank(line)) continue;
      if (auto rec = parse_json_line(line, line_no_)) return rec;
    }
    return std::nullopt;
  }
  if (header_.empty()) return std::nullopt;
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (next_csv_row(fields, start)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (auto rec = parse_csv_row(fields, start)) return rec;
  }
  return std::nullopt;
}

// RFC 4180: quoted fields may hold commas, doubled quotes and line breaks.
bool RecordReader::next_csv_row(std::vector<std::string>& fields, std::size_t& start_line) {
  fields.clear();
  int c = in_.get();
  if (c == EOF) return false;
  ++line_no_;
  start_line = line_no_;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  for (;; c = in_.get()) {
    if (c == EOF) {
      fields.push_back(std::move(field));
      return true;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_no_;
        field += ch;
      }
      continue;
    }
    if (ch == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (ch == '\r') {
      if (in_.peek() == '\n') continue;
      fields.push_back(std::move(field));
      return true;
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field += ch;
    }
  }
}

std::optional<RawRecord> RecordReader::parse_json_line(const std::string& line, std::size_t line_no) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    report(line_no, std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
  if (!doc.is_object()) {
    report(line_no, "expected a JSON object");
    return std::nullopt;
  }
  try {
    RawRecord rec;
    for (const char* key : kRequiredKeys)
      if (!doc.contains(key)) throw std::invalid_argument(std::string("missing \"") + key + "\"");
    rec.mp = json_flag(doc["mp"], "mp");
    rec.hmp = json_flag(doc["hmp"], "hmp");
    if (!doc["episode"].is_number_integer()) throw std::invalid_argument("\"episode\" must be an integer");
    if (!doc["frame"].is_number_integer()) throw std::invalid_argument("\"frame\" must be an integer");
    rec.episode = doc["episode"].get<std::int64_t>();
    rec.frame = doc["frame"].get<std::int64_t>();
    if (doc.contains("exemplar") && !doc["exemplar"].is_null()) {
      if (!doc["exemplar"].is_string()) throw std::invalid_argument("\"exemplar\" must be a string");
      rec.exemplar = doc["exemplar"].get<std::string>();
    }
    for (const auto& f : schema_.features()) {
      if (!doc.contains(f.name)) throw std::invalid_argument("missing feature \"" + f.name + "\"");
      const auto& v = doc[f.name];
      switch (f.kind) {
        case FeatureKind::categorical:
          if (!v.is_string()) throw std::invalid_argument("\"" + f.name + "\" must be a string");
          rec.values[f.name] = v.get<std::string>();
          break;
        case FeatureKind::boolean:
          if (!v.is_boolean()) throw std::invalid_argument("\"" + f.name + "\" must be true/false");
          rec.values[f.name] = v.get<bool>();
          break;
        case FeatureKind::numeric:
          if (!v.is_number()) throw std::invalid_argument("\"" + f.name + "\" must be a number");
          rec.values[f.name] = v.get<double>();
          break;
      }
    }
    check_flags(rec);
    return rec;
  } catch (const std::invalid_argument& e) {
    report(line_no, e.what());
    return std::nullopt;
  }
}

std::optional<RawRecord> RecordReader::parse_csv_row(const std::vector<std::string>& fields, std::size_t line_no) {
  if (fields.size() != header_.size()) {
    report(line_no, "expected " + std::to_string(header_.size()) + " fields, got " + std::to_string(fields.size()));
    return std::nullopt;
  }
  auto field = [&](const std::string& name) -> const std::string& {
    auto it = std::find(header_.begin(), header_.end(), name);
    return fields[static_cast<std::size_t>(it - header_.begin())];
  };
  try {
    RawRecord rec;
    auto flag = [&](const char* key) {
      const auto& text = field(key);
      if (text == "0" || text == "1") return text == "1";
      if (auto b = parse_bool(text)) return *b;
      throw std::invalid_argument(std::string("\"") + key + "\" must be 0 or 1, got '" + text + "'");
    };
    rec.mp = flag("mp");
    rec.hmp = flag("hmp");
    auto episode = parse_int(field("episode"));
    auto frame = parse_int(field("frame"));
    if (!episode) throw std::invalid_argument("\"episode\" must be an integer");
    if (!frame) throw std::invalid_argument("\"frame\" must be an integer");
    rec.episode = *episode;
    rec.frame = *frame;
    if (std::find(header_.begin(), header_.end(), "exemplar") != header_.end() && !field("exemplar").empty())
      rec.exemplar = field("exemplar");
    for (const auto& f : schema_.features()) {
      const auto& text = field(f.name);
      switch (f.kind) {
        case FeatureKind::categorical:
          rec.values[f.name] = text;
          break;
        case FeatureKind::boolean: {
          auto b = parse_bool(text);
          if (!b) throw std::invalid_argument("\"" + f.name + "\" must be true/false, got '" + text + "'");
          rec.values[f.name] = *b;
          break;
        }
        case FeatureKind::numeric: {
          auto d = parse_double(text);
          if (!d) throw std::invalid_argument("\"" + f.name + "\" must be a number, got '" + text + "'");
          rec.values[f.name] = *d;
          break;
        }
      }
    }
    check_flags(rec);
    return rec;
  } catch (const std::invalid_argument& e) {
    report(line_no, e.what());
    return std::nullopt;
  }
}

ReadResult read_records(const std::string& path, const FeatureSchema& schema, ReadOptions options) {
  RecordReader reader(path, schema, options);
  ReadResult result;
  while (auto rec = reader.next()) result.records.push_back(std::move(*rec));
  result.errors = reader.errors();
  return result;
}

void write_records(const std::string& path, const std::vector<RawRecord>& records, const FeatureSchema& schema,
                   RecordFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write record file '" + path + "'");
  auto value_text = [](const FeatureValue& v) -> std::string {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    return format_double(std::get<double>(v));
  };
  if (format == RecordFormat::csv) {
    for (const auto& f : schema.features()) out << csv_quote(f.name) << ',';
    out << "mp,hmp,episode,frame,exemplar\n";
    for (const auto& r : records) {
      for (const auto& f : schema.features()) out << csv_quote(value_text(r.values.at(f.name))) << ',';
      out << (r.mp ? 1 : 0) << ',' << (r.hmp ? 1 : 0) << ',' << r.episode << ',' << r.frame << ','
          << csv_quote(r.exemplar.value_or("")) << '\n';
    }
    return;
  }
  for (const auto& r : records) {
    nlohmann::ordered_json doc;
    for (const auto& f : schema.features()) {
      const auto& v = r.values.at(f.name);
      if (const auto* s = std::get_if<std::string>(&v))
        doc[f.name] = *s;
      else if (const auto* b = std::get_if<bool>(&v))
        doc[f.name] = *b;
      else
        doc[f.name] = std::get<double>(v);
    }
    doc["mp"] = r.mp ? 1 : 0;
    doc["hmp"] = r.hmp ? 1 : 0;
    doc["episode"] = r.episode;
    doc["frame"] = r.frame;
    if (r.exemplar) doc["exemplar"] = *r.exemplar;
    out << doc.dump() << '\n';
  }
}

}  // namespace fuzzmon
