#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "fuzzmon/record.hpp"
#include "fuzzmon/schema.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fuzzmon-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// color {red, green, blue}, wet boolean, level numeric [0, 10].
inline fuzzmon::FeatureSchema tiny_schema() {
  using fuzzmon::FeatureDef;
  using fuzzmon::FeatureKind;
  return fuzzmon::FeatureSchema({FeatureDef{"color", FeatureKind::categorical, {"red", "green", "blue"}, 0, 1},
                                 FeatureDef{"wet", FeatureKind::boolean, {}, 0, 1},
                                 FeatureDef{"level", FeatureKind::numeric, {}, 0, 10}});
}

inline fuzzmon::RawRecord tiny_record(const std::string& color, bool wet, double level, bool mp = false, bool hmp = false,
                                      std::int64_t episode = 0, std::int64_t frame = 0) {
  fuzzmon::RawRecord r;
  r.values = {{"color", color}, {"wet", wet}, {"level", level}};
  r.mp = mp;
  r.hmp = hmp;
  r.episode = episode;
  r.frame = frame;
  return r;
}

}  // namespace testutil
