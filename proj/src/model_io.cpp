#include "fuzzmon/model_io.hpp"

#include <fstream>
#include <sstream>

#include "fuzzmon/error.hpp"

namespace fuzzmon {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& doc) {
  if (!doc.is_array()) throw StateFormatError("expected a number array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) v[static_cast<Eigen::Index>(i)] = doc[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& doc) {
  if (!doc.is_array()) throw StateFormatError("expected a matrix");
  const auto rows = static_cast<Eigen::Index>(doc.size());
  Eigen::MatrixXd m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = doc[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows)
      throw StateFormatError("covariance must be square");
    m.row(r) = vector_from_json(row).transpose();
  }
  return m;
}

}  // namespace

json hyperparameters_to_json(const Hyperparameters& h) {
  return {{"omega0", h.omega0},
          {"merge_threshold", h.merge_threshold},
          {"utility_threshold", h.utility_threshold},
          {"min_support_for_prune", h.min_support_for_prune},
          {"window", h.window},
          {"acceptable_accuracy", h.acceptable_accuracy},
          {"locality_radius", h.locality_radius},
          {"variance_floor", h.variance_floor},
          {"variance_fraction", h.variance_fraction}};
}

Hyperparameters hyperparameters_from_json(const json& doc) {
  Hyperparameters h;
  h.omega0 = doc.at("omega0").get<double>();
  h.merge_threshold = doc.at("merge_threshold").get<double>();
  h.utility_threshold = doc.at("utility_threshold").get<double>();
  h.min_support_for_prune = doc.at("min_support_for_prune").get<std::uint64_t>();
  h.window = doc.at("window").get<std::size_t>();
  h.acceptable_accuracy = doc.at("acceptable_accuracy").get<double>();
  h.locality_radius = doc.at("locality_radius").get<double>();
  h.variance_floor = doc.at("variance_floor").get<double>();
  h.variance_fraction = doc.at("variance_fraction").get<double>();
  return h;
}

json model_to_json(const FuzzyMonitor& model) {
  const auto& s = model.state();
  json clouds = json::array();
  for (const auto& c : s.clouds) {
    clouds.push_back({{"id", c.id},
                      {"origin", c.origin == CloudOrigin::user_seeded ? "user-seeded" : "discovered"},
                      {"support", c.support},
                      {"mp_count", c.mp_count},
                      {"hmp_count", c.hmp_count},
                      {"creation_index", c.creation_index},
                      {"accumulated_firing", c.accumulated_firing},
                      {"prototype", vector_to_json(c.prototype)},
                      {"mean_square", c.mean_square},
                      {"dim_mean_square", vector_to_json(c.dim_mean_square)},
                      {"consequent", vector_to_json(c.consequent)},
                      {"covariance", matrix_to_json(c.covariance)}});
  }
  std::string window;
  for (bool hit : s.prequential.window) window += hit ? '1' : '0';
  return {{"format", kModelFormat},
          {"version", kModelVersion},
          {"schema", schema_to_json(s.schema)},
          {"hyperparameters", hyperparameters_to_json(s.hyper)},
          {"seed", s.seed},
          {"global", {{"n_seen", s.global.n_seen}, {"mean", vector_to_json(s.global.mean)}, {"mean_square", s.global.mean_square}}},
          {"next_id", s.next_id},
          {"dropped_by_prune", s.dropped_by_prune},
          {"prequential", {{"tests", s.prequential.tests}, {"hits", s.prequential.hits}, {"window", window}}},
          {"clouds", std::move(clouds)}};
}

FuzzyMonitor model_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != kModelFormat)
      throw StateFormatError("not a fuzzmon model document");
    const int version = doc.at("version").get<int>();
    if (version != kModelVersion)
      throw StateVersionError("model document version " + std::to_string(version) + ", expected " +
                              std::to_string(kModelVersion));
    ModelState s;
    s.schema = schema_from_json(doc.at("schema"));
    s.hyper = hyperparameters_from_json(doc.at("hyperparameters"));
    s.seed = doc.at("seed").get<std::uint64_t>();
    const auto& g = doc.at("global");
    s.global.n_seen = g.at("n_seen").get<std::uint64_t>();
    s.global.mean = vector_from_json(g.at("mean"));
    s.global.mean_square = g.at("mean_square").get<double>();
    s.next_id = doc.at("next_id").get<int>();
    s.dropped_by_prune = doc.at("dropped_by_prune").get<std::uint64_t>();
    const auto& pq = doc.at("prequential");
    s.prequential.tests = pq.at("tests").get<std::uint64_t>();
    s.prequential.hits = pq.at("hits").get<std::uint64_t>();
    for (char ch : pq.at("window").get<std::string>()) {
      if (ch != '0' && ch != '1') throw StateFormatError("prequential window must be a 0/1 string");
      s.prequential.window.push_back(ch == '1');
    }
    for (const auto& item : doc.at("clouds")) {
      Datacloud c;
      c.id = item.at("id").get<int>();
      const auto origin = item.at("origin").get<std::string>();
      if (origin != "discovered" && origin != "user-seeded") throw StateFormatError("unknown cloud origin " + origin);
      c.origin = origin == "user-seeded" ? CloudOrigin::user_seeded : CloudOrigin::discovered;
      c.support = item.at("support").get<std::uint64_t>();
      c.mp_count = item.at("mp_count").get<std::uint64_t>();
      c.hmp_count = item.at("hmp_count").get<std::uint64_t>();
      c.creation_index = item.at("creation_index").get<std::uint64_t>();
      c.accumulated_firing = item.at("accumulated_firing").get<double>();
      c.prototype = vector_from_json(item.at("prototype"));
      c.mean_square = item.at("mean_square").get<double>();
      c.dim_mean_square = vector_from_json(item.at("dim_mean_square"));
      c.consequent = vector_from_json(item.at("consequent"));
      c.covariance = matrix_from_json(item.at("covariance"));
      s.clouds.push_back(std::move(c));
    }
    return FuzzyMonitor(std::move(s));
  } catch (const json::exception& e) {
    throw StateFormatError(std::string("corrupted model document: ") + e.what());
  } catch (const SchemaError& e) {
    throw StateFormatError(std::string("corrupted model document: ") + e.what());
  }
}

std::string save_state(const FuzzyMonitor& model) { return model_to_json(model).dump(1) + "\n"; }

FuzzyMonitor load_state(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw StateFormatError(std::string("corrupted model document: ") + e.what());
  }
  return model_from_json(doc);
}

void save_model_file(const FuzzyMonitor& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path + "'");
  out << save_state(model);
}

FuzzyMonitor load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_state(buf.str());
}

}  // namespace fuzzmon
