#include "fuzzmon/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "fuzzmon/benchmark.hpp"
#include "fuzzmon/error.hpp"
#include "fuzzmon/evidence.hpp"
#include "fuzzmon/model_io.hpp"
#include "fuzzmon/monitors.hpp"
#include "fuzzmon/odd_spec.hpp"
#include "fuzzmon/record_io.hpp"
#include "fuzzmon/scenario.hpp"
#include "fuzzmon/split.hpp"

namespace fuzzmon::cli {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised after outputs are written when a run does not meet its acceptance bar.
class AcceptanceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string schema, data, train, model, out, config, odd, resume, seed_prototypes, report;
  std::string out_train, out_val, schema_out, dump_config;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> episodes;
  double fraction = 0.7;

  std::optional<double> omega0, merge_threshold, util_threshold, accuracy_threshold, locality;
  std::optional<std::size_t> window;
  bool allow_low_accuracy = false;
  std::size_t log_every = 1000;

  double q = 99.0;
  double max_mp_rate = 0.1;
  double gamma_c = 1e-3;
  double gamma_cr = 1.0;
  double speed = 40.0;
  double fps = 10.0;
  double spacing = 500.0;

  std::string group = "visibility";
  std::vector<std::string> attributes;
  double theta_x = 0.5;

  double random_p = 0.5;
  int max_depth = 5;
  std::size_t min_leaf = 5;
};

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<RawRecord> read_all(const std::string& path, const FeatureSchema& schema, std::ostream& log) {
  ReadResult result = read_records(path, schema);
  if (!result.errors.empty()) {
    for (const auto& e : result.errors) log << path << ": line " << e.line << ": " << e.message << '\n';
    throw Error(path + ": " + std::to_string(result.errors.size()) + " malformed record(s)");
  }
  if (result.records.empty()) throw Error(path + ": no records");
  return std::move(result.records);
}

FeatureSchema schema_for(const Options& o, const FuzzyMonitor* model) {
  if (o.schema.empty()) {
    if (!model) throw UsageError("--schema is required");
    return model->schema();
  }
  FeatureSchema schema = load_schema(o.schema);
  if (model && !(schema == model->schema())) throw SchemaError("--schema differs from the schema stored in the model");
  return schema;
}

SafetyCaseParams safety_params(const Options& o) {
  SafetyCaseParams p;
  p.gamma_c = o.gamma_c;
  p.gamma_cr = o.gamma_cr;
  p.speed_kmh = o.speed;
  p.frame_rate = o.fps;
  p.spacing_m = o.spacing;
  p.confidence = o.q;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

ShortlistCriteria criteria(const Options& o) {
  if (!(o.q > 0.0 && o.q < 100.0)) throw UsageError("--q must lie in (0, 100)");
  if (!(o.max_mp_rate >= 0.0 && o.max_mp_rate <= 1.0)) throw UsageError("--max-mp-rate must lie in [0, 1]");
  return {o.q, o.max_mp_rate};
}

std::string pct(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(4);
  s << v;
  return s.str();
}

// ------------------------------------------------------------------ commands

int cmd_simulate(const Options& o, std::ostream& log) {
  SimConfig config = o.config.empty() ? default_scenario() : load_sim_config(o.config);
  if (o.seed) config.seed = *o.seed;
  if (o.episodes) config.episodes = *o.episodes;
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto records = flatten(generate(config));
  write_records(o.out, records, config.schema, format_from_path(o.out));
  if (!o.schema_out.empty()) save_schema(config.schema, o.schema_out);
  if (!o.dump_config.empty()) write_output(o.dump_config, sim_config_to_json(config).dump(2) + "\n");
  log << "simulate: " << config.episodes << " episodes, " << records.size() << " frames -> " << o.out << '\n';
  return kOk;
}

int cmd_split(const Options& o, std::ostream& log) {
  if (!(o.fraction > 0.0 && o.fraction < 1.0)) throw UsageError("--fraction must lie in (0, 1)");
  const FeatureSchema schema = schema_for(o, nullptr);
  const auto records = read_all(o.data, schema, log);
  const auto result = split(records, o.fraction, o.seed.value_or(0));
  write_records(o.out_train, result.train, schema, format_from_path(o.out_train));
  write_records(o.out_val, result.validation, schema, format_from_path(o.out_val));
  log << "split: " << result.train.size() << " training, " << result.validation.size() << " validation frames\n";
  return kOk;
}

Hyperparameters hyper_from(const Options& o) {
  Hyperparameters h;
  if (o.omega0) h.omega0 = *o.omega0;
  if (o.merge_threshold) h.merge_threshold = *o.merge_threshold;
  if (o.util_threshold) h.utility_threshold = *o.util_threshold;
  if (o.window) h.window = *o.window;
  if (o.accuracy_threshold) h.acceptable_accuracy = *o.accuracy_threshold;
  if (o.locality) h.locality_radius = *o.locality;
  try {
    validate(h);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return h;
}

int cmd_train(const Options& o, std::ostream& log) {
  const bool overrides = o.omega0 || o.merge_threshold || o.util_threshold || o.window || o.accuracy_threshold || o.locality;
  std::unique_ptr<FuzzyMonitor> model;
  if (!o.resume.empty()) {
    if (overrides) throw UsageError("hyperparameter overrides cannot be combined with --resume");
    model = std::make_unique<FuzzyMonitor>(load_model_file(o.resume));
    schema_for(o, model.get());
    log << "train: resuming from " << o.resume << " (n_seen=" << model->state().global.n_seen << ", "
        << model->clouds().size() << " clouds)\n";
  } else {
    FeatureSchema schema = schema_for(o, nullptr);
    require_valid(schema);
    model = std::make_unique<FuzzyMonitor>(std::move(schema), hyper_from(o), o.seed.value_or(0));
  }
  const FeatureSchema& schema = model->schema();

  if (!o.seed_prototypes.empty()) {
    for (const auto& r : read_all(o.seed_prototypes, schema, log)) {
      const int id = model->seed_prototype(r, r.mp);
      log << "train: seeded datacloud " << id << '\n';
    }
  }

  const auto records = read_all(o.data, schema, log);
  std::size_t step = 0;
  for (const auto& r : records) {
    const auto outcome = model->learn_one(encode(r, schema).values, r.mp, r.hmp);
    ++step;
    if (o.log_every > 0 && step % o.log_every == 0) {
      log << "train: samples=" << model->state().global.n_seen << " clouds=" << model->clouds().size();
      if (outcome.accuracy.cumulative) log << " cumulative=" << pct(*outcome.accuracy.cumulative);
      if (outcome.accuracy.windowed) log << " windowed=" << pct(*outcome.accuracy.windowed);
      if (outcome.human_review_due) log << " review-due";
      log << '\n';
    }
  }
  save_model_file(*model, o.model);

  const auto acc = model->rolling_accuracy();
  const double threshold = model->hyperparameters().acceptable_accuracy;
  nlohmann::ordered_json summary = {{"samples_seen", model->state().global.n_seen},
                                    {"clouds", model->clouds().size()},
                                    {"dropped_by_prune", model->state().dropped_by_prune},
                                    {"cumulative_accuracy", acc.cumulative ? nlohmann::ordered_json(*acc.cumulative) : nullptr},
                                    {"windowed_accuracy", acc.windowed ? nlohmann::ordered_json(*acc.windowed) : nullptr},
                                    {"window_full", acc.window_full},
                                    {"acceptable_accuracy", threshold}};
  if (!o.out.empty()) write_output(o.out, summary.dump(2) + "\n");
  log << "train: " << model->clouds().size() << " clouds, windowed accuracy "
      << (acc.windowed ? pct(*acc.windowed) : std::string("n/a")) << " -> " << o.model << '\n';
  if (!acc.windowed || *acc.windowed < threshold) {
    if (o.allow_low_accuracy) {
      log << "train: warning: windowed accuracy below " << threshold << " (allowed)\n";
    } else {
      throw AcceptanceFailure("windowed accuracy below the acceptable level " + pct(threshold) +
                              " (use --allow-low-accuracy to accept)");
    }
  }
  return kOk;
}

int cmd_evidence(const Options& o, std::ostream& log) {
  const FuzzyMonitor model = load_model_file(o.model);
  if (model.empty()) throw UntrainedModelError();
  const FeatureSchema schema = schema_for(o, &model);
  const SafetyCaseParams params = safety_params(o);
  const ShortlistCriteria crit = criteria(o);

  std::vector<CloudCounts> counts;
  std::uint64_t total = 0;
  if (o.data.empty()) {
    counts = training_counts(model);
    total = model.state().global.n_seen;
  } else {
    std::vector<LabeledObservation> data;
    for (const auto& r : read_all(o.data, schema, log)) data.push_back({encode(r, schema).values, r.mp, r.hmp});
    counts = tally(model, data);
    total = data.size();
  }
  const SafetyCase sc = assemble_safety_case(collect_evidence(model, counts, total, crit), params);
  for (const auto& w : sc.warnings) log << "evidence: warning: " << w << '\n';
  if (o.format == "text") {
    write_output(o.out, evidence_report_text(sc, params, schema));
  } else {
    write_output(o.out, evidence_report_json(sc, params, schema, total).dump(2) + "\n");
  }
  log << "evidence: gamma_A=" << sc.gamma_a << " gamma_res=" << sc.gamma_res << " -> "
      << (sc.acceptable ? "acceptable" : "unacceptable") << '\n';
  if (!sc.acceptable) throw AcceptanceFailure("safety case unacceptable: gamma_A exceeds gamma_C");
  return kOk;
}

int cmd_odd_derive(const Options& o, std::ostream& log) {
  const FuzzyMonitor model = load_model_file(o.model);
  if (model.empty()) throw UntrainedModelError();
  const Shortlist shortlist = shortlist_clouds(model, criteria(o));
  DeriveOptions d;
  d.group = o.group;
  d.attributes = o.attributes;
  if (!(o.theta_x > 0.0 && o.theta_x <= 1.0)) throw UsageError("--theta-x must lie in (0, 1]");
  d.threshold = o.theta_x;
  const OddDerivation result = derive_odd(model, shortlist, d);
  for (const auto& w : result.warnings) log << "odd: warning: " << w << '\n';
  write_output(o.out, emit(result.spec));
  log << "odd: " << shortlist.included.size() << " included, " << shortlist.excluded.size() << " excluded dataclouds\n";
  return kOk;
}

int cmd_odd_check(const Options& o, std::ostream& log) {
  const FeatureSchema schema = schema_for(o, nullptr);
  const OddFilter filter(load_odd(o.odd), schema);
  const auto records = read_all(o.data, schema, log);
  std::vector<RawRecord> kept;
  std::map<std::string, std::uint64_t> reasons;
  for (const auto& r : records) {
    const OddVerdict v = filter.check(r);
    if (v.within) kept.push_back(r);
    else ++reasons[v.reason];
  }
  if (!o.out.empty()) write_records(o.out, kept, schema, format_from_path(o.out));
  const double retention = static_cast<double>(kept.size()) / static_cast<double>(records.size());
  nlohmann::ordered_json summary = {{"total", records.size()}, {"within_odd", kept.size()}, {"retention", retention}, {"rejections", reasons}};
  if (!o.report.empty()) write_output(o.report, summary.dump(2) + "\n");
  log << "odd: " << kept.size() << " of " << records.size() << " records within the ODD (retention " << pct(retention) << ")\n";
  return kOk;
}

int cmd_benchmark(const Options& o, std::ostream& log) {
  auto model = std::make_shared<FuzzyMonitor>(load_model_file(o.model));
  const FeatureSchema schema = schema_for(o, model.get());
  if (!(o.random_p >= 0.0 && o.random_p <= 1.0)) throw UsageError("--random-p must lie in [0, 1]");
  if (o.max_depth < 0 || o.min_leaf < 1) throw UsageError("--max-depth must be >= 0 and --min-leaf >= 1");

  const auto train = to_samples(read_all(o.train, schema, log), schema);
  const auto validation = read_all(o.data, schema, log);
  std::optional<OddFilter> filter;
  if (!o.odd.empty()) filter.emplace(load_odd(o.odd), schema);
  const auto records = to_eval_records(validation, schema, filter ? &*filter : nullptr);

  RandomMonitor random(o.seed.value_or(0), o.random_p);
  GaussianNaiveBayes gnb;
  DecisionTree tree(o.max_depth, o.min_leaf);
  gnb.fit(train);
  tree.fit(train);
  FuzzyMonitorAdapter fuzzy(model);

  nlohmann::ordered_json config = {{"seed", o.seed.value_or(0)},
                                   {"random_p", o.random_p},
                                   {"tree_max_depth", o.max_depth},
                                   {"tree_min_leaf", o.min_leaf},
                                   {"training_records", train.size()},
                                   {"odd_filter", filter.has_value()}};
  const BenchmarkReport report = benchmark({&random, &gnb, &tree, &fuzzy}, records, filter.has_value(), std::move(config));
  if (o.format == "text") write_output(o.out, benchmark_report_text(report));
  else write_output(o.out, benchmark_report_json(report).dump(2) + "\n");
  log << "benchmark: " << report.rows.size() << " rows over " << report.evaluated << " records (retention "
      << pct(report.retention) << ")\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& log) {
  CLI::App app{"Fuzzy perception monitor toolkit", "fuzzmon"};
  app.require_subcommand(1);
  Options o;

  auto format_opt = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  };
  auto seed_opt = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "Random seed"); };
  auto shortlist_opts = [&](CLI::App* sub) {
    sub->add_option("--q", o.q, "Confidence level q in percent for the sampling error");
    sub->add_option("--max-mp-rate", o.max_mp_rate, "Largest misperception rate (plus error) of a reliable cloud");
  };

  auto* sim = app.add_subcommand("simulate", "Generate synthetic records with planted clusters");
  sim->add_option("--config", o.config, "Simulation config JSON (default scenario when omitted)");
  sim->add_option("--out", o.out, "Output record file (.jsonl or .csv)")->required();
  sim->add_option("--schema-out", o.schema_out, "Also write the schema JSON here");
  sim->add_option("--dump-config", o.dump_config, "Also write the effective config JSON here");
  sim->add_option("--episodes", o.episodes, "Override the episode count");
  seed_opt(sim);

  auto* spl = app.add_subcommand("split", "Split records into training and validation sets by episode");
  spl->add_option("--schema", o.schema, "Schema JSON")->required();
  spl->add_option("--data", o.data, "Input record file")->required();
  spl->add_option("--fraction", o.fraction, "Training fraction");
  spl->add_option("--out-train", o.out_train, "Training output file")->required();
  spl->add_option("--out-val", o.out_val, "Validation output file")->required();
  seed_opt(spl);

  auto* trn = app.add_subcommand("train", "Train the fuzzy monitor test-then-train");
  trn->add_option("--schema", o.schema, "Schema JSON");
  trn->add_option("--data", o.data, "Training record file")->required();
  trn->add_option("--model", o.model, "Model output file")->required();
  trn->add_option("--resume", o.resume, "Continue from this saved model");
  trn->add_option("--seed-prototypes", o.seed_prototypes, "Record file of user-supplied prototypes");
  trn->add_option("--out", o.out, "Training summary JSON");
  trn->add_option("--omega0", o.omega0, "Initial RLS covariance scale");
  trn->add_option("--merge-threshold", o.merge_threshold, "Mutual membership above which clouds merge");
  trn->add_option("--util-threshold", o.util_threshold, "Utility below which clouds are pruned");
  trn->add_option("--window", o.window, "Prequential window size");
  trn->add_option("--accuracy-threshold", o.accuracy_threshold, "Acceptable windowed accuracy A*");
  trn->add_option("--locality", o.locality, "Locality radius for cloud creation (<= 0 disables)");
  trn->add_option("--log-every", o.log_every, "Log progress every N samples (0 disables)");
  trn->add_flag("--allow-low-accuracy", o.allow_low_accuracy, "Exit 0 even when accuracy is below A*");
  seed_opt(trn);

  auto* evd = app.add_subcommand("evidence", "Per-cloud evidence and safety case");
  evd->add_option("--model", o.model, "Trained model")->required();
  evd->add_option("--schema", o.schema, "Schema JSON (checked against the model)");
  evd->add_option("--data", o.data, "Count evidence on this record file instead of training counts");
  evd->add_option("--out", o.out, "Report file (stdout when omitted)");
  evd->add_option("--gamma-c", o.gamma_c, "Acceptable top-level hazard rate gamma_C");
  evd->add_option("--gamma-cr", o.gamma_cr, "Crash probability given a hazardous misperception");
  evd->add_option("--speed", o.speed, "Vehicle speed in km/h");
  evd->add_option("--fps", o.fps, "Perception frame rate");
  evd->add_option("--spacing", o.spacing, "Metres between stopped-car-ahead encounters");
  shortlist_opts(evd);
  format_opt(evd);

  auto* odd = app.add_subcommand("odd", "Derive or apply an ODD specification");
  odd->require_subcommand(1);
  auto* drv = odd->add_subcommand("derive", "Derive an ODD specification from a trained model");
  drv->add_option("--model", o.model, "Trained model")->required();
  drv->add_option("--out", o.out, "Specification file (stdout when omitted)");
  drv->add_option("--group", o.group, "Group label of the exclude attributes");
  drv->add_option("--attributes", o.attributes, "Numeric attributes of exclude blocks, in order")->delimiter(',');
  drv->add_option("--theta-x", o.theta_x, "Membership threshold of exclude blocks");
  shortlist_opts(drv);
  auto* chk = odd->add_subcommand("check", "Filter records by an ODD specification");
  chk->add_option("--odd", o.odd, "Specification file")->required();
  chk->add_option("--schema", o.schema, "Schema JSON")->required();
  chk->add_option("--data", o.data, "Record file")->required();
  chk->add_option("--out", o.out, "Write records within the ODD here");
  chk->add_option("--report", o.report, "Write a retention summary JSON here");

  auto* bm = app.add_subcommand("benchmark", "Compare runtime monitors on validation records");
  bm->add_option("--model", o.model, "Trained fuzzy model")->required();
  bm->add_option("--schema", o.schema, "Schema JSON (checked against the model)");
  bm->add_option("--train", o.train, "Training records for the baseline monitors")->required();
  bm->add_option("--data", o.data, "Validation records")->required();
  bm->add_option("--odd", o.odd, "Apply this ODD specification before evaluating");
  bm->add_option("--out", o.out, "Report file (stdout when omitted)");
  bm->add_option("--random-p", o.random_p, "Intervention probability of the random monitor");
  bm->add_option("--max-depth", o.max_depth, "Decision tree depth");
  bm->add_option("--min-leaf", o.min_leaf, "Decision tree minimum leaf size");
  seed_opt(bm);
  format_opt(bm);

  std::ostringstream help_out;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, help_out, log);
    std::cout << help_out.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(o, log);
    if (*spl) return cmd_split(o, log);
    if (*trn) return cmd_train(o, log);
    if (*evd) return cmd_evidence(o, log);
    if (*drv) return cmd_odd_derive(o, log);
    if (*chk) return cmd_odd_check(o, log);
    if (*bm) return cmd_benchmark(o, log);
  } catch (const UsageError& e) {
    log << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const AcceptanceFailure& e) {
    log << "error: " << e.what() << '\n';
    return kAcceptanceFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args) { return run(args, std::cerr); }

}  // namespace fuzzmon::cli
