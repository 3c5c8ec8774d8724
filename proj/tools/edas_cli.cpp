// Command-line front end: ingest rollout logs (JSONL, one trajectory per
// line), run shaping / analytics / simulation, and emit structured records.
//
// Subcommands:
//   shape     reshape advantages of incorrect rollouts by error diversity
//   analyze   per-problem pass rates, Pass@k, diversity, breakthroughs
//   simulate  deterministic toy policy-gradient experiments
//   passk     direct Pass@k evaluation from n/c/k
//
// Flag precedence: CLI flags > config file (--config or $EDAS_CONFIG) >
// built-in defaults.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edas/advantage.hpp"
#include "edas/analytics.hpp"
#include "edas/error_partition.hpp"
#include "edas/io.hpp"
#include "edas/sim.hpp"

namespace {

using nlohmann::json;

json load_default_config(const std::string& explicit_path) {
  std::string path = explicit_path;
  if (path.empty()) {
    if (const char* env = std::getenv("EDAS_CONFIG")) path = env;
  }
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw edas::ConfigError("cannot open config file '" + path + "'");
  json config;
  try {
    in >> config;
  } catch (const json::parse_error& e) {
    throw edas::ConfigError("config file '" + path + "': " + e.what());
  }
  if (!config.is_object()) {
    throw edas::ConfigError("config file '" + path + "' must hold an object");
  }
  return config;
}

// Input stream from a path, "-" meaning stdin.
struct InputStream {
  explicit InputStream(const std::string& path) {
    if (path != "-") {
      file.emplace(path);
      if (!*file) throw edas::ConfigError("cannot open input '" + path + "'");
    }
  }
  std::istream& get() { return file ? *file : std::cin; }
  std::optional<std::ifstream> file;
};

struct OutputStream {
  explicit OutputStream(const std::string& path) {
    if (path != "-") {
      file.emplace(path);
      if (!*file) throw edas::ConfigError("cannot open output '" + path + "'");
    }
  }
  std::ostream& get() { return file ? *file : std::cout; }
  std::optional<std::ofstream> file;
};

// ---------------------------------------------------------------------------
// shape

struct ShapeOptions {
  std::string input = "-";
  std::string output = "-";
  std::string dropped_output;
  std::string config_path;
  std::string domain = "auto";  // math | code | auto (per group)
  std::string dynamic_sampling = "off";
  edas::ShapingConfig shaping;
};

int run_shape(const ShapeOptions& options, const CLI::App& cmd) {
  edas::ShapingConfig config = options.shaping;
  const json defaults = load_default_config(options.config_path);
  auto pick_double = [&](const char* flag, const char* key, double& slot) {
    if (cmd.count(flag) == 0 && defaults.contains(key)) {
      slot = defaults.at(key).get<double>();
    }
  };
  pick_double("--alpha", "alpha", config.alpha);
  pick_double("--beta", "beta", config.beta);
  pick_double("--kappa", "kappa", config.kappa);
  pick_double("--epsilon-std", "epsilon_std", config.epsilon_std);
  std::string domain = options.domain;
  if (cmd.count("--domain") == 0 && defaults.contains("domain")) {
    domain = defaults.at("domain").get<std::string>();
  }
  std::string dynamic_sampling = options.dynamic_sampling;
  if (cmd.count("--dynamic-sampling") == 0 &&
      defaults.contains("dynamic_sampling")) {
    dynamic_sampling = defaults.at("dynamic_sampling").get<std::string>();
  }
  config.validate();
  if (domain != "auto" && domain != "math" && domain != "code") {
    throw edas::ConfigError("--domain must be math, code, or auto");
  }
  if (dynamic_sampling != "on" && dynamic_sampling != "off") {
    throw edas::ConfigError("--dynamic-sampling must be on or off");
  }
  const bool filter = dynamic_sampling == "on";

  InputStream in(options.input);
  OutputStream out(options.output);
  std::unique_ptr<OutputStream> dropped_out;
  if (!options.dropped_output.empty()) {
    dropped_out = std::make_unique<OutputStream>(options.dropped_output);
  }

  edas::IngestOptions ingest_options;
  ingest_options.collect_errors = true;
  ingest_options.epsilon_std = config.epsilon_std;
  edas::IngestResult ingested = edas::ingest(in.get(), ingest_options);

  std::size_t failed_groups = 0;
  for (std::size_t g = 0; g < ingested.groups.size(); ++g) {
    const edas::RolloutGroup& group = ingested.groups[g];
    const std::size_t nw = group.num_incorrect();
    if (filter && (nw == 0 || nw == group.size())) {
      json record{{"type", "dropped_group"},
                  {"prompt_id", group.prompt_id},
                  {"n", group.size()},
                  {"reason", nw == 0 ? "all_correct" : "all_incorrect"}};
      if (dropped_out) {
        dropped_out->get() << record.dump() << "\n";
      } else {
        std::cerr << "dropped: " << record.dump() << "\n";
      }
      continue;
    }
    edas::ShapingConfig group_config = config;
    const edas::Domain group_domain = edas::group_domain(group);
    if (domain == "auto") {
      group_config.domain = group_domain;
    } else {
      group_config.domain =
          domain == "math" ? edas::Domain::math : edas::Domain::code;
      if (group_config.domain != group_domain) {
        std::cerr << "error: group '" << group.prompt_id
                  << "': payload domain does not match --domain " << domain
                  << "\n";
        ++failed_groups;
        continue;
      }
    }

    edas::ShapedGroup shaped;
    try {
      shaped = edas::shape_group(group, group_config);
    } catch (const edas::Error& e) {
      std::cerr << "error: group '" << group.prompt_id << "': " << e.what()
                << "\n";
      ++failed_groups;
      continue;
    }

    double surprisal_sum = 0.0;
    for (const auto& adj : shaped.adjustments) {
      if (adj.surprisal) surprisal_sum += *adj.surprisal;
    }
    json group_record{{"type", "group"},
                      {"prompt_id", group.prompt_id},
                      {"n", group.size()},
                      {"n_w", shaped.stats.nw},
                      {"k", shaped.stats.k},
                      {"branch", edas::to_string(shaped.branch)},
                      {"scale", shaped.stats.scale},
                      {"entropy", shaped.stats.entropy},
                      {"surprisal_sum", surprisal_sum},
                      {"delta_sum_post_clip", shaped.delta_sum_post_clip()},
                      {"advantage_derived", bool(ingested.advantage_derived[g])}};
    out.get() << group_record.dump() << "\n";

    // Audit records by trajectory index; correct trajectories have none.
    std::map<std::size_t, const edas::AdjustmentRecord*> adjustment_of;
    for (const auto& adj : shaped.adjustments) adjustment_of[adj.index] = &adj;
    for (std::size_t i = 0; i < group.size(); ++i) {
      json record =
          edas::trajectory_record(group.prompt_id, group.trajectories[i]);
      record["type"] = "trajectory";
      record["advantage_derived"] = bool(ingested.advantage_derived[g]);
      record["branch"] = edas::to_string(shaped.branch);
      record["k"] = shaped.stats.k;
      record["n_w"] = shaped.stats.nw;
      record["scale"] = shaped.stats.scale;
      record["entropy"] = shaped.stats.entropy;
      record["advantage_final"] = shaped.final_advantages[i];
      if (auto it = adjustment_of.find(i); it != adjustment_of.end()) {
        record["delta_raw"] = it->second->delta_raw;
        record["delta_applied"] = it->second->delta_applied;
        record["clipped"] = it->second->clipped;
        record["self_information"] = it->second->self_information;
        if (it->second->surprisal) {
          record["surprisal"] = *it->second->surprisal;
        }
      } else {
        record["delta_raw"] = 0.0;
        record["delta_applied"] = 0.0;
        record["clipped"] = false;
      }
      out.get() << record.dump() << "\n";
    }
  }

  for (const edas::LineError& e : ingested.errors) {
    std::cerr << "error: line " << e.line << ": " << e.message << "\n";
  }
  return (ingested.errors.empty() && failed_groups == 0) ? 0 : 1;
}

// ---------------------------------------------------------------------------
// analyze

edas::ProblemOutcome outcome_of_group(const edas::RolloutGroup& group) {
  edas::ProblemOutcome outcome;
  outcome.problem_id = group.prompt_id;
  outcome.n = static_cast<int>(group.size());
  outcome.c = static_cast<int>(group.size() - group.num_incorrect());
  const edas::Domain domain = edas::group_domain(group);
  for (std::size_t i : group.incorrect_set) {
    outcome.wrong_labels.push_back(
        edas::error_label(group.trajectories[i], domain));
  }
  return outcome;
}

struct Snapshot {
  std::vector<edas::ProblemOutcome> outcomes;
  std::vector<edas::ErrorPartition> partitions;
};

Snapshot load_snapshot(const std::string& path) {
  InputStream in(path);
  edas::IngestResult ingested = edas::ingest(in.get());  // strict
  Snapshot snapshot;
  for (const edas::RolloutGroup& group : ingested.groups) {
    snapshot.outcomes.push_back(outcome_of_group(group));
    edas::ShapingConfig config;
    config.domain = edas::group_domain(group);
    snapshot.partitions.push_back(edas::partition_errors(group, config));
  }
  return snapshot;
}

json problem_stats(const edas::ProblemOutcome& outcome,
                   const std::vector<int>& ks) {
  json stats{{"n", outcome.n}, {"c", outcome.c}, {"apr", outcome.apr()}};
  if (outcome.c < outcome.n) {
    stats["diversity"] = edas::error_diversity(outcome);
  } else {
    stats["diversity"] = nullptr;  // not applicable without errors
  }
  json passk = json::object();
  for (int k : ks) {
    if (k <= outcome.n) {
      passk[std::to_string(k)] = edas::pass_at_k(outcome.n, outcome.c, k);
    }
  }
  stats["pass_at_k"] = passk;
  return stats;
}

struct AnalyzeOptions {
  std::string input;
  std::string before;
  std::string after;
  std::string output = "-";
  std::string k_list = "1";
  std::vector<int> ks;
};

std::vector<int> parse_k_list(const std::string& list) {
  std::vector<int> ks;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t consumed = 0;
      const int k = std::stoi(item, &consumed);
      if (consumed != item.size()) throw std::invalid_argument(item);
      ks.push_back(k);
    } catch (const std::exception&) {
      throw edas::ConfigError("--k: '" + item + "' is not an integer");
    }
  }
  if (ks.empty()) throw edas::ConfigError("--k: empty list");
  return ks;
}

int run_analyze(AnalyzeOptions options) {
  options.ks = parse_k_list(options.k_list);
  for (int k : options.ks) {
    if (k < 1) throw edas::InvalidKError("--k values must be >= 1");
  }
  OutputStream out(options.output);

  if (!options.before.empty() || !options.after.empty()) {
    if (options.before.empty() || options.after.empty()) {
      throw edas::ConfigError("--before and --after must be given together");
    }
    const Snapshot before = load_snapshot(options.before);
    const Snapshot after = load_snapshot(options.after);
    const edas::BreakthroughReport report =
        edas::breakthrough_report(before.outcomes, after.outcomes);

    std::map<std::string, const edas::ProblemOutcome*> after_by_id;
    for (const auto& p : after.outcomes) after_by_id[p.problem_id] = &p;
    for (const auto& p : before.outcomes) {
      const edas::ProblemOutcome& b = p;
      const edas::ProblemOutcome& a = *after_by_id.at(p.problem_id);
      json record{{"type", "problem"},
                  {"problem_id", p.problem_id},
                  {"before", problem_stats(b, options.ks)},
                  {"after", problem_stats(a, options.ks)},
                  {"improved", a.apr() > b.apr()},
                  {"hard", b.c == 0},
                  {"breakthrough", b.c == 0 && a.c > 0}};
      out.get() << record.dump() << "\n";
    }
    auto emit_quartiles = [&](const char* cohort,
                              const std::vector<edas::QuartileSummary>& qs) {
      for (std::size_t q = 0; q < qs.size(); ++q) {
        json record{{"type", "diversity_quartile"},
                    {"cohort", cohort},
                    {"quartile", q + 1},
                    {"size", qs[q].problem_ids.size()},
                    {"min_diversity", qs[q].min_diversity},
                    {"max_diversity", qs[q].max_diversity},
                    {"improvement_rate", qs[q].improvement_rate}};
        out.get() << record.dump() << "\n";
      }
    };
    emit_quartiles("error_prone", report.error_prone_quartiles);
    emit_quartiles("hard", report.hard_quartiles);
    json summary{{"type", "breakthrough_summary"},
                 {"problems", report.problems},
                 {"hard", report.hard_count},
                 {"breakthroughs", report.breakthrough_count},
                 {"breakthrough_rate", report.breakthrough_rate},
                 {"improvement_rate", report.improvement_rate},
                 {"breakthrough_ids", report.breakthrough_ids}};
    out.get() << summary.dump() << "\n";
    return 0;
  }

  if (options.input.empty()) {
    throw edas::ConfigError("give an input log, or --before and --after");
  }
  const Snapshot snapshot = load_snapshot(options.input);
  double apr_sum = 0.0;
  std::map<std::string, double> passk_sum;
  std::map<std::string, std::size_t> passk_count;
  for (const auto& p : snapshot.outcomes) {
    json record{{"type", "problem"}, {"problem_id", p.problem_id}};
    record.update(problem_stats(p, options.ks));
    out.get() << record.dump() << "\n";
    apr_sum += p.apr();
    for (int k : options.ks) {
      if (k <= p.n) {
        passk_sum[std::to_string(k)] += edas::pass_at_k(p.n, p.c, k);
        passk_count[std::to_string(k)] += 1;
      }
    }
  }
  json mean_passk = json::object();
  for (const auto& [k, sum] : passk_sum) {
    mean_passk[k] = sum / static_cast<double>(passk_count[k]);
  }
  json aggregate{
      {"type", "aggregate"},
      {"problems", snapshot.outcomes.size()},
      {"mean_apr", snapshot.outcomes.empty()
                       ? 0.0
                       : apr_sum / static_cast<double>(snapshot.outcomes.size())},
      {"mean_pass_at_k", mean_passk},
      {"diverse_group_count", edas::diverse_group_count(snapshot.partitions)}};
  out.get() << aggregate.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimBatch {
  edas::ToyTask task;
  edas::SoftmaxPolicy initial_policy;
  edas::SimConfig base;  // algorithm/seed overwritten per run
  std::vector<edas::Algorithm> algorithms;
  std::vector<std::uint64_t> seeds;
  double threshold = 0.5;
  double smoothing = 0.5;
};

[[noreturn]] void config_fail(const std::string& path,
                              const std::string& message) {
  throw edas::ConfigError(path + ": " + message);
}

SimBatch parse_sim_batch(const json& config) {
  SimBatch batch;
  if (!config.is_object()) config_fail("(root)", "must be a JSON object");

  if (!config.contains("task")) config_fail("task", "is required");
  const json& task = config.at("task");
  if (!task.contains("vocabulary") || !task.at("vocabulary").is_array()) {
    config_fail("task.vocabulary", "must be an array of answer strings");
  }
  for (const auto& v : task.at("vocabulary")) {
    if (!v.is_string()) {
      config_fail("task.vocabulary", "entries must be strings");
    }
    batch.task.vocabulary.push_back(v.get<std::string>());
  }
  batch.task.correct_index = task.value("correct_index", 0);
  try {
    batch.task.validate();
  } catch (const edas::Error& e) {
    config_fail("task", e.what());
  }

  if (config.contains("initial_probabilities")) {
    const json& init = config.at("initial_probabilities");
    if (!init.is_array() || init.size() != batch.task.vocabulary.size()) {
      config_fail("initial_probabilities",
                  "must be an array matching the vocabulary size");
    }
    try {
      batch.initial_policy =
          edas::policy_from_probabilities(init.get<std::vector<double>>());
    } catch (const edas::Error& e) {
      config_fail("initial_probabilities", e.what());
    }
  } else {
    batch.initial_policy.logits.assign(batch.task.vocabulary.size(), 0.0);
  }

  batch.base.group_size = config.value("group_size", std::size_t{10});
  batch.base.learning_rate = config.value("learning_rate", 0.05);
  batch.base.steps = config.value("steps", std::size_t{1000});
  batch.base.resample_retries =
      config.value("resample_retries", std::size_t{16});
  batch.base.pkpo_k = config.value("pkpo_k", 8);
  if (config.contains("shaping")) {
    const json& shaping = config.at("shaping");
    batch.base.shaping.alpha = shaping.value("alpha", batch.base.shaping.alpha);
    batch.base.shaping.beta = shaping.value("beta", batch.base.shaping.beta);
    batch.base.shaping.kappa = shaping.value("kappa", batch.base.shaping.kappa);
    batch.base.shaping.epsilon_std =
        shaping.value("epsilon_std", batch.base.shaping.epsilon_std);
  }
  try {
    batch.base.shaping.validate();
  } catch (const edas::Error& e) {
    config_fail("shaping", e.what());
  }

  if (!config.contains("algorithms") || !config.at("algorithms").is_array() ||
      config.at("algorithms").empty()) {
    config_fail("algorithms", "must be a non-empty array");
  }
  const json& algorithms = config.at("algorithms");
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    if (!algorithms[i].is_string()) {
      config_fail("algorithms[" + std::to_string(i) + "]", "must be a string");
    }
    const std::string name = algorithms[i].get<std::string>();
    const auto parsed = edas::parse_algorithm(name);
    if (!parsed) {
      config_fail("algorithms[" + std::to_string(i) + "]",
                  "unknown algorithm '" + name +
                      "'; valid: " + std::string(edas::kAlgorithmNames));
    }
    batch.algorithms.push_back(*parsed);
  }

  if (!config.contains("seeds") || !config.at("seeds").is_array() ||
      config.at("seeds").empty()) {
    config_fail("seeds", "must be a non-empty array of integers");
  }
  for (const auto& s : config.at("seeds")) {
    if (!s.is_number_unsigned() && !s.is_number_integer()) {
      config_fail("seeds", "entries must be integers");
    }
    batch.seeds.push_back(s.get<std::uint64_t>());
  }
  batch.threshold = config.value("threshold", 0.5);
  batch.smoothing = config.value("smoothing", 0.5);

  edas::SimConfig probe = batch.base;
  probe.algorithm = batch.algorithms.front();
  probe.seed = batch.seeds.front();
  try {
    probe.validate();
  } catch (const edas::Error& e) {
    config_fail("(config)", e.what());
  }
  return batch;
}

json step_to_json(const edas::StepRecord& r) {
  return json{{"step", r.step},
              {"prob_correct", r.prob_correct},
              {"reward_mean", r.reward_mean},
              {"unique_wrong", r.unique_wrong},
              {"branch", edas::to_string(r.branch)},
              {"diverse", r.diverse},
              {"delta_sum_post_clip", r.delta_sum_post_clip},
              {"skipped", r.skipped}};
}

struct SimulateOptions {
  std::string config_path;
  std::string out_dir;
};

int run_simulate(const SimulateOptions& options) {
  std::ifstream in(options.config_path);
  if (!in) {
    throw edas::ConfigError("cannot open config file '" + options.config_path +
                            "'");
  }
  json config;
  try {
    in >> config;
  } catch (const json::parse_error& e) {
    throw edas::ConfigError(std::string("config parse error: ") + e.what());
  }
  const SimBatch batch = parse_sim_batch(config);

  std::filesystem::create_directories(options.out_dir);
  json summary{{"threshold", batch.threshold}, {"variants", json::object()}};
  for (edas::Algorithm algorithm : batch.algorithms) {
    std::vector<json> steps_to_threshold;
    double unique_wrong_sum = 0.0;
    std::size_t unique_wrong_steps = 0;
    double smoothed_final_sum = 0.0;
    for (std::uint64_t seed : batch.seeds) {
      edas::SimConfig config_run = batch.base;
      config_run.algorithm = algorithm;
      config_run.seed = seed;
      const edas::Trace trace =
          edas::run_experiment(config_run, batch.task, batch.initial_policy);

      const std::filesystem::path trace_path =
          std::filesystem::path(options.out_dir) /
          ("trace_" + std::string(edas::to_string(algorithm)) + "_" +
           std::to_string(seed) + ".jsonl");
      std::ofstream trace_out(trace_path);
      if (!trace_out) {
        throw edas::ConfigError("cannot write " + trace_path.string());
      }
      std::vector<double> rewards;
      for (const edas::StepRecord& r : trace) {
        trace_out << step_to_json(r).dump() << "\n";
        rewards.push_back(r.reward_mean);
        unique_wrong_sum += static_cast<double>(r.unique_wrong);
        ++unique_wrong_steps;
      }
      const auto reached = edas::first_step_reaching(trace, batch.threshold);
      steps_to_threshold.push_back(reached ? json(*reached) : json(nullptr));
      const std::vector<double> smoothed =
          edas::exponential_smoothing(rewards, batch.smoothing);
      smoothed_final_sum += smoothed.empty() ? 0.0 : smoothed.back();
    }
    // Median with unreached runs counted at the step budget.
    std::vector<double> for_median;
    for (const json& v : steps_to_threshold) {
      for_median.push_back(v.is_null() ? static_cast<double>(batch.base.steps)
                                       : v.get<double>());
    }
    std::sort(for_median.begin(), for_median.end());
    const std::size_t m = for_median.size();
    const double median = m % 2 == 1
                              ? for_median[m / 2]
                              : 0.5 * (for_median[m / 2 - 1] + for_median[m / 2]);
    summary["variants"][edas::to_string(algorithm)] =
        json{{"seeds", batch.seeds.size()},
             {"steps_to_threshold", steps_to_threshold},
             {"median_steps_to_threshold", median},
             {"mean_unique_wrong",
              unique_wrong_steps == 0
                  ? 0.0
                  : unique_wrong_sum / static_cast<double>(unique_wrong_steps)},
             {"mean_final_reward_smoothed",
              smoothed_final_sum / static_cast<double>(batch.seeds.size())}};
  }
  const std::filesystem::path summary_path =
      std::filesystem::path(options.out_dir) / "summary.json";
  std::ofstream summary_out(summary_path);
  if (!summary_out) {
    throw edas::ConfigError("cannot write " + summary_path.string());
  }
  summary_out << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// passk

struct PasskOptions {
  int n = 0;
  int c = 0;
  std::string k_list;
};

int run_passk(const PasskOptions& options) {
  for (int k : parse_k_list(options.k_list)) {
    json record{{"type", "passk"},
                {"n", options.n},
                {"c", options.c},
                {"k", k},
                {"value", edas::pass_at_k(options.n, options.c, k)}};
    std::cout << record.dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-diversity advantage shaping for group-based RLVR"};
  app.require_subcommand(1);

  ShapeOptions shape_options;
  CLI::App* shape = app.add_subcommand(
      "shape", "Reshape advantages of incorrect rollouts by error diversity");
  shape->add_option("input", shape_options.input,
                    "Input JSONL log ('-' for stdin)");
  shape->add_option("-o,--output", shape_options.output,
                    "Output path ('-' for stdout)");
  shape->add_option("--dropped", shape_options.dropped_output,
                    "Write dropped-group records to this file");
  shape->add_option("--config", shape_options.config_path,
                    "Default-config JSON (also $EDAS_CONFIG)");
  shape->add_option("--alpha", shape_options.shaping.alpha,
                    "Diversity strength (>= 0)");
  shape->add_option("--beta", shape_options.shaping.beta,
                    "Collapse penalty (>= 0)");
  shape->add_option("--kappa", shape_options.shaping.kappa,
                    "Clip margin (> 1)");
  shape->add_option("--epsilon-std", shape_options.shaping.epsilon_std,
                    "Baseline variance guard (> 0)");
  shape->add_option("--domain", shape_options.domain,
                    "math | code | auto (default: auto)");
  shape->add_option("--dynamic-sampling", shape_options.dynamic_sampling,
                    "on | off (default: off)");

  AnalyzeOptions analyze_options;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Pass rates, Pass@k, error diversity, breakthroughs");
  analyze->add_option("input", analyze_options.input,
                      "Input JSONL log ('-' for stdin)");
  analyze->add_option("--before", analyze_options.before,
                      "Earlier snapshot for a breakthrough report");
  analyze->add_option("--after", analyze_options.after,
                      "Later snapshot for a breakthrough report");
  analyze->add_option("-o,--output", analyze_options.output,
                      "Output path ('-' for stdout)");
  analyze->add_option("--k", analyze_options.k_list,
                      "Comma-separated Pass@k values");

  SimulateOptions simulate_options;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Deterministic toy policy-gradient experiments");
  simulate->add_option("--config", simulate_options.config_path,
                       "Experiment config JSON")
      ->required();
  simulate->add_option("--out-dir", simulate_options.out_dir,
                       "Directory for trace files and summary.json")
      ->required();

  PasskOptions passk_options;
  CLI::App* passk =
      app.add_subcommand("passk", "Unbiased Pass@k from n samples, c correct");
  passk->add_option("--n", passk_options.n, "Samples per problem")->required();
  passk->add_option("--c", passk_options.c, "Correct samples")->required();
  passk->add_option("--k", passk_options.k_list, "Comma-separated k values")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (shape->parsed()) return run_shape(shape_options, *shape);
    if (analyze->parsed()) return run_analyze(analyze_options);
    if (simulate->parsed()) return run_simulate(simulate_options);
    if (passk->parsed()) return run_passk(passk_options);
  } catch (const edas::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const edas::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
