#pragma once

#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "edas/advantage.hpp"
#include "edas/errors.hpp"
#include "edas/group.hpp"

// Newline-delimited JSON rollout logs: one trajectory per line, groups
// assembled by prompt_id. Reals are serialized in shortest round-trip
// decimal form, so re-ingesting an emitted stream reproduces values
// bit-exactly.
//
// Line schema (unknown fields are ignored):
//   math: {"prompt_id", "trajectory_id", "domain": "math", "raw_text",
//          "correct", "baseline_advantage"?}
//   code: {"prompt_id", "trajectory_id", "domain": "code", "phase",
//          "exception_name"?, "tests_passed", "correct",
//          "baseline_advantage"?}

namespace edas {

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct IngestOptions {
  // Collect per-line errors and keep going instead of throwing on the
  // first malformed record.
  bool collect_errors = false;
  // Guard for the baseline estimator when advantages must be derived.
  double epsilon_std = 1e-8;
};

struct IngestResult {
  std::vector<RolloutGroup> groups;     // in first-appearance order
  std::vector<bool> advantage_derived;  // aligned with groups
  std::vector<LineError> errors;        // only populated in collect mode

  bool ok() const { return errors.empty(); }
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& record,
                                           const char* name) {
  auto it = record.find(name);
  if (it == record.end()) {
    throw Error(std::string("missing required field '") + name + "'");
  }
  return *it;
}

inline std::string require_string(const nlohmann::json& record,
                                  const char* name) {
  const auto& v = require_field(record, name);
  if (!v.is_string()) {
    throw Error(std::string("field '") + name + "' must be a string");
  }
  return v.get<std::string>();
}

inline bool require_bool(const nlohmann::json& record, const char* name) {
  const auto& v = require_field(record, name);
  if (!v.is_boolean()) {
    throw Error(std::string("field '") + name + "' must be a boolean");
  }
  return v.get<bool>();
}

struct ParsedRecord {
  std::string prompt_id;
  Trajectory trajectory;
  std::optional<double> baseline_advantage;
};

inline ParsedRecord parse_record(const nlohmann::json& record) {
  if (!record.is_object()) throw Error("record must be a JSON object");
  ParsedRecord out;
  out.prompt_id = require_string(record, "prompt_id");
  out.trajectory.id = require_string(record, "trajectory_id");
  out.trajectory.correct = require_bool(record, "correct");

  const std::string domain = require_string(record, "domain");
  if (domain == "math") {
    out.trajectory.payload = MathOutput{require_string(record, "raw_text")};
  } else if (domain == "code") {
    ExecutionRecord exec;
    const std::string phase = require_string(record, "phase");
    if (phase == "compile") {
      exec.phase = ExecutionRecord::Phase::compile;
    } else if (phase == "run") {
      exec.phase = ExecutionRecord::Phase::run;
    } else {
      throw Error("field 'phase' must be 'compile' or 'run'");
    }
    if (auto it = record.find("exception_name");
        it != record.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw Error("field 'exception_name' must be a string");
      }
      exec.exception_name = it->get<std::string>();
    }
    exec.tests_passed = require_bool(record, "tests_passed");
    exec.validate();
    out.trajectory.payload = exec;
  } else {
    throw Error("field 'domain' must be 'math' or 'code'");
  }

  if (auto it = record.find("baseline_advantage");
      it != record.end() && !it->is_null()) {
    if (!it->is_number()) {
      throw Error("field 'baseline_advantage' must be a number");
    }
    out.baseline_advantage = it->get<double>();
    out.trajectory.baseline_advantage = *out.baseline_advantage;
  }
  return out;
}

}  // namespace detail

inline IngestResult ingest(std::istream& in, const IngestOptions& options = {}) {
  struct PendingGroup {
    RolloutGroup group;
    std::size_t first_line = 0;
    std::size_t with_advantage = 0;
  };
  std::vector<PendingGroup> pending;
  std::unordered_map<std::string, std::size_t> group_index;

  IngestResult result;
  auto fail = [&](std::size_t line, const std::string& message) {
    if (!options.collect_errors) throw ParseError(line, message);
    result.errors.push_back({line, message});
  };

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(line_number, std::string("invalid JSON: ") + e.what());
      continue;
    }
    // Report records other than trajectories (group summaries, dropped-group
    // markers) may be interleaved in shaped output; skip them on re-ingest.
    if (record.is_object()) {
      if (auto it = record.find("type");
          it != record.end() && it->is_string() &&
          it->get<std::string>() != "trajectory") {
        continue;
      }
    }
    detail::ParsedRecord parsed;
    try {
      parsed = detail::parse_record(record);
    } catch (const Error& e) {
      fail(line_number, e.what());
      continue;
    }

    auto [it, inserted] =
        group_index.try_emplace(parsed.prompt_id, pending.size());
    if (inserted) {
      pending.push_back({});
      pending.back().group.prompt_id = parsed.prompt_id;
      pending.back().first_line = line_number;
    }
    PendingGroup& entry = pending[it->second];
    if (!entry.group.trajectories.empty() &&
        payload_domain(entry.group.trajectories.front().payload) !=
            payload_domain(parsed.trajectory.payload)) {
      fail(line_number, "mixed domains under prompt_id '" + parsed.prompt_id +
                            "' (inconsistent group)");
      continue;
    }
    entry.with_advantage += parsed.baseline_advantage.has_value();
    entry.group.trajectories.push_back(std::move(parsed.trajectory));
  }

  for (PendingGroup& entry : pending) {
    if (entry.group.trajectories.empty()) continue;
    const bool derived =
        entry.with_advantage != entry.group.trajectories.size();
    if (derived) {
      std::vector<int> rewards;
      rewards.reserve(entry.group.trajectories.size());
      for (const Trajectory& t : entry.group.trajectories) {
        rewards.push_back(t.correct ? 1 : 0);
      }
      const std::vector<double> advantages =
          grpo_baseline_advantages(rewards, options.epsilon_std);
      for (std::size_t i = 0; i < advantages.size(); ++i) {
        entry.group.trajectories[i].baseline_advantage = advantages[i];
      }
    }
    try {
      result.groups.push_back(validate_group(std::move(entry.group)));
      result.advantage_derived.push_back(derived);
    } catch (const Error& e) {
      fail(entry.first_line, e.what());
    }
  }
  return result;
}

// Serializes one trajectory back to the wire schema. The emitted object
// can be extended with additional report fields; ingest ignores them.
inline nlohmann::json trajectory_record(const std::string& prompt_id,
                                        const Trajectory& trajectory) {
  nlohmann::json record{
      {"prompt_id", prompt_id},
      {"trajectory_id", trajectory.id},
      {"correct", trajectory.correct},
      {"baseline_advantage", trajectory.baseline_advantage},
  };
  if (const auto* math = std::get_if<MathOutput>(&trajectory.payload)) {
    record["domain"] = "math";
    record["raw_text"] = math->raw_text;
  } else {
    const auto& exec = std::get<ExecutionRecord>(trajectory.payload);
    record["domain"] = "code";
    record["phase"] =
        exec.phase == ExecutionRecord::Phase::compile ? "compile" : "run";
    if (exec.exception_name) record["exception_name"] = *exec.exception_name;
    record["tests_passed"] = exec.tests_passed;
  }
  return record;
}

}  // namespace edas
