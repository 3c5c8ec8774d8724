#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edas/errors.hpp"

// Shared data model for rollout groups, advantages, and shaping
// configuration. All types are plain value objects; once a group has been
// through validate_group() it is treated as immutable and may be shared
// freely between workers.

namespace edas {

enum class Domain { math, code };

inline const char* to_string(Domain d) {
  return d == Domain::math ? "math" : "code";
}

// Outcome of compiling/running one generated program against its tests.
// A record is terminal: either compilation failed (compile phase with an
// exception), or the program ran and we know whether the tests passed.
struct ExecutionRecord {
  enum class Phase { compile, run };

  Phase phase = Phase::run;
  std::optional<std::string> exception_name;
  bool tests_passed = false;

  // tests_passed implies no exception was raised.
  void validate() const {
    if (tests_passed && exception_name.has_value()) {
      throw InconsistentRecordError(
          "execution record passed tests but carries exception '" +
          *exception_name + "'");
    }
    if (phase == Phase::compile && !exception_name.has_value()) {
      throw InconsistentRecordError(
          "compile-phase record requires an exception_name");
    }
  }
};

// Raw trajectory text for the math domain; the final answer is expected
// inside a \boxed{} environment somewhere in the text.
struct MathOutput {
  std::string raw_text;
};

using Payload = std::variant<MathOutput, ExecutionRecord>;

inline Domain payload_domain(const Payload& p) {
  return std::holds_alternative<MathOutput>(p) ? Domain::math : Domain::code;
}

// One sampled rollout: outcome-level record only, no token content or
// log-probabilities.
struct Trajectory {
  std::string id;
  Payload payload;
  bool correct = false;
  double baseline_advantage = 0.0;  // A^orig
};

// N trajectories sampled for one prompt. incorrect_set (W) is derived by
// validate_group and is index-aligned with `trajectories`.
struct RolloutGroup {
  std::string prompt_id;
  std::vector<Trajectory> trajectories;
  std::vector<std::size_t> incorrect_set;

  std::size_t size() const { return trajectories.size(); }
  std::size_t num_incorrect() const { return incorrect_set.size(); }  // N_w
};

// Derives W = {i : not correct} and checks structural invariants.
// Idempotent: validating a validated group returns it unchanged.
inline RolloutGroup validate_group(RolloutGroup group) {
  if (group.trajectories.empty()) {
    throw EmptyGroupError("group '" + group.prompt_id +
                          "' has no trajectories");
  }
  const Domain domain = payload_domain(group.trajectories.front().payload);
  group.incorrect_set.clear();
  for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
    const Trajectory& t = group.trajectories[i];
    if (!std::isfinite(t.baseline_advantage)) {
      throw NonFiniteAdvantageError("trajectory '" + t.id + "' in group '" +
                                    group.prompt_id +
                                    "' has non-finite baseline advantage");
    }
    if (payload_domain(t.payload) != domain) {
      throw MixedPayloadError("group '" + group.prompt_id +
                              "' mixes math and code payloads");
    }
    if (std::holds_alternative<ExecutionRecord>(t.payload)) {
      std::get<ExecutionRecord>(t.payload).validate();
    }
    if (!t.correct) group.incorrect_set.push_back(i);
  }
  return group;
}

inline Domain group_domain(const RolloutGroup& group) {
  if (group.trajectories.empty()) {
    throw EmptyGroupError("group '" + group.prompt_id +
                          "' has no trajectories");
  }
  return payload_domain(group.trajectories.front().payload);
}

// Canonical error label: equality is exact string equality; all
// canonicalization happens upstream, never at comparison time.
struct ErrorLabel {
  std::string value;

  ErrorLabel() = default;
  explicit ErrorLabel(std::string v) : value(std::move(v)) {
    if (value.empty()) throw Error("error label must be non-empty");
  }

  friend bool operator==(const ErrorLabel&, const ErrorLabel&) = default;
  friend auto operator<=>(const ErrorLabel&, const ErrorLabel&) = default;
};

// The K disjoint equivalence classes over W. Classes are ordered by first
// occurrence within the group, so the partition of a given group is
// deterministic; class membership itself depends only on labels.
struct ErrorPartition {
  std::vector<std::vector<std::size_t>> classes;  // C_1..C_K, indices into W's group
  std::vector<double> probabilities;              // p_k = |C_k| / N_w
  std::vector<ErrorLabel> labels;                 // label of each class

  std::size_t num_classes() const { return classes.size(); }  // K
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& c : classes) n += c.size();
    return n;  // N_w
  }
};

// Hyperparameters of the shaping pipeline. alpha/beta of zero disable the
// corresponding branch, which keeps the pipeline bit-exactly neutral.
struct ShapingConfig {
  double alpha = 0.4;   // diversity strength
  double beta = 0.2;    // collapse penalty
  double kappa = 2.0;   // clip margin, > 1
  Domain domain = Domain::math;
  double epsilon_std = 1e-8;  // baseline degenerate-variance guard

  void validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw ConfigError("alpha must be finite and >= 0");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
      throw ConfigError("beta must be finite and >= 0");
    }
    if (!(kappa > 1.0) || !std::isfinite(kappa)) {
      throw ConfigError("kappa must be finite and > 1");
    }
    if (!(epsilon_std > 0.0) || !std::isfinite(epsilon_std)) {
      throw ConfigError("epsilon_std must be finite and > 0");
    }
  }
};

enum class Branch { insufficient, perseveration, diverse };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::insufficient: return "insufficient";
    case Branch::perseveration: return "perseveration";
    case Branch::diverse: return "diverse";
  }
  return "?";
}

// Per-trajectory audit record for one i in W.
struct AdjustmentRecord {
  std::size_t index = 0;             // trajectory index within the group
  double self_information = 0.0;     // I_i = -ln p_k
  std::optional<double> surprisal;   // T_i, diverse branch only; in [-1, 1]
  double delta_raw = 0.0;            // Delta_i before clipping
  double delta_applied = 0.0;        // Delta after clipping
  bool clipped = false;
};

struct GroupStatistics {
  double scale = 0.0;    // S, mean |A^orig| over W
  double entropy = 0.0;  // H, Shannon entropy of the error distribution
  std::size_t nw = 0;
  std::size_t k = 0;
};

// Result of the full shaping pipeline for one group. Correct trajectories
// pass through untouched; all vectors are index-aligned with the input.
struct ShapedGroup {
  RolloutGroup group;
  GroupStatistics stats;
  Branch branch = Branch::insufficient;
  std::vector<AdjustmentRecord> adjustments;  // aligned with group.incorrect_set
  std::vector<double> final_advantages;       // length N
  std::vector<bool> clip_hits;                // length N, false outside W

  // Post-clip sum of applied adjustments over W. Zero-sum holds exactly
  // only pre-clip; this is reported as a diagnostic, not asserted.
  double delta_sum_post_clip() const {
    double s = 0.0;
    for (const auto& a : adjustments) s += a.delta_applied;
    return s;
  }
};

}  // namespace edas

template <>
struct std::hash<edas::ErrorLabel> {
  std::size_t operator()(const edas::ErrorLabel& l) const noexcept {
    return std::hash<std::string>{}(l.value);
  }
};
