#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edas/advantage.hpp"
#include "edas/canonicalize.hpp"
#include "edas/error_partition.hpp"
#include "edas/errors.hpp"
#include "edas/group.hpp"
#include "edas/rng.hpp"

// Deterministic tabular policy-gradient simulator over a finite answer
// vocabulary. One episode is a single categorical decision; correctness is
// decided by a fixed verifier (the task's correct index), which is enough
// to exercise every branch of the shaping pipeline with exact oracles.
//
// Traces are a pure function of (config, task): all randomness flows
// through an explicitly threaded SplitMix64 stream.

namespace edas {

// Finite answer vocabulary with exactly one correct entry. Labels must
// survive canonicalization unchanged so that sampled trajectories can be
// mapped back to vocabulary indices through the standard math-domain
// equivalence function.
struct ToyTask {
  std::vector<std::string> vocabulary;
  std::size_t correct_index = 0;

  void validate() const {
    if (vocabulary.size() < 2) {
      throw ConfigError("task vocabulary needs at least 2 answers");
    }
    if (correct_index >= vocabulary.size()) {
      throw ConfigError("correct_index out of range");
    }
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
      const ErrorLabel canonical = canonicalize_answer(vocabulary[i]);
      if (canonical.value != vocabulary[i]) {
        throw ConfigError("vocabulary entry '" + vocabulary[i] +
                          "' is not canonicalization-stable");
      }
      for (std::size_t j = i + 1; j < vocabulary.size(); ++j) {
        if (vocabulary[i] == vocabulary[j]) {
          throw ConfigError("vocabulary entries must be distinct");
        }
      }
    }
  }
};

struct SoftmaxPolicy {
  std::vector<double> logits;

  std::vector<double> probabilities() const {
    double max_logit = logits.front();
    for (double l : logits) max_logit = std::max(max_logit, l);
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      p[i] = std::exp(logits[i] - max_logit);
      z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
  }

  // Full categorical entropy -sum p ln p of the single decision.
  double entropy() const {
    double h = 0.0;
    for (double p : probabilities()) {
      if (p > 0.0) h -= p * std::log(p);
    }
    return h;
  }
};

enum class Algorithm {
  grpo,
  grpo_edas,
  dapo_filter,
  dapo_filter_edas,
  pkpo,
  entropy_adv,
};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::grpo: return "grpo";
    case Algorithm::grpo_edas: return "grpo+edas";
    case Algorithm::dapo_filter: return "dapo-filter";
    case Algorithm::dapo_filter_edas: return "dapo-filter+edas";
    case Algorithm::pkpo: return "pkpo";
    case Algorithm::entropy_adv: return "entropy-adv";
  }
  return "?";
}

inline constexpr std::string_view kAlgorithmNames =
    "grpo, grpo+edas, dapo-filter, dapo-filter+edas, pkpo, entropy-adv";

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a :
       {Algorithm::grpo, Algorithm::grpo_edas, Algorithm::dapo_filter,
        Algorithm::dapo_filter_edas, Algorithm::pkpo, Algorithm::entropy_adv}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

inline bool uses_dynamic_sampling(Algorithm a) {
  return a == Algorithm::dapo_filter || a == Algorithm::dapo_filter_edas;
}

inline bool uses_shaping(Algorithm a) {
  return a == Algorithm::grpo_edas || a == Algorithm::dapo_filter_edas;
}

struct SimConfig {
  std::size_t group_size = 10;
  double learning_rate = 0.05;
  std::size_t steps = 1000;
  Algorithm algorithm = Algorithm::grpo;
  ShapingConfig shaping{};
  std::uint64_t seed = 0;
  std::size_t resample_retries = 16;  // dynamic-sampling retry cap per step
  int pkpo_k = 8;

  void validate() const {
    if (group_size < 2) throw ConfigError("group_size must be >= 2");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (algorithm == Algorithm::pkpo &&
        (pkpo_k < 1 || pkpo_k > static_cast<int>(group_size))) {
      throw ConfigError("pkpo_k must satisfy 1 <= k <= group_size");
    }
    shaping.validate();
  }
};

struct StepRecord {
  std::size_t step = 0;
  double prob_correct = 0.0;  // at sampling time
  double reward_mean = 0.0;   // raw binary rewards
  std::size_t unique_wrong = 0;  // distinct wrong labels in the group (K)
  Branch branch = Branch::insufficient;
  bool diverse = false;  // K > 1
  double delta_sum_post_clip = 0.0;
  bool skipped = false;  // dropped by dynamic sampling after the retry cap
};

using Trace = std::vector<StepRecord>;

// n categorical draws; each trajectory carries its sampled answer as boxed
// raw text so the math-domain equivalence function applies end to end.
inline RolloutGroup sample_group(const SoftmaxPolicy& policy,
                                 const ToyTask& task, std::size_t n,
                                 SplitMix64& rng) {
  const std::vector<double> probs = policy.probabilities();
  RolloutGroup group;
  group.prompt_id = "toy";
  group.trajectories.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t draw = rng.categorical(probs);
    Trajectory t;
    t.id = "t" + std::to_string(i);
    t.payload = MathOutput{"\\boxed{" + task.vocabulary[draw] + "}"};
    t.correct = (draw == task.correct_index);
    group.trajectories.push_back(std::move(t));
  }
  return validate_group(std::move(group));
}

namespace detail {

// Recovers the vocabulary index of a trajectory from its boxed answer.
inline std::size_t action_of(const Trajectory& t, const ToyTask& task) {
  const ErrorLabel label =
      canonicalize_math_answer(std::get<MathOutput>(t.payload).raw_text);
  for (std::size_t v = 0; v < task.vocabulary.size(); ++v) {
    if (task.vocabulary[v] == label.value) return v;
  }
  throw Error("trajectory label '" + label.value + "' not in vocabulary");
}

}  // namespace detail

// Score-function update: logits += lr * sum_i A^final_i * grad log pi(a_i),
// with grad_j log pi(a) = 1[j == a] - p_j in closed form. Probabilities are
// taken from the pre-update policy for every trajectory in the group.
inline SoftmaxPolicy policy_gradient_step(const SoftmaxPolicy& policy,
                                          const ShapedGroup& shaped,
                                          double learning_rate,
                                          const ToyTask& task) {
  const std::vector<double> probs = policy.probabilities();
  std::vector<double> gradient(policy.logits.size(), 0.0);
  for (std::size_t i = 0; i < shaped.group.size(); ++i) {
    const double advantage = shaped.final_advantages[i];
    if (advantage == 0.0) continue;
    const std::size_t action =
        detail::action_of(shaped.group.trajectories[i], task);
    for (std::size_t j = 0; j < gradient.size(); ++j) {
      gradient[j] += advantage * ((j == action ? 1.0 : 0.0) - probs[j]);
    }
  }
  SoftmaxPolicy next = policy;
  for (std::size_t j = 0; j < next.logits.size(); ++j) {
    next.logits[j] += learning_rate * gradient[j];
  }
  return next;
}

// Runs one experiment and returns the per-step trace.
inline Trace run_experiment(const SimConfig& config, const ToyTask& task,
                            const SoftmaxPolicy& initial_policy) {
  config.validate();
  task.validate();
  if (initial_policy.logits.size() != task.vocabulary.size()) {
    throw ConfigError("policy size does not match vocabulary size");
  }

  SplitMix64 rng(config.seed);
  SoftmaxPolicy policy = initial_policy;
  Trace trace;
  trace.reserve(config.steps);

  for (std::size_t step = 0; step < config.steps; ++step) {
    StepRecord record;
    record.step = step;
    record.prob_correct = policy.probabilities()[task.correct_index];

    RolloutGroup group = sample_group(policy, task, config.group_size, rng);
    if (uses_dynamic_sampling(config.algorithm)) {
      std::size_t attempts = 0;
      while ((group.num_incorrect() == 0 ||
              group.num_incorrect() == group.size()) &&
             attempts < config.resample_retries) {
        group = sample_group(policy, task, config.group_size, rng);
        ++attempts;
      }
      if (group.num_incorrect() == 0 ||
          group.num_incorrect() == group.size()) {
        record.skipped = true;
      }
    }

    std::vector<int> rewards(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) {
      rewards[i] = group.trajectories[i].correct ? 1 : 0;
      record.reward_mean += rewards[i];
    }
    record.reward_mean /= static_cast<double>(group.size());

    std::vector<double> baseline;
    if (config.algorithm == Algorithm::pkpo) {
      const std::vector<double> transformed =
          pkpo_rewards(rewards, config.pkpo_k);
      baseline = group_normalize(transformed, config.shaping.epsilon_std);
    } else {
      baseline = grpo_baseline_advantages(rewards, config.shaping.epsilon_std);
    }
    for (std::size_t i = 0; i < group.size(); ++i) {
      group.trajectories[i].baseline_advantage = baseline[i];
    }

    // Group-level error statistics are recorded for every algorithm;
    // only the shaping variants act on them.
    const ErrorPartition partition = partition_errors(group, config.shaping);
    record.unique_wrong = partition.num_classes();
    record.diverse = partition.num_classes() > 1;
    const std::size_t nw = group.num_incorrect();
    record.branch = nw <= 1 ? Branch::insufficient
                    : partition.num_classes() == 1 ? Branch::perseveration
                                                   : Branch::diverse;

    if (record.skipped) {
      trace.push_back(record);
      continue;
    }

    ShapedGroup shaped;
    if (uses_shaping(config.algorithm)) {
      shaped = shape_group(group, config.shaping);
      record.branch = shaped.branch;
      record.delta_sum_post_clip = shaped.delta_sum_post_clip();
    } else {
      shaped.group = std::move(group);
      shaped.final_advantages = std::move(baseline);
      if (config.algorithm == Algorithm::entropy_adv) {
        const std::vector<double> entropies(shaped.group.size(),
                                            policy.entropy());
        shaped.final_advantages = entropy_advantage_reshape(
            shaped.final_advantages, entropies, config.shaping.alpha,
            config.shaping.kappa);
      }
    }

    policy = policy_gradient_step(policy, shaped, config.learning_rate, task);
    trace.push_back(record);
  }
  return trace;
}

// Uniform initial policy.
inline Trace run_experiment(const SimConfig& config, const ToyTask& task) {
  SoftmaxPolicy policy;
  policy.logits.assign(task.vocabulary.size(), 0.0);
  return run_experiment(config, task, policy);
}

// Convenience: initial policy from explicit probabilities (logits = ln p).
inline SoftmaxPolicy policy_from_probabilities(
    const std::vector<double>& probabilities) {
  SoftmaxPolicy policy;
  policy.logits.reserve(probabilities.size());
  for (double p : probabilities) {
    if (!(p > 0.0)) throw ConfigError("initial probabilities must be > 0");
    policy.logits.push_back(std::log(p));
  }
  return policy;
}

// First step whose sampling-time P(correct) reaches the threshold.
inline std::optional<std::size_t> first_step_reaching(const Trace& trace,
                                                      double threshold) {
  for (const StepRecord& r : trace) {
    if (r.prob_correct >= threshold) return r.step;
  }
  return std::nullopt;
}

// s[0] = x[0]; s[t] = factor * x[t] + (1 - factor) * s[t-1].
inline std::vector<double> exponential_smoothing(std::span<const double> xs,
                                                 double factor) {
  std::vector<double> out;
  out.reserve(xs.size());
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s = i == 0 ? xs[0] : factor * xs[i] + (1.0 - factor) * s;
    out.push_back(s);
  }
  return out;
}

}  // namespace edas
