#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "edas/binomial.hpp"
#include "edas/error_partition.hpp"
#include "edas/errors.hpp"
#include "edas/group.hpp"

// Group-relative baseline advantages, the error-diversity redistribution
// of penalties over incorrect trajectories, monotonicity-preserving
// clipping, and the two comparison baselines (surviving-at-k reward
// transform and entropy-augmented advantages).
//
// Everything here is pure and deterministic; groups may be shaped in
// parallel and results are bit-identical regardless of scheduling.

namespace edas {

// (x - mean) / (population std + epsilon), elementwise.
inline std::vector<double> group_normalize(std::span<const double> values,
                                           double epsilon_std) {
  const std::size_t n = values.size();
  if (n == 0) throw EmptyGroupError("cannot normalize an empty reward list");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double denom = std::sqrt(var) + epsilon_std;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (values[i] - mean) / denom;
  return out;
}

// Group-relative baseline estimator over binary rewards. Incorrect
// trajectories get A < 0 whenever at least one trajectory is correct;
// zero-variance groups normalize to all zeros thanks to the epsilon guard.
inline std::vector<double> grpo_baseline_advantages(
    std::span<const int> rewards, double epsilon_std) {
  std::vector<double> values(rewards.begin(), rewards.end());
  return group_normalize(values, epsilon_std);
}

struct FilterResult {
  std::vector<RolloutGroup> kept;
  std::vector<RolloutGroup> dropped;
};

// Dynamic-sampling filter: keeps only groups with at least one correct and
// at least one incorrect trajectory. No re-sampling happens here; that is
// the trainer's responsibility.
inline FilterResult dynamic_sampling_filter(std::vector<RolloutGroup> groups) {
  FilterResult result;
  for (auto& g : groups) {
    const std::size_t nw = g.num_incorrect();
    if (nw == 0 || nw == g.size()) {
      result.dropped.push_back(std::move(g));
    } else {
      result.kept.push_back(std::move(g));
    }
  }
  return result;
}

// S: mean absolute baseline advantage over the incorrect subset.
inline double dynamic_scale(const RolloutGroup& group) {
  if (group.incorrect_set.empty()) {
    throw EmptyIncorrectSetError("dynamic scale requires N_w >= 1");
  }
  double sum = 0.0;
  for (std::size_t i : group.incorrect_set) {
    sum += std::abs(group.trajectories[i].baseline_advantage);
  }
  return sum / static_cast<double>(group.incorrect_set.size());
}

struct EdasResult {
  Branch branch = Branch::insufficient;
  std::vector<AdjustmentRecord> adjustments;  // aligned with incorrect_set
  GroupStatistics stats;
};

// Advantage redistribution over W, as a piecewise function of (N_w, K):
//   N_w <= 1          -> no adjustment (insufficient statistics)
//   N_w > 1 && K == 1 -> uniform collapse penalty -beta * S
//   K > 1             -> alpha * S * T_i with T_i = (I_i - H) / ln N_w
// T_i is bounded in [-1, 1] and sums to zero over W, so the diverse branch
// redistributes penalties without moving their mean.
inline EdasResult edas_adjustments(const ErrorPartition& partition,
                                   const RolloutGroup& group,
                                   const ShapingConfig& config) {
  config.validate();
  EdasResult result;
  const std::size_t nw = group.incorrect_set.size();
  result.stats.nw = nw;
  result.stats.k = partition.num_classes();
  if (nw >= 1) result.stats.scale = dynamic_scale(group);

  if (nw <= 1) {
    result.branch = Branch::insufficient;
    for (std::size_t i : group.incorrect_set) {
      AdjustmentRecord rec;
      rec.index = i;
      result.adjustments.push_back(std::move(rec));
    }
    return result;
  }

  const std::size_t k = partition.num_classes();
  const double scale = result.stats.scale;
  if (k == 1) {
    result.branch = Branch::perseveration;
    const double delta = -config.beta * scale;
    for (std::size_t i : group.incorrect_set) {
      AdjustmentRecord rec;
      rec.index = i;
      rec.delta_raw = delta;
      rec.delta_applied = delta;
      result.adjustments.push_back(std::move(rec));
    }
    return result;
  }

  result.branch = Branch::diverse;
  double entropy = 0.0;
  for (double p : partition.probabilities) entropy -= p * std::log(p);
  result.stats.entropy = entropy;

  // Self-information per trajectory, via its class.
  std::vector<AdjustmentRecord> by_index;
  const double log_nw = std::log(static_cast<double>(nw));
  for (std::size_t c = 0; c < k; ++c) {
    const double info = -std::log(partition.probabilities[c]);
    const double surprisal = (info - entropy) / log_nw;
    const double delta = config.alpha * scale * surprisal;
    for (std::size_t i : partition.classes[c]) {
      AdjustmentRecord rec;
      rec.index = i;
      rec.self_information = info;
      rec.surprisal = surprisal;
      rec.delta_raw = delta;
      rec.delta_applied = delta;
      by_index.push_back(std::move(rec));
    }
  }
  // Restore W's index order so records stay aligned with incorrect_set.
  std::sort(by_index.begin(), by_index.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  result.adjustments = std::move(by_index);
  return result;
}

namespace detail {
inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }
}  // namespace detail

// A^final_i = A^orig_i + sgn(Delta_i) * min(|Delta_i|, |A^orig_i| / kappa)
// for i in W; correct trajectories pass through untouched. With kappa > 1
// a negative baseline can never flip sign.
inline ShapedGroup clip_and_finalize(RolloutGroup group,
                                     EdasResult adjustments,
                                     const ShapingConfig& config) {
  config.validate();
  ShapedGroup shaped;
  shaped.branch = adjustments.branch;
  shaped.stats = adjustments.stats;
  shaped.final_advantages.reserve(group.size());
  shaped.clip_hits.assign(group.size(), false);
  for (const Trajectory& t : group.trajectories) {
    shaped.final_advantages.push_back(t.baseline_advantage);
  }
  for (AdjustmentRecord& adj : adjustments.adjustments) {
    const double orig = group.trajectories[adj.index].baseline_advantage;
    const int sign = detail::sign_of(adj.delta_raw);
    if (sign == 0) {
      adj.delta_applied = 0.0;
      continue;  // leave the baseline bit-exactly untouched
    }
    const double bound = std::abs(orig) / config.kappa;
    const double magnitude = std::min(std::abs(adj.delta_raw), bound);
    adj.clipped = magnitude < std::abs(adj.delta_raw);
    adj.delta_applied = sign * magnitude;
    shaped.clip_hits[adj.index] = adj.clipped;
    shaped.final_advantages[adj.index] = orig + adj.delta_applied;
  }
  shaped.adjustments = std::move(adjustments.adjustments);
  shaped.group = std::move(group);
  return shaped;
}

// Full pipeline for one group: partition the incorrect subset, compute the
// redistribution, clip, and attach audit records.
inline ShapedGroup shape_group(const RolloutGroup& group,
                               const ShapingConfig& config) {
  RolloutGroup validated = validate_group(group);
  const ErrorPartition partition = partition_errors(validated, config);
  EdasResult adjustments = edas_adjustments(partition, validated, config);
  return clip_and_finalize(std::move(validated), std::move(adjustments),
                           config);
}

// Surviving-at-k reward transform over binary rewards: a correct response
// is worth k/n; an incorrect one is worth (k/n) * rho(n-1, c, k-1) where
// rho(n, c, k) = 1 - C(n-c, k) / C(n, k). Binomials are exact integers, so
// each reward needs a single floating division.
inline std::vector<double> pkpo_rewards(std::span<const int> rewards, int k) {
  const int n = static_cast<int>(rewards.size());
  if (k < 1 || k > n) {
    throw InvalidKError("k must satisfy 1 <= k <= n (got k=" +
                        std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  int c = 0;
  for (int r : rewards) c += (r != 0);

  const double correct_reward =
      static_cast<double>(k) / static_cast<double>(n);
  // When c == n there are no incorrect rewards to assign; skip the
  // computation so n - 1 - c never underflows.
  double incorrect_reward = 0.0;
  if (k >= 2 && c < n) {
    const std::uint64_t total = binomial(n - 1, k - 1);
    const std::uint64_t all_incorrect =
        binomial(static_cast<std::uint64_t>(n - 1 - c), k - 1);
    incorrect_reward = correct_reward *
                       (static_cast<double>(total - all_incorrect) /
                        static_cast<double>(total));
  }
  std::vector<double> out(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out[i] = rewards[i] != 0 ? correct_reward : incorrect_reward;
  }
  return out;
}

// Entropy-augmented advantage baseline: A + min(alpha * H, |A| / kappa),
// elementwise. Entropies are treated as constants; nothing is ever
// differentiated through them.
inline std::vector<double> entropy_advantage_reshape(
    std::span<const double> advantages, std::span<const double> entropies,
    double alpha, double kappa) {
  if (advantages.size() != entropies.size()) {
    throw ConfigError("advantages and entropies must be index-aligned");
  }
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(kappa > 1.0)) throw ConfigError("kappa must be > 1");
  std::vector<double> out(advantages.size());
  for (std::size_t i = 0; i < advantages.size(); ++i) {
    if (!(entropies[i] >= 0.0)) {
      throw ConfigError("policy entropies must be >= 0");
    }
    const double bonus =
        std::min(alpha * entropies[i], std::abs(advantages[i]) / kappa);
    out[i] = advantages[i] + bonus;
  }
  return out;
}

}  // namespace edas
