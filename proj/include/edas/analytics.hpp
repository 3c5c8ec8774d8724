#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "edas/binomial.hpp"
#include "edas/errors.hpp"
#include "edas/group.hpp"

// Measurement toolkit: unbiased Pass@k estimation, error-diversity ratios,
// diverse-group counting, and before/after breakthrough reports.

namespace edas {

// Repeated-rollout outcome for one problem: n attempts, c correct, and the
// multiset of error labels over the n - c incorrect attempts.
struct ProblemOutcome {
  std::string problem_id;
  int n = 0;
  int c = 0;
  std::vector<ErrorLabel> wrong_labels;

  double apr() const { return static_cast<double>(c) / n; }

  void validate() const {
    if (n < 1 || c < 0 || c > n) {
      throw Error("problem '" + problem_id + "': need 0 <= c <= n, n >= 1");
    }
    if (wrong_labels.size() != static_cast<std::size_t>(n - c)) {
      throw Error("problem '" + problem_id +
                  "': wrong_labels must have n - c entries");
    }
  }
};

// Unbiased Pass@k from n samples with c correct:
//   Pass@k = 1 - C(n-c, k) / C(n, k)
// computed as an exact integer ratio, so it agrees bit-for-bit with
// exhaustive subset enumeration.
inline double pass_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n) {
    throw Error("pass_at_k: need 0 <= c <= n, n >= 1");
  }
  if (k < 1 || k > n) {
    throw InvalidKError("pass_at_k: need 1 <= k <= n (got k=" +
                        std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  const std::uint64_t total = binomial(n, k);
  const std::uint64_t all_incorrect = binomial(n - c, k);
  return static_cast<double>(total - all_incorrect) /
         static_cast<double>(total);
}

// Ratio of distinct error labels to the number of incorrect attempts;
// in [1/(n-c), 1] whenever there is at least one error.
inline double error_diversity(const ProblemOutcome& outcome) {
  outcome.validate();
  if (outcome.c == outcome.n) {
    throw NoErrorsError("problem '" + outcome.problem_id +
                        "' has no incorrect rollouts");
  }
  std::unordered_set<ErrorLabel> distinct(outcome.wrong_labels.begin(),
                                          outcome.wrong_labels.end());
  return static_cast<double>(distinct.size()) /
         static_cast<double>(outcome.n - outcome.c);
}

// Number of groups with healthy error diversity (K > 1).
inline std::size_t diverse_group_count(std::span<const ErrorPartition> batch) {
  std::size_t count = 0;
  for (const auto& p : batch) count += (p.num_classes() > 1);
  return count;
}

struct QuartileSummary {
  std::vector<std::string> problem_ids;
  double min_diversity = 0.0;
  double max_diversity = 0.0;
  double improvement_rate = 0.0;  // fraction with APR_after > APR_before
};

struct BreakthroughReport {
  std::size_t problems = 0;
  std::size_t hard_count = 0;          // APR_before == 0
  std::size_t breakthrough_count = 0;  // hard and APR_after > 0
  std::vector<std::string> hard_ids;
  std::vector<std::string> breakthrough_ids;
  double breakthrough_rate = 0.0;      // over the hard set
  double improvement_rate = 0.0;       // over all joined problems
  // Error-prone problems (APR_before < 1) and the hard subset, each split
  // into four near-equal quartiles by ascending error diversity; ties and
  // remainders resolved in stable problem-id order.
  std::vector<QuartileSummary> error_prone_quartiles;
  std::vector<QuartileSummary> hard_quartiles;
};

namespace detail {

struct JoinedProblem {
  const ProblemOutcome* before;
  const ProblemOutcome* after;
  double diversity;  // of the "before" snapshot; meaningful when c < n
};

inline std::vector<QuartileSummary> diversity_quartiles(
    std::vector<const JoinedProblem*> cohort) {
  std::sort(cohort.begin(), cohort.end(), [](const auto* a, const auto* b) {
    if (a->diversity != b->diversity) return a->diversity < b->diversity;
    return a->before->problem_id < b->before->problem_id;
  });
  std::vector<QuartileSummary> quartiles(4);
  const std::size_t m = cohort.size();
  std::size_t offset = 0;
  for (std::size_t q = 0; q < 4; ++q) {
    const std::size_t size = m / 4 + (q < m % 4 ? 1 : 0);
    QuartileSummary& summary = quartiles[q];
    std::size_t improved = 0;
    for (std::size_t j = offset; j < offset + size; ++j) {
      const JoinedProblem& p = *cohort[j];
      summary.problem_ids.push_back(p.before->problem_id);
      improved += (p.after->apr() > p.before->apr());
    }
    if (size > 0) {
      summary.min_diversity = cohort[offset]->diversity;
      summary.max_diversity = cohort[offset + size - 1]->diversity;
      summary.improvement_rate =
          static_cast<double>(improved) / static_cast<double>(size);
    }
    offset += size;
  }
  return quartiles;
}

}  // namespace detail

// Joins two snapshots on problem_id and reports the hard set (APR = 0
// before), breakthroughs (hard problems with APR > 0 after), overall
// improvement rate, and diversity-quartile improvement rates. Counts are
// invariant under reordering of either input list.
inline BreakthroughReport breakthrough_report(
    std::span<const ProblemOutcome> before,
    std::span<const ProblemOutcome> after) {
  std::map<std::string, const ProblemOutcome*> after_by_id;
  for (const auto& p : after) {
    p.validate();
    if (!after_by_id.emplace(p.problem_id, &p).second) {
      throw Error("duplicate problem_id '" + p.problem_id +
                  "' in after snapshot");
    }
  }
  std::map<std::string, detail::JoinedProblem> joined;
  for (const auto& p : before) {
    p.validate();
    auto it = after_by_id.find(p.problem_id);
    if (it == after_by_id.end()) {
      throw MissingCounterpartError("problem '" + p.problem_id +
                                    "' missing from after snapshot");
    }
    if (!joined.emplace(p.problem_id,
                        detail::JoinedProblem{&p, it->second, 0.0})
             .second) {
      throw Error("duplicate problem_id '" + p.problem_id +
                  "' in before snapshot");
    }
  }
  if (joined.size() != after_by_id.size()) {
    for (const auto& [id, ptr] : after_by_id) {
      if (!joined.contains(id)) {
        throw MissingCounterpartError("problem '" + id +
                                      "' missing from before snapshot");
      }
    }
  }

  BreakthroughReport report;
  report.problems = joined.size();
  std::size_t improved = 0;
  std::vector<const detail::JoinedProblem*> error_prone;
  std::vector<const detail::JoinedProblem*> hard;
  for (auto& [id, p] : joined) {
    improved += (p.after->apr() > p.before->apr());
    if (p.before->c < p.before->n) {
      p.diversity = error_diversity(*p.before);
      error_prone.push_back(&p);
    }
    if (p.before->c == 0) {
      report.hard_ids.push_back(id);
      hard.push_back(&p);
      if (p.after->c > 0) report.breakthrough_ids.push_back(id);
    }
  }
  report.hard_count = report.hard_ids.size();
  report.breakthrough_count = report.breakthrough_ids.size();
  if (report.hard_count > 0) {
    report.breakthrough_rate = static_cast<double>(report.breakthrough_count) /
                               static_cast<double>(report.hard_count);
  }
  if (report.problems > 0) {
    report.improvement_rate =
        static_cast<double>(improved) / static_cast<double>(report.problems);
  }
  report.error_prone_quartiles =
      detail::diversity_quartiles(std::move(error_prone));
  report.hard_quartiles = detail::diversity_quartiles(std::move(hard));
  return report;
}

}  // namespace edas
