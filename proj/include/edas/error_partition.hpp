#pragma once

#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "edas/canonicalize.hpp"
#include "edas/errors.hpp"
#include "edas/group.hpp"

// Domain-specific error equivalence functions and the partition of the
// incorrect subset W into equivalence classes. Two incorrect trajectories
// are co-classified iff their labels are equal.

namespace edas {

inline constexpr std::string_view kWrongAnswerLabel = "WrongAnswer";

// Code-domain equivalence function. Hierarchical: compilation failures are
// labeled by their exception name; trajectories that ran but failed tests
// without raising are "WrongAnswer"; runtime exceptions keep their name.
inline ErrorLabel label_code_error(const ExecutionRecord& record) {
  record.validate();
  if (record.tests_passed) {
    throw InconsistentRecordError(
        "record passed its tests but was labeled as an error");
  }
  if (record.exception_name.has_value()) {
    return ErrorLabel(*record.exception_name);
  }
  return ErrorLabel(std::string(kWrongAnswerLabel));
}

// Applies the configured domain's equivalence function to one trajectory.
inline ErrorLabel error_label(const Trajectory& trajectory, Domain domain) {
  if (payload_domain(trajectory.payload) != domain) {
    throw DomainMismatchError("trajectory '" + trajectory.id +
                              "' payload does not match domain '" +
                              to_string(domain) + "'");
  }
  if (domain == Domain::math) {
    return canonicalize_math_answer(
        std::get<MathOutput>(trajectory.payload).raw_text);
  }
  return label_code_error(std::get<ExecutionRecord>(trajectory.payload));
}

// Partitions W into K classes of identical labels, with empirical
// probabilities p_k = |C_k| / N_w. Classes are ordered by first occurrence;
// an empty W yields an empty partition.
inline ErrorPartition partition_errors(const RolloutGroup& group,
                                       const ShapingConfig& config) {
  ErrorPartition partition;
  const std::size_t nw = group.incorrect_set.size();
  if (nw == 0) return partition;

  std::unordered_map<ErrorLabel, std::size_t> class_of;
  for (std::size_t i : group.incorrect_set) {
    ErrorLabel label = error_label(group.trajectories[i], config.domain);
    auto [it, inserted] = class_of.try_emplace(label, partition.classes.size());
    if (inserted) {
      partition.classes.emplace_back();
      partition.labels.push_back(std::move(label));
    }
    partition.classes[it->second].push_back(i);
  }
  partition.probabilities.reserve(partition.classes.size());
  for (const auto& cls : partition.classes) {
    partition.probabilities.push_back(static_cast<double>(cls.size()) /
                                      static_cast<double>(nw));
  }
  return partition;
}

}  // namespace edas
