#include "edas/error_partition.hpp"

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <map>
#include <numeric>

#include "edas/rng.hpp"

using namespace edas;

namespace {

RolloutGroup group_from_answers(const std::vector<std::string>& wrong_answers,
                                std::size_t correct_count = 0) {
  RolloutGroup g;
  g.prompt_id = "p";
  std::size_t id = 0;
  for (const std::string& answer : wrong_answers) {
    Trajectory t;
    t.id = "t" + std::to_string(id++);
    t.payload = MathOutput{"\\boxed{" + answer + "}"};
    t.correct = false;
    t.baseline_advantage = -1.0;
    g.trajectories.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < correct_count; ++i) {
    Trajectory t;
    t.id = "c" + std::to_string(i);
    t.payload = MathOutput{"\\boxed{50}"};
    t.correct = true;
    t.baseline_advantage = 1.0;
    g.trajectories.push_back(std::move(t));
  }
  return validate_group(std::move(g));
}

}  // namespace

TEST_CASE("partition groups incorrect trajectories by label") {
  const RolloutGroup g =
      group_from_answers({"9", "9", "9", "41", "41", "0"});
  ShapingConfig cfg;
  const ErrorPartition p = partition_errors(g, cfg);
  REQUIRE(p.num_classes() == 3);
  REQUIRE(p.total() == 6);
  REQUIRE(p.classes[0].size() == 3);  // first-occurrence order
  REQUIRE(p.classes[1].size() == 2);
  REQUIRE(p.classes[2].size() == 1);
  REQUIRE(p.labels[0].value == "9");
  REQUIRE(p.labels[1].value == "41");
  REQUIRE(p.labels[2].value == "0");
  REQUIRE(p.probabilities[0] == Catch::Approx(3.0 / 6.0));
  REQUIRE(p.probabilities[1] == Catch::Approx(2.0 / 6.0));
  REQUIRE(p.probabilities[2] == Catch::Approx(1.0 / 6.0));
}

TEST_CASE("single-class and empty partitions") {
  ShapingConfig cfg;
  const ErrorPartition single =
      partition_errors(group_from_answers({"50", "50", "50", "50", "50"}), cfg);
  REQUIRE(single.num_classes() == 1);
  REQUIRE(single.probabilities == std::vector<double>{1.0});

  const ErrorPartition empty =
      partition_errors(group_from_answers({}, 3), cfg);
  REQUIRE(empty.num_classes() == 0);
  REQUIRE(empty.total() == 0);
}

TEST_CASE("code-domain labeling") {
  ExecutionRecord compile_fail;
  compile_fail.phase = ExecutionRecord::Phase::compile;
  compile_fail.exception_name = "SyntaxError";
  REQUIRE(label_code_error(compile_fail).value == "SyntaxError");

  ExecutionRecord wrong_answer;
  wrong_answer.phase = ExecutionRecord::Phase::run;
  wrong_answer.tests_passed = false;
  REQUIRE(label_code_error(wrong_answer).value == "WrongAnswer");

  ExecutionRecord runtime_fail;
  runtime_fail.phase = ExecutionRecord::Phase::run;
  runtime_fail.exception_name = "IndexError";
  REQUIRE(label_code_error(runtime_fail).value == "IndexError");

  ExecutionRecord passed;
  passed.phase = ExecutionRecord::Phase::run;
  passed.tests_passed = true;
  REQUIRE_THROWS_AS(label_code_error(passed), InconsistentRecordError);
}

TEST_CASE("domain mismatch is rejected") {
  const RolloutGroup g = group_from_answers({"9", "41"});
  ShapingConfig cfg;
  cfg.domain = Domain::code;
  REQUIRE_THROWS_AS(partition_errors(g, cfg), DomainMismatchError);
}

TEST_CASE("partition probabilities always sum to one") {
  SplitMix64 rng(5);
  ShapingConfig cfg;
  const std::vector<std::string> pool = {"1", "2", "3", "5", "8", "13"};
  for (int iteration = 0; iteration < 300; ++iteration) {
    const std::size_t nw = 1 + rng.next_u64() % 24;
    std::vector<std::string> answers;
    for (std::size_t i = 0; i < nw; ++i) {
      answers.push_back(pool[rng.next_u64() % pool.size()]);
    }
    const ErrorPartition p = partition_errors(group_from_answers(answers), cfg);
    REQUIRE(p.total() == nw);
    const double sum = std::accumulate(p.probabilities.begin(),
                                       p.probabilities.end(), 0.0);
    REQUIRE(std::abs(sum - 1.0) < 1e-12);
    for (const auto& cls : p.classes) REQUIRE_FALSE(cls.empty());
  }
}

TEST_CASE("partition is invariant under trajectory permutation") {
  SplitMix64 rng(6);
  ShapingConfig cfg;
  const std::vector<std::string> pool = {"9", "41", "0", "7"};
  for (int iteration = 0; iteration < 200; ++iteration) {
    const std::size_t nw = 2 + rng.next_u64() % 12;
    std::vector<std::string> answers;
    for (std::size_t i = 0; i < nw; ++i) {
      answers.push_back(pool[rng.next_u64() % pool.size()]);
    }
    const ErrorPartition base = partition_errors(group_from_answers(answers), cfg);

    std::vector<std::string> shuffled = answers;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.next_u64() % i]);
    }
    const ErrorPartition permuted =
        partition_errors(group_from_answers(shuffled), cfg);

    REQUIRE(base.num_classes() == permuted.num_classes());
    // class membership is determined solely by labels
    std::map<std::string, std::size_t> base_counts, permuted_counts;
    for (std::size_t c = 0; c < base.num_classes(); ++c) {
      base_counts[base.labels[c].value] = base.classes[c].size();
    }
    for (std::size_t c = 0; c < permuted.num_classes(); ++c) {
      permuted_counts[permuted.labels[c].value] = permuted.classes[c].size();
    }
    REQUIRE(base_counts == permuted_counts);
  }
}

TEST_CASE("co-classification iff label equality") {
  ShapingConfig cfg;
  const std::vector<std::string> answers = {"9", "0.5", "1/2", "41", "9"};
  const RolloutGroup g = group_from_answers(answers);
  const ErrorPartition p = partition_errors(g, cfg);

  std::vector<std::size_t> class_of(answers.size());
  for (std::size_t c = 0; c < p.num_classes(); ++c) {
    for (std::size_t i : p.classes[c]) class_of[i] = c;
  }
  for (std::size_t i = 0; i < answers.size(); ++i) {
    for (std::size_t j = 0; j < answers.size(); ++j) {
      const bool same_label = error_label(g.trajectories[i], cfg.domain) ==
                              error_label(g.trajectories[j], cfg.domain);
      REQUIRE(same_label == (class_of[i] == class_of[j]));
    }
  }
  REQUIRE(p.num_classes() == 3);  // {9,9}, {0.5,1/2}, {41}
}
