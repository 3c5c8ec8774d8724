#include "edas/io.hpp"

#include <bit>
#include <catch2/catch_amalgamated.hpp>
#include <cstring>
#include <sstream>

#include "edas/rng.hpp"

using namespace edas;

namespace {

std::string math_line(const std::string& prompt, const std::string& id,
                      bool correct, const char* advantage = nullptr) {
  nlohmann::json record{{"prompt_id", prompt},
                        {"trajectory_id", id},
                        {"domain", "math"},
                        {"raw_text", "\\boxed{9}"},
                        {"correct", correct}};
  std::string line = record.dump();
  if (advantage) {
    line.pop_back();  // strip '}'
    line += std::string(",\"baseline_advantage\":") + advantage + "}";
  }
  return line + "\n";
}

bool bitwise_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("groups are assembled by prompt_id in first-appearance order") {
  std::stringstream in;
  for (int g = 0; g < 2; ++g) {
    for (int t = 0; t < 10; ++t) {
      in << math_line("p" + std::to_string(g), "t" + std::to_string(t), t < 3);
    }
  }
  const IngestResult result = ingest(in);
  REQUIRE(result.groups.size() == 2);
  REQUIRE(result.groups[0].prompt_id == "p0");
  REQUIRE(result.groups[1].prompt_id == "p1");
  REQUIRE(result.groups[0].size() == 10);
  REQUIRE(result.groups[0].num_incorrect() == 7);
}

TEST_CASE("interleaved prompt ids are reassembled") {
  std::stringstream in;
  in << math_line("a", "t0", true) << math_line("b", "t0", false)
     << math_line("a", "t1", false) << math_line("b", "t1", true);
  const IngestResult result = ingest(in);
  REQUIRE(result.groups.size() == 2);
  REQUIRE(result.groups[0].size() == 2);
  REQUIRE(result.groups[0].trajectories[1].id == "t1");
}

TEST_CASE("malformed lines raise ParseError naming the line") {
  std::stringstream in;
  in << math_line("p", "t0", true);
  in << "{not json\n";
  try {
    ingest(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.line == 2);
    REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("collect mode keeps good records and enumerates bad ones") {
  std::stringstream in;
  in << math_line("p", "t0", true);
  in << "garbage\n";
  in << math_line("p", "t1", false);
  in << R"({"prompt_id":"q","trajectory_id":"x","domain":"math","correct":true})"
     << "\n";  // missing raw_text

  IngestOptions options;
  options.collect_errors = true;
  const IngestResult result = ingest(in, options);
  REQUIRE_FALSE(result.ok());
  REQUIRE(result.errors.size() == 2);
  REQUIRE(result.errors[0].line == 2);
  REQUIRE(result.errors[1].line == 4);
  REQUIRE(result.groups.size() == 1);
  REQUIRE(result.groups[0].size() == 2);
}

TEST_CASE("mixed domains under one prompt_id are inconsistent") {
  std::stringstream in;
  in << math_line("p", "t0", false);
  in << R"({"prompt_id":"p","trajectory_id":"t1","domain":"code","phase":"run","tests_passed":false,"correct":false})"
     << "\n";
  REQUIRE_THROWS_AS(ingest(in), ParseError);

  std::stringstream again;
  again << math_line("p", "t0", false);
  again
      << R"({"prompt_id":"p","trajectory_id":"t1","domain":"code","phase":"run","tests_passed":false,"correct":false})"
      << "\n";
  IngestOptions options;
  options.collect_errors = true;
  const IngestResult result = ingest(again, options);
  REQUIRE(result.errors.size() == 1);
  REQUIRE(result.errors[0].message.find("mixed domains") != std::string::npos);
}

TEST_CASE("execution-record invariants are checked at parse time") {
  std::stringstream in;
  in << R"({"prompt_id":"p","trajectory_id":"t0","domain":"code","phase":"run","exception_name":"TypeError","tests_passed":true,"correct":true})"
     << "\n";
  REQUIRE_THROWS_AS(ingest(in), ParseError);
}

TEST_CASE("missing advantages are derived from correctness") {
  std::stringstream in;
  in << math_line("p", "t0", true) << math_line("p", "t1", false)
     << math_line("p", "t2", false) << math_line("p", "t3", false);
  const IngestResult result = ingest(in);
  REQUIRE(result.advantage_derived[0]);
  const auto& ts = result.groups[0].trajectories;
  REQUIRE(ts[0].baseline_advantage == Catch::Approx(1.73205).margin(1e-5));
  REQUIRE(ts[1].baseline_advantage == Catch::Approx(-0.57735).margin(1e-5));
}

TEST_CASE("provided advantages are used verbatim") {
  std::stringstream in;
  in << math_line("p", "t0", true, "0.75") << math_line("p", "t1", false, "-0.25");
  const IngestResult result = ingest(in);
  REQUIRE_FALSE(result.advantage_derived[0]);
  REQUIRE(result.groups[0].trajectories[0].baseline_advantage == 0.75);
  REQUIRE(result.groups[0].trajectories[1].baseline_advantage == -0.25);
}

TEST_CASE("report lines with a non-trajectory type are skipped") {
  std::stringstream in;
  in << R"({"type":"group","prompt_id":"p","branch":"diverse"})" << "\n";
  in << math_line("p", "t0", true);
  in << R"({"type":"dropped_group","prompt_id":"q","reason":"all_correct"})"
     << "\n";
  const IngestResult result = ingest(in);
  REQUIRE(result.groups.size() == 1);
  REQUIRE(result.groups[0].size() == 1);
}

TEST_CASE("code payloads round-trip through the wire schema") {
  Trajectory t;
  t.id = "t0";
  ExecutionRecord exec;
  exec.phase = ExecutionRecord::Phase::compile;
  exec.exception_name = "SyntaxError";
  exec.tests_passed = false;
  t.payload = exec;
  t.correct = false;
  t.baseline_advantage = -0.125;

  std::stringstream in;
  in << trajectory_record("p", t).dump() << "\n";
  const IngestResult result = ingest(in);
  const Trajectory& back = result.groups[0].trajectories[0];
  const auto& exec_back = std::get<ExecutionRecord>(back.payload);
  REQUIRE(exec_back.phase == ExecutionRecord::Phase::compile);
  REQUIRE(exec_back.exception_name == "SyntaxError");
  REQUIRE_FALSE(exec_back.tests_passed);
  REQUIRE(back.baseline_advantage == -0.125);
}

TEST_CASE("serialized advantages survive a round trip bit-exactly") {
  SplitMix64 rng(314);
  std::stringstream in;
  std::vector<double> values;
  for (int i = 0; i < 500; ++i) {
    // random finite doubles across the full exponent range
    double v = std::bit_cast<double>(rng.next_u64());
    if (!std::isfinite(v)) v = rng.next_unit() * 2.0 - 1.0;
    values.push_back(v);

    Trajectory t;
    t.id = "t" + std::to_string(i);
    t.payload = MathOutput{"\\boxed{1}"};
    t.correct = false;
    t.baseline_advantage = v;
    in << trajectory_record("p" + std::to_string(i), t).dump() << "\n";
  }
  const IngestResult result = ingest(in);
  REQUIRE(result.groups.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    CAPTURE(i, values[i]);
    REQUIRE(bitwise_equal(result.groups[i].trajectories[0].baseline_advantage,
                          values[i]));
  }
}
