#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "explainloop/batch.hpp"
#include "explainloop/error.hpp"
#include "explainloop/eval_harness.hpp"
#include "explainloop/exec_sandbox.hpp"
#include "explainloop/llm_gateway.hpp"
#include "explainloop/prompt_forge.hpp"
#include "explainloop/session_engine.hpp"
#include "explainloop/task_model.hpp"
#include "explainloop/transcript.hpp"

namespace explainloop::testing {

inline std::filesystem::path data_dir() { return EXPLAINLOOP_TEST_DATA_DIR; }
inline std::filesystem::path golden_dir() { return EXPLAINLOOP_TEST_GOLDEN_DIR; }
inline std::filesystem::path repo_dir() { return EXPLAINLOOP_TEST_REPO_DIR; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline const std::vector<TaskBundle>& sql_corpus() {
  static const auto tasks = load_corpus(data_dir() / "corpora/spider_fixture", TaskOrigin::SpiderStyle);
  return tasks;
}

inline const std::vector<TaskBundle>& python_corpus() {
  static const auto tasks = load_corpus(data_dir() / "corpora/mbpp_fixture", TaskOrigin::MbppStyle);
  return tasks;
}

inline const std::vector<TaskBundle>& full_corpus() {
  static const auto tasks = [] {
    auto all = sql_corpus();
    all.insert(all.end(), python_corpus().begin(), python_corpus().end());
    return all;
  }();
  return tasks;
}

inline const TaskBundle& task(const std::string& id) {
  const TaskBundle* t = find_task(full_corpus(), id);
  if (!t) throw std::runtime_error("fixture task missing: " + id);
  return *t;
}

inline std::shared_ptr<const DemoStore> default_demos() {
  static const auto demos =
      std::make_shared<const DemoStore>(load_demo_store(data_dir() / "demos/default.demos"));
  return demos;
}

/// Compares against tests/golden/<name>. With EXPLAINLOOP_UPDATE_GOLDEN set the
/// file is rewritten instead. Returns an empty string on a match.
inline std::string golden_mismatch(const std::string& name, const std::string& actual) {
  auto path = golden_dir() / name;
  if (std::getenv("EXPLAINLOOP_UPDATE_GOLDEN")) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << actual;
    return {};
  }
  if (!std::filesystem::exists(path)) return "golden file missing: " + path.string();
  std::string expected = read_file(path);
  if (expected == actual) return {};
  std::size_t i = 0;
  while (i < expected.size() && i < actual.size() && expected[i] == actual[i]) ++i;
  return name + " differs at byte " + std::to_string(i) + "; expected \"" +
         expected.substr(i, 60) + "\", got \"" + actual.substr(i, 60) + "\"";
}

/// Engine wired to a scripted provider, an in-memory cassette and a manual clock.
struct StubWorld {
  std::shared_ptr<ScriptedTransport> transport;
  std::shared_ptr<Cassette> cassette;
  std::shared_ptr<Gateway> gateway;
  std::shared_ptr<const Sandbox> sandbox;
  std::shared_ptr<ManualClock> clock;
  std::shared_ptr<MemoryTranscript> transcript;
  std::shared_ptr<SessionEngine> engine;

  explicit StubWorld(std::vector<ScriptedTransport::Rule> rules, EngineConfig config = {},
                     GatewayMode mode = GatewayMode::RecordThenReplay,
                     std::shared_ptr<Cassette> shared_cassette = nullptr)
      : transport(std::make_shared<ScriptedTransport>(std::move(rules))),
        cassette(shared_cassette ? std::move(shared_cassette) : std::make_shared<Cassette>()),
        gateway(std::make_shared<Gateway>(ModelConfig{}, mode, transport, cassette)),
        sandbox(std::make_shared<const Sandbox>(SandboxConfig{2000, 2000, "python3", 4})),
        clock(std::make_shared<ManualClock>(0)),
        transcript(std::make_shared<MemoryTranscript>()),
        engine(std::make_shared<SessionEngine>(gateway, sandbox, default_demos(), clock, config,
                                               transcript)) {}
};

inline ScriptedTransport::Rule rule(std::optional<PromptPurpose> purpose,
                                    std::vector<std::string> contains, std::string response) {
  return {purpose, std::move(contains), std::move(response)};
}

inline std::vector<ScriptedTransport::Rule> fixture_rules() {
  return ScriptedTransport::from_file(data_dir() / "stubs/fixture.rules.json").rules();
}

// Prompt golden cases ---------------------------------------------------------------

struct PromptCase {
  std::string name;
  PromptBundle bundle;
};

inline std::vector<PromptCase> prompt_golden_cases() {
  const DemoStore& demos = *default_demos();
  const TaskBundle& booking = task("sql-017");
  const TaskBundle& non_prime = task("mbpp-5");
  const TaskBundle& grades = task("sql-002");
  const TaskBundle& kth = task("mbpp-4");
  return {
      {"prompt_codegen_sql.txt", build_codegen_prompt(booking, demos)},
      {"prompt_codegen_python.txt", build_codegen_prompt(non_prime, demos)},
      {"prompt_restatement.txt",
       build_restatement_prompt(booking.gold_code, booking.question, demos)},
      {"prompt_description.txt", build_description_prompt(non_prime.gold_code, demos)},
      {"prompt_correction_sql.txt",
       build_correction_prompt("SELECT count(*) FROM Highschooler WHERE grade = 9",
                               "How many high schoolers are in grade 9?",
                               "Also count the students in grade 10.", grades, demos)},
      {"prompt_correction_python.txt",
       build_correction_prompt("def kth_element(arr, n, k):\n    return arr[k]",
                               "The function returns the element of arr at index k, counting "
                               "positions from zero.",
                               "Positions are counted from 1.", kth, demos)},
      {"prompt_vanilla_sql.txt",
       build_vanilla_prompt(grades, {"SELECT count(*) FROM Highschooler WHERE grade = 9"},
                            {"Grade 10 should be counted too."})},
  };
}

// Synthetic evaluation log ------------------------------------------------------

inline TranscriptSession synthetic_session(const std::string& id, const std::string& task_id,
                                           TerminalKind kind, bool success,
                                           std::int64_t elapsed_ms) {
  TranscriptSession s;
  s.session_id = id;
  s.task_id = task_id;
  s.deadline_ms = 300000;
  Turn turn;
  turn.code = "SELECT 1";
  turn.verdict = make_verdict(success ? VerdictReason::ResultsMatch : VerdictReason::ResultsDiffer);
  s.turns.push_back(turn);
  s.terminal = TerminalOutcome{kind, turn.verdict, elapsed_ms};
  return s;
}

/// Ten sessions: three completed successes, six failures (completed with a
/// wrong result, skipped as unsolvable or timed out) and one skipped as unclear.
inline std::vector<TranscriptSession> synthetic_ten_session_log() {
  using K = TerminalKind;
  return {
      synthetic_session("s01", "sql-001", K::CompletedByUser, true, 60000),
      synthetic_session("s02", "sql-004", K::CompletedByUser, true, 90000),
      synthetic_session("s03", "sql-003", K::CompletedByUser, true, 120000),
      synthetic_session("s04", "sql-002", K::CompletedByUser, false, 100000),
      synthetic_session("s05", "sql-005", K::CompletedByUser, false, 150000),
      synthetic_session("s06", "sql-006", K::SkipUnsolvable, false, 200000),
      synthetic_session("s07", "sql-007", K::Timeout, false, 300000),
      synthetic_session("s08", "sql-013", K::CompletedByUser, false, 80000),
      synthetic_session("s09", "sql-008", K::SkipUnsolvable, false, 70000),
      synthetic_session("s10", "sql-009", K::SkipUnclear, false, 30000),
  };
}

}  // namespace explainloop::testing
