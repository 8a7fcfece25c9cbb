#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "explainloop/eval_harness.hpp"
#include "explainloop/session_engine.hpp"

namespace explainloop {

/// How a scripted run ends once its feedback list is exhausted.
enum class RunFinish { Complete, SkipUnclear, SkipUnsolvable, Timeout };

std::string_view to_string(RunFinish finish);
std::optional<RunFinish> parse_run_finish(std::string_view text);

/// A simulated user: feedback messages sent in order, then a finishing action.
struct ScriptedRun {
  std::string task_id;
  SessionMode mode = SessionMode::IntelliExplain;
  std::vector<std::string> feedback;
  RunFinish finish = RunFinish::Complete;
  std::int64_t step_ms = 30000;  // simulated user time before each action
  std::optional<TerminalKind> expected_terminal;

  bool operator==(const ScriptedRun&) const = default;
};

/// {"runs": [{"task_id", "mode", "feedback": [...], "finish", "step_ms", "expect"}]}
std::vector<ScriptedRun> parse_runs(std::string_view text);
std::vector<ScriptedRun> load_runs(const std::filesystem::path& path);

struct RunResult {
  std::size_t index = 0;
  std::string session_id;
  std::string task_id;
  std::optional<Session> session;
  std::optional<std::string> error;  // run aborted; the session stays incomplete
  bool expectation_met = true;
};

struct BatchResult {
  std::vector<RunResult> runs;
  std::string transcript;  // JSONL
  MetricsReport report;
};

/// Plays every run sequentially on a simulated clock starting at 0. Session
/// ids are "run-000", "run-001", ... The output is a pure function of the
/// inputs and the gateway's replies.
BatchResult run_batch(const std::vector<ScriptedRun>& runs, const std::vector<TaskBundle>& corpus,
                      std::shared_ptr<Gateway> gateway, std::shared_ptr<const Sandbox> sandbox,
                      std::shared_ptr<const DemoStore> demos, EngineConfig config = {});

}  // namespace explainloop
