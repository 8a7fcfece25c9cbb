#include "explainloop/batch.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "explainloop/error.hpp"

namespace explainloop {

using nlohmann::json;

std::string_view to_string(RunFinish finish) {
  switch (finish) {
    case RunFinish::Complete: return "complete";
    case RunFinish::SkipUnclear: return "skip_unclear";
    case RunFinish::SkipUnsolvable: return "skip_unsolvable";
    case RunFinish::Timeout: return "timeout";
  }
  return "complete";
}

std::optional<RunFinish> parse_run_finish(std::string_view text) {
  for (auto f : {RunFinish::Complete, RunFinish::SkipUnclear, RunFinish::SkipUnsolvable,
                 RunFinish::Timeout}) {
    if (to_string(f) == text) return f;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void bad_run(std::size_t index, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, "run " + std::to_string(index) + ": " + what);
}

ScriptedRun run_from_json(const json& j, std::size_t index) {
  if (!j.is_object()) bad_run(index, "must be an object");
  ScriptedRun run;
  if (!j.contains("task_id") || !j["task_id"].is_string()) bad_run(index, "missing task_id");
  run.task_id = j["task_id"].get<std::string>();
  if (j.contains("mode")) {
    auto mode = j["mode"].is_string() ? parse_mode(j["mode"].get<std::string>()) : std::nullopt;
    if (!mode) bad_run(index, "unknown mode");
    run.mode = *mode;
  }
  if (j.contains("feedback")) {
    if (!j["feedback"].is_array()) bad_run(index, "feedback must be a list");
    for (const auto& f : j["feedback"]) {
      if (!f.is_string()) bad_run(index, "feedback entries must be strings");
      run.feedback.push_back(f.get<std::string>());
    }
  }
  if (j.contains("finish")) {
    auto finish =
        j["finish"].is_string() ? parse_run_finish(j["finish"].get<std::string>()) : std::nullopt;
    if (!finish) bad_run(index, "unknown finish");
    run.finish = *finish;
  }
  if (j.contains("step_ms")) {
    if (!j["step_ms"].is_number_integer() || j["step_ms"].get<std::int64_t>() < 0) {
      bad_run(index, "step_ms must be a non-negative integer");
    }
    run.step_ms = j["step_ms"].get<std::int64_t>();
  }
  if (j.contains("expect")) {
    auto kind =
        j["expect"].is_string() ? parse_terminal_kind(j["expect"].get<std::string>()) : std::nullopt;
    if (!kind) bad_run(index, "unknown expected terminal kind");
    run.expected_terminal = *kind;
  }
  return run;
}

}  // namespace

std::vector<ScriptedRun> parse_runs(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("runs") || !doc["runs"].is_array()) {
    throw Error(ErrorCode::InvalidConfig, "runs file must be an object with a 'runs' list");
  }
  std::vector<ScriptedRun> runs;
  for (std::size_t i = 0; i < doc["runs"].size(); ++i) runs.push_back(run_from_json(doc["runs"][i], i));
  return runs;
}

std::vector<ScriptedRun> load_runs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_runs(ss.str());
}

BatchResult run_batch(const std::vector<ScriptedRun>& runs, const std::vector<TaskBundle>& corpus,
                      std::shared_ptr<Gateway> gateway, std::shared_ptr<const Sandbox> sandbox,
                      std::shared_ptr<const DemoStore> demos, EngineConfig config) {
  auto clock = std::make_shared<ManualClock>(0);
  auto transcript = std::make_shared<MemoryTranscript>();
  SessionEngine engine(std::move(gateway), std::move(sandbox), std::move(demos), clock, config,
                       transcript);

  BatchResult result;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const ScriptedRun& run = runs[i];
    RunResult rr;
    rr.index = i;
    rr.task_id = run.task_id;
    char id[32];
    std::snprintf(id, sizeof id, "run-%03zu", i);
    rr.session_id = id;

    auto turn_failed = [&](const Session& s) {
      if (!s.turns.empty() && s.turns.back().error_notice) {
        rr.error = *s.turns.back().error_notice;
        return true;
      }
      return false;
    };

    try {
      const TaskBundle* task = find_task(corpus, run.task_id);
      if (!task) throw Error(ErrorCode::UnknownTask, "unknown task '" + run.task_id + "'");
      Session s = engine.start_session(*task, run.mode, rr.session_id);
      bool aborted = turn_failed(s);
      for (std::size_t f = 0; !aborted && f < run.feedback.size() && !is_terminal(s.state); ++f) {
        clock->advance(run.step_ms);
        s = engine.submit_feedback(rr.session_id, run.feedback[f]);
        aborted = turn_failed(s);
      }
      if (!aborted && !is_terminal(s.state)) {
        clock->advance(run.step_ms);
        switch (run.finish) {
          case RunFinish::Complete: engine.complete_session(rr.session_id); break;
          case RunFinish::SkipUnclear:
            engine.skip_session(rr.session_id, SkipReason::UnclearQuestion);
            break;
          case RunFinish::SkipUnsolvable:
            engine.skip_session(rr.session_id, SkipReason::Unsolvable);
            break;
          case RunFinish::Timeout:
            clock->set(s.started_at_ms + s.deadline_ms + 1);
            engine.tick(rr.session_id);
            break;
        }
      }
      rr.session = engine.snapshot(rr.session_id);
    } catch (const Error& e) {
      rr.error = e.what();
      if (engine.has_session(rr.session_id)) rr.session = engine.snapshot(rr.session_id);
    }

    if (run.expected_terminal) {
      rr.expectation_met = rr.session && rr.session->outcome &&
                           rr.session->outcome->kind == *run.expected_terminal;
    }
    result.runs.push_back(std::move(rr));
  }

  result.transcript = transcript->text();
  result.report = compute_metrics(parse_transcript(result.transcript), corpus);
  return result;
}

}  // namespace explainloop
