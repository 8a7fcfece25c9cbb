#pragma once

#include <nlohmann/json.hpp>

#include "explainloop/exec_sandbox.hpp"
#include "explainloop/prompt_forge.hpp"
#include "explainloop/session.hpp"
#include "explainloop/task_model.hpp"

namespace explainloop {

// Wire shapes shared by cassettes, transcripts and the HTTP API. Decoders throw
// nlohmann::json exceptions on shape errors and std::invalid_argument on
// unknown enum names; callers map both to their own error codes.

nlohmann::json bundle_to_json(const PromptBundle& bundle);
PromptBundle bundle_from_json(const nlohmann::json& j);

/// NULL, integers, reals and text map to JSON scalars; blobs to {"blob": hex}.
nlohmann::json sql_value_to_json(const SqlValue& value);
SqlValue sql_value_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const SuccessVerdict& verdict);
SuccessVerdict verdict_from_json(const nlohmann::json& j);

/// `include_timing` controls wall_ms, which is left out of transcripts so that
/// replays compare byte-for-byte.
nlohmann::json execution_to_json(const ExecutionOutcome& outcome, bool include_timing);
ExecutionOutcome execution_from_json(const nlohmann::json& j);

struct TurnView {
  bool include_timing = false;
  bool include_verdict = true;
};

nlohmann::json turn_to_json(const Turn& turn, TurnView view = {});
Turn turn_from_json(const nlohmann::json& j);

nlohmann::json terminal_to_json(const TerminalOutcome& outcome);
TerminalOutcome terminal_from_json(const nlohmann::json& j);

/// Task summary for clients: everything except the gold code.
nlohmann::json task_to_json(const TaskBundle& task);

/// Session snapshot as served to clients. Per-turn verdicts stay hidden until
/// the session is terminal; `now_ms` fills remaining_ms.
nlohmann::json session_to_json(const Session& session, std::int64_t now_ms);

}  // namespace explainloop
