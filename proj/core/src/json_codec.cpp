#include "explainloop/json_codec.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "explainloop/error.hpp"

namespace explainloop {

using nlohmann::json;

namespace {

template <typename E, typename Parse>
E enum_from(const json& j, Parse parse, const char* what) {
  auto text = j.get<std::string>();
  auto value = parse(text);
  if (!value) {
    throw std::invalid_argument(std::string("unknown ") + what + " '" + text + "'");
  }
  return *value;
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  char buf[3];
  for (auto b : bytes) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    out += buf;
  }
  return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

}  // namespace

json bundle_to_json(const PromptBundle& bundle) {
  json messages = json::array();
  for (const auto& m : bundle.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  return {{"purpose", to_string(bundle.purpose)},
          {"fingerprint", bundle.fingerprint},
          {"messages", messages}};
}

PromptBundle bundle_from_json(const json& j) {
  std::vector<Message> messages;
  for (const auto& m : j.at("messages")) {
    messages.push_back({enum_from<Role>(m.at("role"), parse_role, "role"),
                        m.at("content").get<std::string>()});
  }
  auto purpose = enum_from<PromptPurpose>(j.at("purpose"), parse_purpose, "purpose");
  PromptBundle bundle = make_bundle(purpose, std::move(messages));
  if (j.contains("fingerprint") && j.at("fingerprint").get<std::string>() != bundle.fingerprint) {
    throw Error(ErrorCode::CassetteCorrupt,
                "stored fingerprint does not match the messages it claims to hash");
  }
  return bundle;
}

json sql_value_to_json(const SqlValue& value) {
  switch (value.index()) {
    case 0: return nullptr;
    case 1: return std::get<std::int64_t>(value);
    case 2: return std::get<double>(value);
    case 3: return std::get<std::string>(value);
    default: return {{"blob", to_hex(std::get<Blob>(value).bytes)}};
  }
}

SqlValue sql_value_from_json(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  return Blob{from_hex(j.at("blob").get<std::string>())};
}

json verdict_to_json(const SuccessVerdict& verdict) {
  return {{"success", verdict.success}, {"reason", to_string(verdict.reason)}};
}

SuccessVerdict verdict_from_json(const json& j) {
  return make_verdict(
      enum_from<VerdictReason>(j.at("reason"), parse_verdict_reason, "verdict reason"));
}

json execution_to_json(const ExecutionOutcome& outcome, bool include_timing) {
  json rows = json::array();
  for (const auto& row : outcome.sql_rows) {
    json r = json::array();
    for (const auto& v : row) r.push_back(sql_value_to_json(v));
    rows.push_back(std::move(r));
  }
  json cases = json::array();
  for (const auto& c : outcome.case_results) {
    cases.push_back({{"index", c.index}, {"passed", c.passed}, {"detail", c.detail}});
  }
  json j = {{"status", to_string(outcome.status)},
            {"columns", outcome.columns},
            {"rows", rows},
            {"case_results", cases},
            {"stderr_excerpt", outcome.stderr_excerpt}};
  if (include_timing) j["wall_ms"] = outcome.wall_ms;
  return j;
}

ExecutionOutcome execution_from_json(const json& j) {
  ExecutionOutcome out;
  out.status = enum_from<ExecStatus>(j.at("status"), parse_exec_status, "execution status");
  out.columns = j.value("columns", std::vector<std::string>{});
  for (const auto& r : j.value("rows", json::array())) {
    SqlRow row;
    for (const auto& v : r) row.push_back(sql_value_from_json(v));
    out.sql_rows.push_back(std::move(row));
  }
  for (const auto& c : j.value("case_results", json::array())) {
    out.case_results.push_back({c.at("index").get<std::size_t>(), c.at("passed").get<bool>(),
                                c.at("detail").get<std::string>()});
  }
  out.stderr_excerpt = j.value("stderr_excerpt", std::string());
  out.wall_ms = j.value("wall_ms", std::int64_t{0});
  return out;
}

json turn_to_json(const Turn& turn, TurnView view) {
  json j = {{"index", turn.index},
            {"code", turn.code},
            {"explanation", turn.explanation},
            {"model_reply", turn.model_reply},
            {"execution", turn.execution ? execution_to_json(*turn.execution, view.include_timing)
                                         : json(nullptr)},
            {"user_feedback", turn.user_feedback ? json(*turn.user_feedback) : json(nullptr)},
            {"prompts_used", turn.prompts_used},
            {"error_notice", turn.error_notice ? json(*turn.error_notice) : json(nullptr)}};
  if (view.include_verdict) j["verdict"] = verdict_to_json(turn.verdict);
  return j;
}

Turn turn_from_json(const json& j) {
  Turn t;
  t.index = j.at("index").get<std::size_t>();
  t.code = j.at("code").get<std::string>();
  t.explanation = j.value("explanation", std::string());
  t.model_reply = j.value("model_reply", std::string());
  if (j.contains("execution") && !j.at("execution").is_null()) {
    t.execution = execution_from_json(j.at("execution"));
  }
  if (j.contains("verdict")) t.verdict = verdict_from_json(j.at("verdict"));
  if (j.contains("user_feedback") && !j.at("user_feedback").is_null()) {
    t.user_feedback = j.at("user_feedback").get<std::string>();
  }
  t.prompts_used = j.value("prompts_used", std::vector<std::string>{});
  if (j.contains("error_notice") && !j.at("error_notice").is_null()) {
    t.error_notice = j.at("error_notice").get<std::string>();
  }
  return t;
}

json terminal_to_json(const TerminalOutcome& outcome) {
  return {{"kind", to_string(outcome.kind)},
          {"final_verdict", verdict_to_json(outcome.final_verdict)},
          {"elapsed_ms", outcome.elapsed_ms}};
}

TerminalOutcome terminal_from_json(const json& j) {
  TerminalOutcome o;
  o.kind = enum_from<TerminalKind>(j.at("kind"), parse_terminal_kind, "terminal kind");
  o.final_verdict = verdict_from_json(j.at("final_verdict"));
  o.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
  return o;
}

json task_to_json(const TaskBundle& task) {
  json j = {{"task_id", task.task_id},
            {"language", to_string(task.language)},
            {"origin", to_string(task.origin)},
            {"question", task.question},
            {"context", render_context(task)},
            {"difficulty", task.difficulty ? json(to_string(task.difficulty->level)) : json(nullptr)}};
  if (task.language == Language::Sql) {
    json tables = json::array();
    for (const auto& t : task.context.sample_rows) {
      json rows = json::array();
      for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& v : row) r.push_back(sql_value_to_json(v));
        rows.push_back(std::move(r));
      }
      tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
    }
    j["tables"] = tables;
  } else {
    json cases = json::array();
    for (const auto& tc : task.context.test_cases) {
      cases.push_back({{"assertion", tc.assertion}, {"expected", tc.expected}});
    }
    j["test_cases"] = cases;
  }
  return j;
}

json session_to_json(const Session& session, std::int64_t now_ms) {
  bool terminal = is_terminal(session.state);
  json turns = json::array();
  for (const auto& t : session.turns) {
    turns.push_back(turn_to_json(t, {true, terminal}));
  }
  std::int64_t remaining = 0;
  if (!terminal) {
    remaining = std::max<std::int64_t>(0, session.started_at_ms + session.deadline_ms - now_ms);
  }
  return {{"session_id", session.session_id},
          {"task", task_to_json(session.task)},
          {"mode", to_string(session.mode)},
          {"state", to_string(session.state)},
          {"started_at_ms", session.started_at_ms},
          {"deadline_ms", session.deadline_ms},
          {"remaining_ms", remaining},
          {"turns", turns},
          {"outcome", session.outcome ? terminal_to_json(*session.outcome) : json(nullptr)}};
}

}  // namespace explainloop
