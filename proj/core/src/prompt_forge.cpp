#include "explainloop/prompt_forge.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <nlohmann/json.hpp>

#include "explainloop/error.hpp"

namespace explainloop {

namespace {

constexpr std::string_view kSqlCodegenInstruction =
    "You are an expert SQL programmer. Given a database schema with three sample rows per "
    "table and a question, write one SQLite query that answers the question. Reply with the "
    "query only.";

constexpr std::string_view kPythonCodegenInstruction =
    "You are an expert Python programmer. Write a Python function that solves the task and "
    "passes the listed tests. Reply with the code only.";

constexpr std::string_view kSqlCorrectionInstruction =
    "You are an expert SQL programmer. You are given a SQL query, an explanation of what the "
    "query does, and feedback from a user who compared the explanation with their intent. "
    "Rewrite the query so that it follows the feedback. Reply with the corrected query only.";

constexpr std::string_view kPythonCorrectionInstruction =
    "You are an expert Python programmer. You are given a Python program, a description of "
    "what the program does, and feedback from a user who compared the description with their "
    "intent. Rewrite the program so that it follows the feedback. Reply with the corrected "
    "program only.";

constexpr std::string_view kVanillaSystem = "You are a helpful assistant.";

bool is_blank(std::string_view text) { return trim(text).empty(); }

void require_text(std::string_view text, const char* what) {
  if (is_blank(text)) {
    throw Error(ErrorCode::PreconditionViolated, std::string(what) + " must not be empty");
  }
}

std::string codegen_user_message(Language language, std::string_view question,
                                 std::string_view context) {
  if (language == Language::Python) {
    return "You are an expert Python programmer, and here is your task: " + std::string(question) +
           " Your code should pass these tests:\n\n" + std::string(context);
  }
  return "Schema and sample rows:\n" + std::string(context) + "\n\nQuestion: " +
         std::string(question);
}

std::string correction_user_message(std::string_view code, std::string_view explanation,
                                    std::string_view feedback) {
  return "Code:\n" + std::string(code) + "\n\nExplanation: " + std::string(explanation) +
         "\n\nFeedback: " + std::string(feedback);
}

std::string restatement_user_message(std::string_view sql, std::string_view question) {
  return "SQL: " + std::string(sql) + "\nOriginal Question: " + std::string(question);
}

std::string description_user_message(std::string_view program) {
  return "Python Program:\n" + std::string(program);
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

std::string_view to_string(PromptPurpose purpose) {
  switch (purpose) {
    case PromptPurpose::CodeGen: return "codegen";
    case PromptPurpose::RestateExplain: return "restate_explain";
    case PromptPurpose::DescribeExplain: return "describe_explain";
    case PromptPurpose::ErrorCorrect: return "error_correct";
    case PromptPurpose::VanillaChat: return "vanilla_chat";
  }
  return "codegen";
}

std::optional<Role> parse_role(std::string_view text) {
  for (Role r : {Role::System, Role::User, Role::Assistant}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

std::optional<PromptPurpose> parse_purpose(std::string_view text) {
  for (PromptPurpose p : {PromptPurpose::CodeGen, PromptPurpose::RestateExplain,
                          PromptPurpose::DescribeExplain, PromptPurpose::ErrorCorrect,
                          PromptPurpose::VanillaChat}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::string trim(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::string serialize_messages(const std::vector<Message>& messages) {
  auto arr = nlohmann::json::array();
  for (const auto& m : messages) {
    arr.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  return arr.dump();
}

std::string fingerprint_of(const std::vector<Message>& messages) {
  std::string payload = serialize_messages(messages);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(payload.data(), payload.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 digest failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

PromptBundle make_bundle(PromptPurpose purpose, std::vector<Message> messages) {
  if (messages.empty() || messages.front().role == Role::Assistant) {
    throw Error(ErrorCode::PreconditionViolated,
                "a prompt must open with a system or user message");
  }
  PromptBundle bundle;
  bundle.fingerprint = fingerprint_of(messages);
  bundle.messages = std::move(messages);
  bundle.purpose = purpose;
  return bundle;
}

std::string render_bundle(const PromptBundle& bundle) {
  std::string out = "purpose: " + std::string(to_string(bundle.purpose)) + "\n";
  out += "fingerprint: " + bundle.fingerprint + "\n";
  for (const auto& m : bundle.messages) {
    out += "\n=== " + std::string(to_string(m.role)) + " ===\n";
    out += m.content;
    out += "\n";
  }
  return out;
}

PromptBundle build_codegen_prompt(const TaskBundle& task, const DemoStore& store) {
  require_text(task.question, "question");
  auto demos = store.codegen_for(task.language);
  if (demos.empty()) {
    throw Error(ErrorCode::MissingDemos,
                "no codegen demos for " + std::string(to_string(task.language)));
  }
  std::vector<Message> messages;
  messages.push_back({Role::System, std::string(task.language == Language::Sql
                                                    ? kSqlCodegenInstruction
                                                    : kPythonCodegenInstruction)});
  for (const auto* d : demos) {
    messages.push_back({Role::User, codegen_user_message(d->language, d->question, d->context)});
    messages.push_back({Role::Assistant, d->code});
  }
  messages.push_back(
      {Role::User, codegen_user_message(task.language, task.question, render_context(task))});
  return make_bundle(PromptPurpose::CodeGen, std::move(messages));
}

PromptBundle build_restatement_prompt(std::string_view sql, std::string_view original_question,
                                      const DemoStore& store) {
  require_text(sql, "sql");
  if (store.restatement_triplets.empty()) {
    throw Error(ErrorCode::MissingDemos, "no restatement demos");
  }
  std::vector<Message> messages;
  messages.push_back({Role::System, std::string(kRestatementInstruction)});
  for (const auto& d : store.restatement_triplets) {
    messages.push_back({Role::User, restatement_user_message(d.sql, d.original_question)});
    messages.push_back({Role::Assistant, d.restated_question});
  }
  messages.push_back({Role::User, restatement_user_message(trim(sql), original_question)});
  return make_bundle(PromptPurpose::RestateExplain, std::move(messages));
}

PromptBundle build_description_prompt(std::string_view python_code, const DemoStore& store) {
  require_text(python_code, "python code");
  if (store.description_pairs.empty()) {
    throw Error(ErrorCode::MissingDemos, "no description demos");
  }
  std::vector<Message> messages;
  messages.push_back({Role::System, std::string(kDescriptionInstruction)});
  for (const auto& d : store.description_pairs) {
    messages.push_back({Role::User, description_user_message(d.program)});
    messages.push_back({Role::Assistant, d.description});
  }
  messages.push_back({Role::User, description_user_message(python_code)});
  return make_bundle(PromptPurpose::DescribeExplain, std::move(messages));
}

PromptBundle build_correction_prompt(std::string_view code, std::string_view explanation,
                                     std::string_view feedback, const TaskBundle& task,
                                     const DemoStore& store) {
  if (is_blank(feedback)) throw Error(ErrorCode::EmptyFeedback, "feedback is empty");
  require_text(code, "code");
  require_text(explanation, "explanation");
  auto demos = store.corrections_for(task.language);
  if (demos.empty()) {
    throw Error(ErrorCode::MissingDemos,
                "no correction demos for " + std::string(to_string(task.language)));
  }
  std::vector<Message> messages;
  messages.push_back({Role::System, std::string(task.language == Language::Sql
                                                    ? kSqlCorrectionInstruction
                                                    : kPythonCorrectionInstruction)});
  for (const auto* d : demos) {
    messages.push_back({Role::User, correction_user_message(d->code, d->explanation, d->feedback)});
    messages.push_back({Role::Assistant, d->corrected_code});
  }
  messages.push_back({Role::User, "Context:\n" + render_context(task) + "\n\nQuestion: " +
                                      task.question + "\n\n" +
                                      correction_user_message(code, explanation, trim(feedback))});
  return make_bundle(PromptPurpose::ErrorCorrect, std::move(messages));
}

std::string vanilla_opening_message(const TaskBundle& task) {
  if (task.language == Language::Sql) {
    return task.question + "\n\nDatabase schema and sample rows:\n" + render_context(task);
  }
  return task.question + "\n\nYour code should pass these tests:\n" + render_context(task);
}

PromptBundle build_vanilla_prompt(const TaskBundle& task, const std::vector<std::string>& replies,
                                  const std::vector<std::string>& follow_ups) {
  require_text(task.question, "question");
  if (replies.size() != follow_ups.size()) {
    throw Error(ErrorCode::PreconditionViolated,
                "every earlier reply needs the user message that followed it");
  }
  std::vector<Message> messages;
  messages.push_back({Role::System, std::string(kVanillaSystem)});
  messages.push_back({Role::User, vanilla_opening_message(task)});
  for (std::size_t i = 0; i < replies.size(); ++i) {
    messages.push_back({Role::Assistant, replies[i]});
    messages.push_back({Role::User, follow_ups[i]});
  }
  return make_bundle(PromptPurpose::VanillaChat, std::move(messages));
}

std::string extract_code(std::string_view reply) {
  auto open = reply.find("```");
  if (open == std::string_view::npos) return trim(reply);
  auto body = reply.find('\n', open);
  if (body == std::string_view::npos) return trim(reply.substr(open + 3));
  ++body;
  auto close = reply.find("```", body);
  std::string_view code =
      close == std::string_view::npos ? reply.substr(body) : reply.substr(body, close - body);
  while (!code.empty() && (code.back() == '\n' || code.back() == '\r')) code.remove_suffix(1);
  // keep leading indentation of the first line, drop surrounding blank lines
  while (!code.empty() && code.front() == '\n') code.remove_prefix(1);
  return std::string(code);
}

}  // namespace explainloop
