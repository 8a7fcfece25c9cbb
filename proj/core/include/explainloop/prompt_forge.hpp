#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "explainloop/task_model.hpp"

namespace explainloop {

enum class Role { System, User, Assistant };
enum class PromptPurpose { CodeGen, RestateExplain, DescribeExplain, ErrorCorrect, VanillaChat };

std::string_view to_string(Role role);
std::string_view to_string(PromptPurpose purpose);
std::optional<Role> parse_role(std::string_view text);
std::optional<PromptPurpose> parse_purpose(std::string_view text);

struct Message {
  Role role;
  std::string content;

  bool operator==(const Message&) const = default;
};

/// An ordered, role-tagged conversation ready for a chat model, plus a
/// SHA-256 fingerprint of its canonical serialization.
struct PromptBundle {
  std::vector<Message> messages;
  PromptPurpose purpose = PromptPurpose::CodeGen;
  std::string fingerprint;

  bool operator==(const PromptBundle&) const = default;
};

/// Canonical serialization hashed into the fingerprint: a compact JSON array
/// of {"content","role"} objects.
std::string serialize_messages(const std::vector<Message>& messages);
std::string fingerprint_of(const std::vector<Message>& messages);
PromptBundle make_bundle(PromptPurpose purpose, std::vector<Message> messages);

/// Human-readable rendering used for golden files and debugging.
std::string render_bundle(const PromptBundle& bundle);

// Demonstration store --------------------------------------------------------

struct RestatementDemo {
  std::string sql;
  std::string original_question;
  std::string restated_question;
};

struct DescriptionDemo {
  std::string program;
  std::string description;
};

struct CorrectionDemo {
  Language language = Language::Sql;
  std::string code;
  std::string explanation;
  std::string feedback;
  std::string corrected_code;
};

struct CodegenDemo {
  Language language = Language::Sql;
  std::string question;
  std::string context;
  std::string code;
};

inline constexpr std::size_t kRestatementDemoCount = 13;
inline constexpr std::size_t kDescriptionDemoCount = 8;
inline constexpr std::size_t kCorrectionDemosPerLanguage = 4;

struct DemoStore {
  std::vector<RestatementDemo> restatement_triplets;
  std::vector<DescriptionDemo> description_pairs;
  std::vector<CorrectionDemo> correction_demos;
  std::vector<CodegenDemo> codegen_demos;

  std::vector<const CorrectionDemo*> corrections_for(Language language) const;
  std::vector<const CodegenDemo*> codegen_for(Language language) const;
};

/// Parses the demo-store text format. Counts must match the declared sizes
/// (13 restatement, 8 description, 4 correction per language, and at least one
/// codegen demo per language); anything else is a DemoStoreInvalid error.
DemoStore parse_demo_store(std::string_view text);
DemoStore load_demo_store(const std::filesystem::path& path);

// Builders -----------------------------------------------------------------

inline constexpr std::string_view kRestatementInstruction =
    "Translate the following SQL into question. The question should be consistent with the "
    "SQL and follow a similar style as the original question.";

inline constexpr std::string_view kDescriptionInstruction =
    "You are an expert Python programmer. Your task is to write a description for the "
    "following Python program. The description should be accurate, concise, and easily "
    "understood by non-programmers.";

PromptBundle build_codegen_prompt(const TaskBundle& task, const DemoStore& store);
PromptBundle build_restatement_prompt(std::string_view sql, std::string_view original_question,
                                      const DemoStore& store);
PromptBundle build_description_prompt(std::string_view python_code, const DemoStore& store);
PromptBundle build_correction_prompt(std::string_view code, std::string_view explanation,
                                     std::string_view feedback, const TaskBundle& task,
                                     const DemoStore& store);

/// Free chat: the task question and context as the opening user message, then
/// each earlier model reply followed by the user message that answered it.
/// `replies` and `follow_ups` have equal length; both are empty on the opening
/// call.
PromptBundle build_vanilla_prompt(const TaskBundle& task, const std::vector<std::string>& replies,
                                  const std::vector<std::string>& follow_ups);

/// The opening user message of a free-chat session.
std::string vanilla_opening_message(const TaskBundle& task);

/// The first fenced code block in a model reply, or the whole reply trimmed.
std::string extract_code(std::string_view reply);

std::string trim(std::string_view text);

}  // namespace explainloop
