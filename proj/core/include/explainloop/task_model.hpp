#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "explainloop/sql_value.hpp"

namespace explainloop {

enum class Language { Sql, Python };
enum class TaskOrigin { SpiderStyle, MbppStyle, Custom };
enum class DifficultyLevel { Easy, Medium, Hard };

std::string_view to_string(Language language);
std::string_view to_string(TaskOrigin origin);
std::string_view to_string(DifficultyLevel level);
std::optional<Language> parse_language(std::string_view text);
std::optional<TaskOrigin> parse_origin(std::string_view text);
std::optional<DifficultyLevel> parse_difficulty(std::string_view text);

struct DifficultyRating {
  DifficultyLevel level = DifficultyLevel::Easy;
  std::optional<std::size_t> edit_count;     // Sql
  std::optional<std::size_t> changed_lines;  // Python
  std::string rationale;

  bool operator==(const DifficultyRating&) const = default;
};

struct TableSample {
  std::string name;
  std::vector<std::string> columns;
  std::vector<SqlRow> rows;  // at most kSampleRowsPerTable

  bool operator==(const TableSample&) const = default;
};

inline constexpr std::size_t kSampleRowsPerTable = 3;

struct TestCase {
  std::string assertion;
  std::string expected;  // human-readable expected outcome

  bool operator==(const TestCase&) const = default;
};

/// Sql tasks carry a database reference plus the rendered schema; Python tasks
/// carry their assertion list. Only the half matching the task language is set.
struct TaskContext {
  std::filesystem::path database;
  std::string schema_text;
  std::vector<TableSample> sample_rows;
  std::vector<TestCase> test_cases;

  bool operator==(const TaskContext&) const = default;
};

struct TaskBundle {
  std::string task_id;
  Language language = Language::Sql;
  std::string question;
  TaskContext context;
  std::string gold_code;
  std::optional<DifficultyRating> difficulty;
  TaskOrigin origin = TaskOrigin::Custom;

  bool operator==(const TaskBundle&) const = default;
};

/// Checks the bundle invariants; throws MalformedTaskError naming the first
/// violated one.
void validate_task(const TaskBundle& task);

/// Reads `<path>/manifest.jsonl` (or `path` itself when it names a file).
/// Tasks come back in manifest order, validated, with Sql schema listings and
/// sample rows rendered from the referenced database.
std::vector<TaskBundle> load_corpus(const std::filesystem::path& path, TaskOrigin origin);

/// Renders "Table name(col, ...)" lines followed by up to three sample rows
/// for every table in the database.
void describe_database(const std::filesystem::path& database, TaskContext& context);

/// Extracts the expected value from an `assert f(x) == y` line; falls back to
/// "assertion holds".
std::string expected_outcome_of(std::string_view assertion);

/// Renders the task context the way the user sees it in the context panel and
/// the way prompts embed it.
std::string render_context(const TaskBundle& task);

const TaskBundle* find_task(const std::vector<TaskBundle>& corpus, std::string_view task_id);

// Difficulty model ----------------------------------------------------------

/// Minimum number of unit insert/delete/replace actions turning `predicted`
/// into `gold`.
std::size_t sql_edit_count(std::string_view predicted, std::string_view gold);

DifficultyLevel sql_level_for_edits(std::size_t edit_count);

/// Lines that differ between two programs (blank lines and trailing whitespace
/// ignored); a replaced line counts once.
std::size_t python_changed_lines(std::string_view predicted, std::string_view gold);

DifficultyRating classify_difficulty(const TaskBundle& task, std::string_view predicted);

}  // namespace explainloop
