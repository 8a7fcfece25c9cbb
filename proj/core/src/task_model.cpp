#include "explainloop/task_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "explainloop/error.hpp"
#include "sqlite_handle.hpp"

namespace explainloop {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Language language) {
  return language == Language::Sql ? "sql" : "python";
}

std::string_view to_string(TaskOrigin origin) {
  switch (origin) {
    case TaskOrigin::SpiderStyle: return "spider";
    case TaskOrigin::MbppStyle: return "mbpp";
    case TaskOrigin::Custom: return "custom";
  }
  return "custom";
}

std::string_view to_string(DifficultyLevel level) {
  switch (level) {
    case DifficultyLevel::Easy: return "easy";
    case DifficultyLevel::Medium: return "medium";
    case DifficultyLevel::Hard: return "hard";
  }
  return "easy";
}

std::optional<Language> parse_language(std::string_view text) {
  if (text == "sql") return Language::Sql;
  if (text == "python") return Language::Python;
  return std::nullopt;
}

std::optional<TaskOrigin> parse_origin(std::string_view text) {
  if (text == "spider") return TaskOrigin::SpiderStyle;
  if (text == "mbpp") return TaskOrigin::MbppStyle;
  if (text == "custom") return TaskOrigin::Custom;
  return std::nullopt;
}

std::optional<DifficultyLevel> parse_difficulty(std::string_view text) {
  if (text == "easy") return DifficultyLevel::Easy;
  if (text == "medium") return DifficultyLevel::Medium;
  if (text == "hard") return DifficultyLevel::Hard;
  return std::nullopt;
}

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::set<std::string> database_tables(const fs::path& database, std::string& error) {
  std::set<std::string> tables;
  auto db = detail::open_read_only(database, error);
  if (!db) return tables;
  sqlite3_stmt* raw = nullptr;
  if (sqlite3_prepare_v2(db.get(),
                         "SELECT name FROM sqlite_master WHERE type = 'table' "
                         "AND name NOT LIKE 'sqlite_%'",
                         -1, &raw, nullptr) != SQLITE_OK) {
    error = sqlite3_errmsg(db.get());
    return tables;
  }
  detail::StmtHandle stmt(raw);
  while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
    tables.insert(reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0)));
  }
  return tables;
}

std::string id_from_json(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  return {};
}

std::string string_field(const json& record, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    auto it = record.find(name);
    if (it != record.end() && it->is_string()) return it->get<std::string>();
  }
  return {};
}

std::optional<DifficultyRating> parse_rating(const json& value, const std::string& task_id) {
  DifficultyRating rating;
  std::string level;
  if (value.is_string()) {
    level = value.get<std::string>();
  } else if (value.is_object()) {
    level = value.value("level", "");
    if (value.contains("edit_count")) rating.edit_count = value["edit_count"].get<std::size_t>();
    if (value.contains("changed_lines"))
      rating.changed_lines = value["changed_lines"].get<std::size_t>();
    rating.rationale = value.value("rationale", "");
  } else {
    throw MalformedTaskError(task_id, "difficulty must be a string or object");
  }
  auto parsed = parse_difficulty(level);
  if (!parsed) throw MalformedTaskError(task_id, "unknown difficulty '" + level + "'");
  rating.level = *parsed;
  if (rating.rationale.empty()) rating.rationale = "declared in manifest";
  return rating;
}

TaskBundle parse_record(const json& record, TaskOrigin origin, const fs::path& root,
                        std::size_t line_no) {
  if (!record.is_object()) {
    throw MalformedTaskError("line " + std::to_string(line_no), "record is not an object");
  }
  TaskBundle task;
  task.origin = origin;
  task.task_id = id_from_json(record.value("task_id", json()));
  if (task.task_id.empty()) {
    throw MalformedTaskError("line " + std::to_string(line_no), "missing task_id");
  }
  if (origin == TaskOrigin::MbppStyle && record["task_id"].is_number_integer()) {
    task.task_id = "mbpp-" + task.task_id;
  }

  std::string language = string_field(record, {"language"});
  if (language.empty()) {
    if (origin == TaskOrigin::SpiderStyle) language = "sql";
    if (origin == TaskOrigin::MbppStyle) language = "python";
  }
  auto lang = parse_language(language);
  if (!lang) throw MalformedTaskError(task.task_id, "unknown language '" + language + "'");
  task.language = *lang;

  task.question = string_field(record, {"question", "text"});
  task.gold_code = string_field(record, {"gold_code", "query", "code"});

  const json context = record.value("context", json::object());
  if (task.language == Language::Sql) {
    std::string rel = context.is_object() ? context.value("database", "") : "";
    if (rel.empty()) {
      std::string db_id = string_field(record, {"db_id"});
      if (!db_id.empty()) rel = "database/" + db_id + "/" + db_id + ".sqlite";
    }
    if (rel.empty()) throw MalformedTaskError(task.task_id, "sql task without a database");
    fs::path db = fs::path(rel).is_absolute() ? fs::path(rel) : root / rel;
    if (!fs::exists(db)) throw DanglingDatabaseRefError(task.task_id, db.string());
    task.context.database = db.lexically_normal();
    try {
      describe_database(task.context.database, task.context);
    } catch (const Error& e) {
      throw MalformedTaskError(task.task_id, e.what());
    }
  } else {
    json tests = context.is_object() && context.contains("tests") ? context["tests"]
                                                                  : record.value("test_list", json());
    std::string setup = string_field(record, {"test_setup_code"});
    if (tests.is_array()) {
      for (const auto& entry : tests) {
        TestCase tc;
        if (entry.is_string()) {
          tc.assertion = entry.get<std::string>();
        } else if (entry.is_object()) {
          tc.assertion = entry.value("assert", "");
          tc.expected = entry.value("expected", "");
        }
        if (blank(tc.assertion)) throw MalformedTaskError(task.task_id, "empty test case");
        if (!blank(setup)) tc.assertion = setup + "\n" + tc.assertion;
        if (tc.expected.empty()) tc.expected = expected_outcome_of(tc.assertion);
        task.context.test_cases.push_back(std::move(tc));
      }
    }
  }

  if (record.contains("difficulty") && !record["difficulty"].is_null()) {
    task.difficulty = parse_rating(record["difficulty"], task.task_id);
  }
  validate_task(task);
  return task;
}

}  // namespace

void validate_task(const TaskBundle& task) {
  if (task.task_id.empty()) throw MalformedTaskError("<unnamed>", "task_id is empty");
  if (blank(task.question)) throw MalformedTaskError(task.task_id, "question is empty");
  if (blank(task.gold_code)) throw MalformedTaskError(task.task_id, "gold_code is empty");
  if (task.language == Language::Sql) {
    if (task.context.database.empty()) {
      throw MalformedTaskError(task.task_id, "sql task without a database reference");
    }
    if (!fs::exists(task.context.database)) {
      throw DanglingDatabaseRefError(task.task_id, task.context.database.string());
    }
    std::string error;
    auto tables = database_tables(task.context.database, error);
    if (!error.empty()) throw MalformedTaskError(task.task_id, "database unreadable: " + error);
    for (const auto& sample : task.context.sample_rows) {
      if (sample.rows.size() > kSampleRowsPerTable) {
        throw MalformedTaskError(task.task_id, "more than 3 sample rows for " + sample.name);
      }
      if (!tables.count(sample.name)) {
        throw MalformedTaskError(task.task_id, "schema lists unknown table " + sample.name);
      }
    }
  } else if (task.context.test_cases.empty()) {
    throw MalformedTaskError(task.task_id, "python task without test cases");
  }
}

void describe_database(const fs::path& database, TaskContext& context) {
  std::string error;
  auto db = detail::open_read_only(database, error);
  if (!db) throw Error(ErrorCode::Io, "cannot open " + database.string() + ": " + error);

  auto prepare = [&](const std::string& sql) {
    sqlite3_stmt* raw = nullptr;
    if (sqlite3_prepare_v2(db.get(), sql.c_str(), -1, &raw, nullptr) != SQLITE_OK) {
      throw Error(ErrorCode::Io, database.string() + ": " + sqlite3_errmsg(db.get()));
    }
    return detail::StmtHandle(raw);
  };

  std::vector<std::string> names;
  {
    auto stmt = prepare(
        "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' "
        "ORDER BY rowid");
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      names.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0)));
    }
  }

  context.sample_rows.clear();
  context.schema_text.clear();
  for (const auto& name : names) {
    std::string quoted = "\"";
    for (char c : name) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';

    TableSample sample;
    sample.name = name;
    auto stmt = prepare("SELECT * FROM " + quoted + " LIMIT " +
                        std::to_string(kSampleRowsPerTable));
    int cols = sqlite3_column_count(stmt.get());
    for (int c = 0; c < cols; ++c) sample.columns.emplace_back(sqlite3_column_name(stmt.get(), c));
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      SqlRow row;
      for (int c = 0; c < cols; ++c) row.push_back(detail::column_value(stmt.get(), c));
      sample.rows.push_back(std::move(row));
    }

    context.schema_text += "Table " + name + "(";
    for (std::size_t c = 0; c < sample.columns.size(); ++c) {
      if (c) context.schema_text += ", ";
      context.schema_text += sample.columns[c];
    }
    context.schema_text += ")\n";
    context.sample_rows.push_back(std::move(sample));
  }
}

std::string expected_outcome_of(std::string_view assertion) {
  auto pos = assertion.rfind("==");
  if (pos == std::string_view::npos) return "assertion holds";
  std::string_view rhs = assertion.substr(pos + 2);
  auto first = rhs.find_first_not_of(" \t");
  auto last = rhs.find_last_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "assertion holds";
  return std::string(rhs.substr(first, last - first + 1));
}

std::string render_context(const TaskBundle& task) {
  std::string out;
  if (task.language == Language::Sql) {
    for (const auto& table : task.context.sample_rows) {
      out += "Table " + table.name + "(";
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ", ";
        out += table.columns[c];
      }
      out += ")\n";
      for (const auto& row : table.rows) out += "  " + render_sql_row(row) + "\n";
    }
  } else {
    for (const auto& tc : task.context.test_cases) out += tc.assertion + "\n";
  }
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

const TaskBundle* find_task(const std::vector<TaskBundle>& corpus, std::string_view task_id) {
  for (const auto& task : corpus) {
    if (task.task_id == task_id) return &task;
  }
  return nullptr;
}

std::vector<TaskBundle> load_corpus(const fs::path& path, TaskOrigin origin) {
  fs::path manifest = fs::is_directory(path) ? path / "manifest.jsonl" : path;
  if (!fs::is_regular_file(manifest)) {
    throw Error(ErrorCode::MissingManifest, "no manifest at " + manifest.string());
  }
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::MissingManifest, "cannot read " + manifest.string());

  fs::path root = manifest.parent_path();
  std::vector<TaskBundle> tasks;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedTaskError("line " + std::to_string(line_no), e.what());
    }
    TaskBundle task = parse_record(record, origin, root, line_no);
    if (!seen.insert(task.task_id).second) {
      throw MalformedTaskError(task.task_id, "duplicate task_id");
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

}  // namespace explainloop
