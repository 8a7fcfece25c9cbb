#include <algorithm>
#include <cctype>
#include <sstream>

#include "explainloop/error.hpp"
#include "explainloop/sql_lexer.hpp"
#include "explainloop/task_model.hpp"

namespace explainloop {

namespace {

std::vector<std::string> significant_lines(std::string_view code) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(code)};
  std::string line;
  while (std::getline(in, line)) {
    auto end = line.find_last_not_of(" \t\r");
    if (end == std::string::npos) continue;
    line.erase(end + 1);
    lines.push_back(line);
  }
  return lines;
}

std::size_t indent_of(const std::string& line) {
  std::size_t n = 0;
  for (char c : line) {
    if (c == ' ') ++n;
    else if (c == '\t') n += 4;
    else break;
  }
  return n;
}

bool starts_with_word(std::string_view text, std::string_view word) {
  return text.size() > word.size() && text.substr(0, word.size()) == word &&
         (text[word.size()] == ' ' || text[word.size()] == '(');
}

std::size_t max_loop_depth(const std::vector<std::string>& lines) {
  std::vector<std::size_t> open;  // indents of enclosing loops
  std::size_t best = 0;
  for (const auto& line : lines) {
    std::size_t indent = indent_of(line);
    std::string_view body = std::string_view(line).substr(line.find_first_not_of(" \t"));
    if (body.front() == '#') continue;
    while (!open.empty() && indent <= open.back()) open.pop_back();
    if (starts_with_word(body, "for") || starts_with_word(body, "while")) {
      open.push_back(indent);
      best = std::max(best, open.size());
    }
  }
  return best;
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_recursive(const std::vector<std::string>& lines) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    auto def = line.find("def ");
    if (def == std::string::npos || line.find_first_not_of(" \t") != def) continue;
    auto open = line.find('(', def);
    if (open == std::string::npos) continue;
    std::string name = line.substr(def + 4, open - def - 4);
    name.erase(std::remove(name.begin(), name.end(), ' '), name.end());
    std::size_t def_indent = indent_of(line);
    for (std::size_t j = i + 1; j < lines.size() && indent_of(lines[j]) > def_indent; ++j) {
      const auto& body = lines[j];
      for (auto pos = body.find(name + "("); pos != std::string::npos;
           pos = body.find(name + "(", pos + 1)) {
        if (pos == 0 || (!is_ident_char(body[pos - 1]) && body[pos - 1] != '.')) return true;
      }
    }
  }
  return false;
}

}  // namespace

std::size_t sql_edit_count(std::string_view predicted, std::string_view gold) {
  auto pred_units = sql::edit_units(predicted, LexSide::Predicted);
  auto gold_units = sql::edit_units(gold, LexSide::Gold);
  return sql::levenshtein(pred_units, gold_units);
}

DifficultyLevel sql_level_for_edits(std::size_t edit_count) {
  if (edit_count <= 2) return DifficultyLevel::Easy;
  if (edit_count <= 5) return DifficultyLevel::Medium;
  return DifficultyLevel::Hard;
}

std::size_t python_changed_lines(std::string_view predicted, std::string_view gold) {
  auto a = significant_lines(predicted);
  auto b = significant_lines(gold);
  std::vector<std::vector<std::size_t>> lcs(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = a.size(); i-- > 0;) {
    for (std::size_t j = b.size(); j-- > 0;) {
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::size_t common = lcs[0][0];
  return std::max(a.size() - common, b.size() - common);
}

DifficultyRating classify_difficulty(const TaskBundle& task, std::string_view predicted) {
  if (task.gold_code.empty()) {
    throw Error(ErrorCode::PreconditionViolated, "task " + task.task_id + " has no gold code");
  }
  DifficultyRating rating;
  if (task.language == Language::Sql) {
    std::size_t edits = sql_edit_count(predicted, task.gold_code);
    rating.edit_count = edits;
    rating.level = sql_level_for_edits(edits);
    rating.rationale = std::to_string(edits) + " edit action(s) from prediction to gold";
    return rating;
  }

  std::size_t changed = python_changed_lines(predicted, task.gold_code);
  rating.changed_lines = changed;
  auto pred_lines = significant_lines(predicted);
  auto gold_lines = significant_lines(task.gold_code);
  std::size_t pred_depth = max_loop_depth(pred_lines);
  std::size_t gold_depth = max_loop_depth(gold_lines);
  bool pred_rec = is_recursive(pred_lines);
  bool gold_rec = is_recursive(gold_lines);

  std::string markers;
  if (gold_depth >= pred_depth + 2) {
    markers += "; loop nesting grows from " + std::to_string(pred_depth) + " to " +
               std::to_string(gold_depth);
  }
  if (pred_rec != gold_rec) {
    markers += gold_rec ? "; recursion introduced" : "; recursion removed";
  }

  if (!markers.empty() || changed > 5) rating.level = DifficultyLevel::Hard;
  else if (changed >= 3) rating.level = DifficultyLevel::Medium;
  else rating.level = DifficultyLevel::Easy;
  rating.rationale = std::to_string(changed) + " changed line(s)" + markers;
  return rating;
}

}  // namespace explainloop
