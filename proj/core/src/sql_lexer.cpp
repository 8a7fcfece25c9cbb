#include "explainloop/sql_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace explainloop::sql {

namespace {

constexpr std::string_view kKeywords[] = {
    "abort", "action", "add", "after", "all", "alter", "always", "analyze", "and", "as",
    "asc", "attach", "autoincrement", "before", "begin", "between", "by", "cascade", "case",
    "cast", "check", "collate", "column", "commit", "conflict", "constraint", "create",
    "cross", "current", "current_date", "current_time", "current_timestamp", "database",
    "default", "deferrable", "deferred", "delete", "desc", "detach", "distinct", "do",
    "drop", "each", "else", "end", "escape", "except", "exclude", "exclusive", "exists",
    "explain", "fail", "filter", "first", "following", "for", "foreign", "from", "full",
    "generated", "glob", "group", "groups", "having", "if", "ignore", "immediate", "in",
    "index", "indexed", "initially", "inner", "insert", "instead", "intersect", "into",
    "is", "isnull", "join", "key", "last", "left", "like", "limit", "match", "materialized",
    "natural", "no", "not", "nothing", "notnull", "null", "nulls", "of", "offset", "on",
    "or", "order", "others", "outer", "over", "partition", "plan", "pragma", "preceding",
    "primary", "query", "raise", "range", "recursive", "references", "regexp", "reindex",
    "release", "rename", "replace", "restrict", "returning", "right", "rollback", "row",
    "rows", "savepoint", "select", "set", "table", "temp", "temporary", "then", "ties",
    "to", "transaction", "trigger", "unbounded", "union", "unique", "update", "using",
    "vacuum", "values", "view", "virtual", "when", "where", "window", "with", "without",
};

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

class Lexer {
 public:
  Lexer(std::string_view text, LexSide side) : text_(text), side_(side) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    return out;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& why) const {
    throw UnlexableInputError(side_, at, why);
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      unsigned char c = text_[pos_];
      if (std::isspace(c)) {
        ++pos_;
      } else if (c == '-' && peek(1) == '-') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '/' && peek(1) == '*') {
        std::size_t start = pos_;
        auto close = text_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) fail(start, "unterminated block comment");
        pos_ = close + 2;
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, std::size_t start) {
    return Token{kind, std::string(text_.substr(start, pos_ - start)), start};
  }

  void scan_quoted(char quote, std::size_t start, const char* what) {
    ++pos_;
    while (true) {
      if (pos_ >= text_.size()) fail(start, std::string("unterminated ") + what);
      if (text_[pos_] == quote) {
        if (peek(1) == quote) {
          pos_ += 2;
          continue;
        }
        ++pos_;
        return;
      }
      ++pos_;
    }
  }

  Token next() {
    std::size_t start = pos_;
    unsigned char c = text_[pos_];

    if (c == '\'' || c == '"') {
      scan_quoted(static_cast<char>(c), start, "string literal");
      return make(TokenKind::String, start);
    }
    if (c == '`') {
      scan_quoted('`', start, "quoted identifier");
      return make(TokenKind::QuotedIdentifier, start);
    }
    if (c == '[') {
      auto close = text_.find(']', pos_);
      if (close == std::string_view::npos) fail(start, "unterminated quoted identifier");
      pos_ = close + 1;
      return make(TokenKind::QuotedIdentifier, start);
    }
    if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      scan_number();
      return make(TokenKind::Number, start);
    }
    if (is_ident_start(c)) {
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      Token t = make(TokenKind::Identifier, start);
      std::string lower = to_lower(t.text);
      if (is_keyword(lower)) {
        t.kind = TokenKind::Keyword;
        t.text = std::move(lower);
      }
      return t;
    }
    if (c == '?') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return make(TokenKind::Parameter, start);
    }
    if ((c == ':' || c == '@' || c == '$') && is_ident_start(peek(1))) {
      ++pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      return make(TokenKind::Parameter, start);
    }

    switch (c) {
      case '(': ++pos_; return make(TokenKind::LParen, start);
      case ')': ++pos_; return make(TokenKind::RParen, start);
      case ',': ++pos_; return make(TokenKind::Comma, start);
      case ';': ++pos_; return make(TokenKind::Semicolon, start);
      case '.': ++pos_; return make(TokenKind::Dot, start);
      default: break;
    }

    static constexpr std::array<std::string_view, 9> kTwoChar = {
        "||", "<<", ">>", "<=", ">=", "==", "!=", "<>", "->"};
    for (auto op : kTwoChar) {
      if (text_.substr(pos_, 2) == op) {
        pos_ += 2;
        if (op == "->" && peek() == '>') ++pos_;
        return make(TokenKind::Operator, start);
      }
    }
    static constexpr std::string_view kOneChar = "*/%+-&|<>=~";
    if (kOneChar.find(static_cast<char>(c)) != std::string_view::npos) {
      ++pos_;
      return make(TokenKind::Operator, start);
    }
    fail(start, std::string("unexpected character '") + static_cast<char>(c) + "'");
  }

  void scan_number() {
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      pos_ += 2;
      while (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return;
    }
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = save;
        return;
      }
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
  }

  std::string_view text_;
  LexSide side_;
  std::size_t pos_ = 0;
};

bool is_name(const Token& t) {
  return t.kind == TokenKind::Identifier || t.kind == TokenKind::QuotedIdentifier;
}

class UnitBuilder {
 public:
  UnitBuilder(const std::vector<Token>& tokens, LexSide side) : toks_(tokens), side_(side) {}

  std::vector<std::string> run() {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < toks_.size()) {
      const Token& t = toks_[i];
      if (t.kind == TokenKind::Comma || t.kind == TokenKind::Semicolon) {
        ++i;
        continue;
      }
      out.push_back(unit_at(i));
    }
    return out;
  }

 private:
  // Renders the unit starting at i and advances i past it.
  std::string unit_at(std::size_t& i) {
    const Token& t = toks_[i];
    if (t.kind == TokenKind::Keyword &&
        (t.text == "group" || t.text == "order" || t.text == "partition") &&
        i + 1 < toks_.size() && toks_[i + 1].kind == TokenKind::Keyword &&
        toks_[i + 1].text == "by") {
      i += 2;
      return t.text + " by";
    }
    if (is_name(t)) {
      if (i + 1 < toks_.size() && toks_[i + 1].kind == TokenKind::LParen &&
          t.kind == TokenKind::Identifier) {
        return function_call(i);
      }
      std::string name = t.text;
      ++i;
      while (i + 1 < toks_.size() && toks_[i].kind == TokenKind::Dot &&
             (is_name(toks_[i + 1]) ||
              (toks_[i + 1].kind == TokenKind::Operator && toks_[i + 1].text == "*"))) {
        name += "." + toks_[i + 1].text;
        i += 2;
      }
      return name;
    }
    ++i;
    return t.text;
  }

  std::string function_call(std::size_t& i) {
    std::string out = to_lower(toks_[i].text) + "(";
    std::size_t open = i + 1;
    int depth = 1;
    std::size_t j = open + 1;
    for (; j < toks_.size(); ++j) {
      const Token& t = toks_[j];
      if (t.kind == TokenKind::LParen) {
        ++depth;
      } else if (t.kind == TokenKind::RParen && --depth == 0) {
        break;
      }
      char last = out.back();
      bool glue = last == '(' || last == '.' || last == ',' || t.kind == TokenKind::RParen ||
                  t.kind == TokenKind::Dot || t.kind == TokenKind::Comma ||
                  (t.kind == TokenKind::LParen && toks_[j - 1].kind == TokenKind::Identifier);
      if (!glue) out += ' ';
      bool callee = t.kind == TokenKind::Identifier && j + 1 < toks_.size() &&
                    toks_[j + 1].kind == TokenKind::LParen;
      out += callee ? to_lower(t.text) : t.text;
    }
    if (j >= toks_.size()) {
      throw UnlexableInputError(side_, toks_[open].offset, "unbalanced parenthesis");
    }
    i = j + 1;
    return out + ")";
  }

  const std::vector<Token>& toks_;
  LexSide side_;
};

}  // namespace

bool is_keyword(std::string_view lowercase_word) {
  return std::find(std::begin(kKeywords), std::end(kKeywords), lowercase_word) != std::end(kKeywords);
}

std::vector<Token> lex(std::string_view text, LexSide side) {
  return Lexer(text, side).run();
}

std::vector<std::string> edit_units(std::string_view text, LexSide side) {
  auto tokens = lex(text, side);
  return UnitBuilder(tokens, side).run();
}

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t replace = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, replace});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool has_top_level_order_by(std::string_view text) {
  std::vector<Token> tokens;
  try {
    tokens = lex(text);
  } catch (const UnlexableInputError&) {
    return false;
  }
  int depth = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind == TokenKind::LParen) ++depth;
    else if (t.kind == TokenKind::RParen) --depth;
    else if (depth == 0 && t.kind == TokenKind::Keyword && t.text == "order" &&
             i + 1 < tokens.size() && tokens[i + 1].text == "by") {
      return true;
    }
  }
  return false;
}

}  // namespace explainloop::sql
