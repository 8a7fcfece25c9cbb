#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "explainloop/error.hpp"

namespace explainloop::sql {

enum class TokenKind {
  Keyword,
  Identifier,
  QuotedIdentifier,
  String,
  Number,
  Parameter,
  Operator,
  LParen,
  RParen,
  Comma,
  Semicolon,
  Dot,
};

struct Token {
  TokenKind kind;
  std::string text;  // raw source text; keywords are lowercased
  std::size_t offset;
};

/// Splits SQL into tokens, dropping whitespace and comments. A quoted string
/// (single or double quotes) is a single token. Throws UnlexableInputError on
/// unterminated strings/comments or characters outside the SQL alphabet.
std::vector<Token> lex(std::string_view text, LexSide side = LexSide::Single);

/// Normalized edit units: the sequence over which edit actions are counted.
///
///   * whitespace and comments are gone, keywords are lowercase;
///   * commas and semicolons are separators, not units;
///   * "group by", "order by" and "partition by" are one unit each;
///   * a qualified name such as T1.state is one unit;
///   * a function call such as MAX(Percentage) is one unit, rendered with a
///     lowercase function name and normalized arguments.
std::vector<std::string> edit_units(std::string_view text, LexSide side = LexSide::Single);

/// Unit-cost Levenshtein distance between two unit sequences.
std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// True when the statement carries an ORDER BY outside every parenthesis,
/// i.e. its result order is part of the answer.
bool has_top_level_order_by(std::string_view text);

bool is_keyword(std::string_view lowercase_word);

}  // namespace explainloop::sql
