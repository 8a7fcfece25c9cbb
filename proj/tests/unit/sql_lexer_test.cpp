#include <gtest/gtest.h>

#include <functional>
#include <map>

#include "explainloop/error.hpp"
#include "explainloop/sql_lexer.hpp"
#include "explainloop/task_model.hpp"

using namespace explainloop;

namespace {

// Plain recursive edit distance; exponential, fine for short hand-written units.
std::size_t brute_force_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
    std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    return memo[{i, j}] = best;
  };
  return go(0, 0);
}

struct HandPair {
  std::string predicted;
  std::string gold;
  std::vector<std::string> predicted_units;
  std::vector<std::string> gold_units;
};

const std::vector<HandPair>& hand_pairs() {
  static const std::vector<HandPair> pairs = {
      {"SELECT ID, grade FROM Highschooler", "SELECT grade FROM Highschooler",
       {"select", "ID", "grade", "from", "Highschooler"},
       {"select", "grade", "from", "Highschooler"}},
      {"SELECT COUNT(*) FROM countrylanguage WHERE IsOfficial='T'",
       "SELECT COUNT(*), MAX(Percentage) FROM countrylanguage WHERE LANGUAGE=\"Spanish\" GROUP BY CountryCode",
       {"select", "count(*)", "from", "countrylanguage", "where", "IsOfficial", "=", "'T'"},
       {"select", "count(*)", "max(Percentage)", "from", "countrylanguage", "where", "LANGUAGE", "=",
        "\"Spanish\"", "group by", "CountryCode"}},
      {"SELECT state FROM votes AS T1 GROUP BY state ORDER BY count(*) DESC LIMIT 1",
       "SELECT area_code FROM votes AS T1 JOIN area_code_state AS T2 ON T1.state = T2.state "
       "GROUP BY area_code ORDER BY count(*) DESC LIMIT 1",
       {"select", "state", "from", "votes", "as", "T1", "group by", "state", "order by", "count(*)",
        "desc", "limit", "1"},
       {"select", "area_code", "from", "votes", "as", "T1", "join", "area_code_state", "as", "T2",
        "on", "T1.state", "=", "T2.state", "group by", "area_code", "order by", "count(*)", "desc",
        "limit", "1"}},
  };
  return pairs;
}

}  // namespace

TEST(SqlLexer, KeywordsLowercasedAndStringsAreSingleTokens) {
  auto tokens = sql::lex("Select name FROM t WHERE x = 'a b' -- trailing\n");
  ASSERT_EQ(tokens.size(), 8u);
  EXPECT_EQ(tokens[0].text, "select");
  EXPECT_EQ(tokens[0].kind, sql::TokenKind::Keyword);
  EXPECT_EQ(tokens[1].text, "name");
  EXPECT_EQ(tokens[7].text, "'a b'");
  EXPECT_EQ(tokens[7].kind, sql::TokenKind::String);
}

TEST(SqlLexer, UnterminatedStringReportsSideAndOffset) {
  try {
    sql::lex("SELECT 'abc", LexSide::Gold);
    FAIL() << "expected UnlexableInput";
  } catch (const UnlexableInputError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnlexableInput);
    EXPECT_EQ(e.which(), LexSide::Gold);
    EXPECT_EQ(e.position(), 7u);
  }
}

TEST(SqlLexer, EditUnitsMatchHandTokenization) {
  for (const auto& p : hand_pairs()) {
    EXPECT_EQ(sql::edit_units(p.predicted), p.predicted_units) << p.predicted;
    EXPECT_EQ(sql::edit_units(p.gold), p.gold_units) << p.gold;
  }
}

TEST(SqlLexer, EditCountAgreesWithBruteForceOracle) {
  for (const auto& p : hand_pairs()) {
    std::size_t oracle = brute_force_distance(p.predicted_units, p.gold_units);
    EXPECT_EQ(sql_edit_count(p.predicted, p.gold), oracle) << p.predicted;
  }
}

TEST(SqlLexer, SampleTableValues) {
  const auto& pairs = hand_pairs();
  EXPECT_EQ(sql_edit_count(pairs[0].predicted, pairs[0].gold), 1u);
  EXPECT_EQ(sql_edit_count(pairs[1].predicted, pairs[1].gold), 5u);
  EXPECT_EQ(sql_edit_count(pairs[2].predicted, pairs[2].gold), 10u);
}

TEST(SqlLexer, EditCountIsSymmetricAndZeroOnIdentity) {
  for (const auto& p : hand_pairs()) {
    EXPECT_EQ(sql_edit_count(p.predicted, p.gold), sql_edit_count(p.gold, p.predicted));
    EXPECT_EQ(sql_edit_count(p.gold, p.gold), 0u);
  }
}

TEST(SqlLexer, WhitespaceCaseAndCommentsDoNotCount) {
  EXPECT_EQ(sql_edit_count("select  name\nfrom singer /* c */;", "SELECT name FROM singer"), 0u);
}

TEST(SqlLexer, TriangleInequalityOnQueryPool) {
  const std::vector<std::string> pool = {
      "SELECT name FROM singer",
      "SELECT name FROM singer WHERE age > 20",
      "SELECT name, age FROM singer",
      "SELECT count(*) FROM singer",
      "SELECT DISTINCT country FROM singer",
      "SELECT name FROM singer ORDER BY age",
      "SELECT avg(age) FROM singer GROUP BY country",
      "SELECT T1.name FROM singer AS T1 JOIN concert AS T2 ON T1.id = T2.singer_id",
      "SELECT name FROM singer WHERE age < 20 LIMIT 1",
      "SELECT max(age), min(age) FROM singer",
  };
  for (const auto& a : pool)
    for (const auto& b : pool)
      for (const auto& c : pool)
        EXPECT_LE(sql_edit_count(a, c), sql_edit_count(a, b) + sql_edit_count(b, c));
}

TEST(SqlLexer, LevenshteinMatchesOracleOnUnitLists) {
  std::vector<std::string> a = {"a", "b", "c", "d"};
  std::vector<std::string> b = {"b", "c", "e", "d", "f"};
  EXPECT_EQ(sql::levenshtein(a, b), brute_force_distance(a, b));
  EXPECT_EQ(sql::levenshtein({}, b), b.size());
}

TEST(SqlLexer, TopLevelOrderBy) {
  EXPECT_TRUE(sql::has_top_level_order_by("SELECT a FROM t ORDER BY a"));
  EXPECT_FALSE(sql::has_top_level_order_by("SELECT a FROM (SELECT a FROM t ORDER BY a LIMIT 3)"));
  EXPECT_FALSE(sql::has_top_level_order_by("SELECT 'order by' FROM t"));
}

TEST(SqlLexer, UnlexableInputPropagatesFromEditCount) {
  EXPECT_THROW(sql_edit_count("SELECT 'x", "SELECT 1"), UnlexableInputError);
}
