#include <gtest/gtest.h>

#include <fstream>

#include "explainloop/error.hpp"
#include "explainloop/json_codec.hpp"
#include "fixtures.hpp"

using namespace explainloop;
using namespace explainloop::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("explainloop-task-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(TaskModel, FixtureCorporaLoadInManifestOrder) {
  ASSERT_GE(sql_corpus().size(), 20u);
  ASSERT_GE(python_corpus().size(), 20u);
  EXPECT_EQ(sql_corpus().front().task_id, "sql-001");
  EXPECT_EQ(python_corpus().front().task_id, "mbpp-1");
  for (const auto& t : full_corpus()) EXPECT_NO_THROW(validate_task(t)) << t.task_id;
}

TEST(TaskModel, RoundingTaskHasTestCases) {
  const auto& t = task("mbpp-1");
  EXPECT_EQ(t.language, Language::Python);
  EXPECT_EQ(t.question,
            "Write a function to round the given number to the nearest multiple of a specific number.");
  ASSERT_GE(t.context.test_cases.size(), 1u);
  EXPECT_EQ(t.context.test_cases[0].expected, "4720");
  EXPECT_EQ(t.difficulty->level, DifficultyLevel::Easy);
}

TEST(TaskModel, SqlContextCarriesAtMostThreeSampleRows) {
  const auto& t = task("sql-001");
  ASSERT_FALSE(t.context.sample_rows.empty());
  for (const auto& table : t.context.sample_rows) EXPECT_LE(table.rows.size(), kSampleRowsPerTable);
  EXPECT_NE(t.context.schema_text.find("Table Highschooler("), std::string::npos);
  std::string ctx = render_context(t);
  EXPECT_NE(ctx.find("Table Highschooler(ID, name, grade)"), std::string::npos);
}

TEST(TaskModel, EmptyManifestGivesEmptyCorpus) {
  auto dir = scratch_dir("empty");
  std::ofstream(dir / "manifest.jsonl") << "";
  EXPECT_TRUE(load_corpus(dir, TaskOrigin::Custom).empty());
}

TEST(TaskModel, MissingManifest) {
  auto dir = scratch_dir("missing");
  try {
    load_corpus(dir, TaskOrigin::Custom);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingManifest);
  }
}

TEST(TaskModel, DanglingDatabaseReference) {
  auto dir = scratch_dir("dangling");
  std::ofstream(dir / "manifest.jsonl")
      << R"({"task_id": "x", "language": "sql", "question": "q?", "gold_code": "SELECT 1", "context": {"database": "nope.sqlite"}})"
      << "\n";
  try {
    load_corpus(dir, TaskOrigin::Custom);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DanglingDatabaseRef);
  }
}

TEST(TaskModel, MalformedRecords) {
  auto dir = scratch_dir("malformed");
  std::ofstream(dir / "manifest.jsonl")
      << R"({"task_id": "p", "language": "python", "question": "", "gold_code": "x = 1", "context": {"test_cases": ["assert x == 1"]}})"
      << "\n";
  try {
    load_corpus(dir, TaskOrigin::Custom);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedTask);
  }
}

TEST(TaskModel, ValidateRejectsPythonTaskWithoutCases) {
  TaskBundle t = task("mbpp-1");
  t.context.test_cases.clear();
  EXPECT_THROW(validate_task(t), MalformedTaskError);
}

TEST(TaskModel, ExpectedOutcomeFromAssertion) {
  EXPECT_EQ(expected_outcome_of("assert f(1) == [1, 2]"), "[1, 2]");
  EXPECT_EQ(expected_outcome_of("assert f(1)"), "assertion holds");
}

TEST(TaskModel, TaskJsonMatchesGolden) {
  std::string text = task_to_json(task("sql-017")).dump(2) + "\n" +
                     task_to_json(task("mbpp-1")).dump(2) + "\n";
  EXPECT_EQ(golden_mismatch("api_task.json", text), "");
  EXPECT_EQ(text.find("gold_code"), std::string::npos);
}
