#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "explainloop/error.hpp"
#include "fixtures.hpp"

using namespace explainloop;
using namespace explainloop::testing;

namespace {

double population_sd(const std::vector<double>& xs) {
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

ErrorCode annotation_error(const std::string& text) {
  try {
    parse_annotations(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST(Metrics, TenSessionLog) {
  auto logs = synthetic_ten_session_log();
  auto r = compute_metrics(logs, full_corpus());
  EXPECT_EQ(r.n_sessions, 10u);
  EXPECT_EQ(r.excluded_count, 1u);
  EXPECT_EQ(r.incomplete_count, 0u);
  EXPECT_EQ(r.overall.sessions, 9u);
  EXPECT_EQ(r.overall.successes, 3u);
  EXPECT_NEAR(*r.overall.success_rate, 1.0 / 3.0, 1e-4);

  std::vector<double> successes, times;
  for (const auto& s : logs) {
    if (s.terminal->kind == TerminalKind::SkipUnclear) continue;
    successes.push_back(session_succeeded(s) ? 1.0 : 0.0);
    times.push_back(static_cast<double>(s.terminal->elapsed_ms));
  }
  EXPECT_NEAR(*r.overall.success_sd, population_sd(successes), 1e-12);
  EXPECT_NEAR(*r.overall.time_sd_ms, population_sd(times), 1e-9);
  double mean_time = 0;
  for (double t : times) mean_time += t;
  EXPECT_NEAR(*r.overall.avg_time_ms, mean_time / 9.0, 1e-9);
}

TEST(Metrics, PerDifficultyGroupsFollowTaskRatings) {
  auto logs = synthetic_ten_session_log();
  auto r = compute_metrics(logs, full_corpus());
  std::array<std::size_t, 3> expected{};
  for (const auto& s : logs) {
    if (s.terminal->kind == TerminalKind::SkipUnclear) continue;
    ++expected[static_cast<std::size_t>(task(s.task_id).difficulty->level)];
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.per_difficulty[i].sessions, expected[i]);
}

TEST(Metrics, OrderIndependent) {
  auto logs = synthetic_ten_session_log();
  auto base = compute_metrics(logs, full_corpus());
  std::mt19937 rng(7);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(logs.begin(), logs.end(), rng);
    EXPECT_EQ(compute_metrics(logs, full_corpus()), base);
  }
}

TEST(Metrics, ExcludedAndIncompleteAreCountedSeparately) {
  auto logs = synthetic_ten_session_log();
  logs[3].terminal.reset();
  auto r = compute_metrics(logs, full_corpus());
  EXPECT_EQ(r.incomplete_count, 1u);
  EXPECT_EQ(r.overall.sessions, 8u);
}

TEST(Metrics, SkipsAndTimeoutsAreFailuresEvenWithSuccessfulVerdicts) {
  auto s = synthetic_session("x", "sql-001", TerminalKind::Timeout, true, 300000);
  EXPECT_FALSE(session_succeeded(s));
  s.terminal->kind = TerminalKind::SkipUnsolvable;
  EXPECT_FALSE(session_succeeded(s));
  s.terminal->kind = TerminalKind::CompletedByUser;
  EXPECT_TRUE(session_succeeded(s));
}

TEST(Metrics, UnknownTaskIsRejected) {
  std::vector<TranscriptSession> logs{
      synthetic_session("x", "sql-999", TerminalKind::CompletedByUser, true, 1000)};
  try {
    compute_metrics(logs, full_corpus());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownTask);
  }
}

TEST(Report, EmptyInputHasHeaderOnly) {
  auto r = compute_metrics({}, full_corpus());
  EXPECT_FALSE(r.overall.success_rate.has_value());
  EXPECT_EQ(render_report(r, ReportFormat::DelimitedText),
            "group\tsessions\tsuccesses\tsuccess_rate\tsuccess_sd\tavg_time_ms\ttime_sd_ms\n");
  EXPECT_EQ(render_report(r, ReportFormat::PlainTable).find('\n'),
            render_report(r, ReportFormat::PlainTable).size() - 1);
}

TEST(Report, GoldenTableAndTsv) {
  auto r = compute_metrics(synthetic_ten_session_log(), full_corpus());
  auto table = render_report(r, ReportFormat::PlainTable);
  auto tsv = render_report(r, ReportFormat::DelimitedText);
  EXPECT_EQ(golden_mismatch("report_synthetic.txt", table), "");
  EXPECT_EQ(golden_mismatch("report_synthetic.tsv", tsv), "");
  EXPECT_NE(table.find("overall   9         33.3% \xC2\xB1 47.1%"), std::string::npos) << table;
}

TEST(Report, FormatNames) {
  EXPECT_EQ(parse_report_format("tsv"), ReportFormat::DelimitedText);
  EXPECT_EQ(parse_report_format("table"), ReportFormat::PlainTable);
  EXPECT_FALSE(parse_report_format("csv"));
}

TEST(Annotations, ParseAndValidate) {
  auto a = parse_annotations(
      R"({"session_id":"s01","turn_index":0,"kind":"self_debug","accurate":true,"complete":false,"annotator":"r1"})"
      "\n\n"
      R"({"session_id":"s02","turn_index":0,"kind":"question_rephrasing"})");
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].kind, FeedbackKind::SelfDebug);
  EXPECT_EQ(a[0].complete, false);
  EXPECT_EQ(a[0].annotator, "r1");
  EXPECT_FALSE(a[1].accurate.has_value());

  EXPECT_EQ(annotation_error(R"({"session_id":"s","turn_index":0,"kind":"praise"})"),
            ErrorCode::PreconditionViolated);
  EXPECT_EQ(annotation_error(R"({"session_id":"s","turn_index":0,"kind":"self_debug","accurate":false,"complete":true})"),
            ErrorCode::PreconditionViolated);
  EXPECT_EQ(annotation_error("{"), ErrorCode::PreconditionViolated);
}

TEST(FeedbackStats, KindCountsOncePerSession) {
  auto logs = synthetic_ten_session_log();
  using K = FeedbackKind;
  std::vector<FeedbackAnnotation> ann{
      {"s01", 0, K::InstructionForErrorCorrection, true, true, "a"},
      {"s01", 0, K::InstructionForErrorCorrection, true, false, "a"},
      {"s02", 0, K::InstructionForErrorCorrection, false, std::nullopt, "a"},
      {"s04", 0, K::SelfDebug, true, std::nullopt, "a"},
      {"s05", 0, K::QuestionRephrasing, std::nullopt, std::nullopt, "a"},
  };
  auto stats = feedback_stats(ann, logs);
  ASSERT_EQ(stats.size(), 3u);
  EXPECT_EQ(stats[0].kind, K::InstructionForErrorCorrection);
  EXPECT_EQ(stats[0].sessions_with_kind, 2u);
  EXPECT_DOUBLE_EQ(*stats[0].frequency, 2.0 / 4.0);
  EXPECT_EQ(stats[0].judged, 3u);
  EXPECT_DOUBLE_EQ(*stats[0].accuracy, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*stats[0].success_given_accurate, 1.0);
  EXPECT_DOUBLE_EQ(*stats[0].completeness, 0.5);

  EXPECT_EQ(stats[1].kind, K::QuestionRephrasing);
  EXPECT_FALSE(stats[1].accuracy.has_value());
  EXPECT_EQ(stats[2].kind, K::SelfDebug);
  EXPECT_DOUBLE_EQ(*stats[2].success_given_accurate, 0.0);
  EXPECT_FALSE(stats[2].completeness.has_value());

  auto tsv = render_feedback_stats(stats, ReportFormat::DelimitedText);
  EXPECT_NE(tsv.find("instruction_for_error_correction\t2\t0.5000\t0.6667\t1.0000\t0.5000"),
            std::string::npos)
      << tsv;
  EXPECT_NE(render_feedback_stats(stats, ReportFormat::PlainTable).find("question_rephrasing"),
            std::string::npos);
}

TEST(FeedbackStats, DanglingAnnotationsAreRejected) {
  auto logs = synthetic_ten_session_log();
  for (const auto& bad : {FeedbackAnnotation{"s99", 0, FeedbackKind::SelfDebug, {}, {}, ""},
                          FeedbackAnnotation{"s01", 4, FeedbackKind::SelfDebug, {}, {}, ""}}) {
    try {
      feedback_stats({bad}, logs);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DanglingAnnotation);
    }
  }
}
