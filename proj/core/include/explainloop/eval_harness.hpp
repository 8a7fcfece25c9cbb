#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "explainloop/task_model.hpp"
#include "explainloop/transcript.hpp"

namespace explainloop {

/// Aggregates over one group of counted sessions. Undefined quantities (an
/// empty group) stay nullopt. Standard deviations are population SDs.
struct GroupMetrics {
  std::size_t sessions = 0;
  std::size_t successes = 0;
  std::optional<double> success_rate;
  std::optional<double> success_sd;
  std::optional<double> avg_time_ms;
  std::optional<double> time_sd_ms;

  bool operator==(const GroupMetrics&) const = default;
};

struct MetricsReport {
  std::size_t n_sessions = 0;        // every session present in the logs
  std::size_t excluded_count = 0;    // skipped as unclear
  std::size_t incomplete_count = 0;  // no terminal outcome recorded
  GroupMetrics overall;
  std::array<GroupMetrics, 3> per_difficulty;  // Easy, Medium, Hard; unrated tasks only in overall

  bool operator==(const MetricsReport&) const = default;
};

/// A session counts as a success only when the user completed it and its
/// final verdict was a success.
bool session_succeeded(const TranscriptSession& session);

MetricsReport compute_metrics(const std::vector<TranscriptSession>& logs,
                              const std::vector<TaskBundle>& corpus);

enum class ReportFormat { PlainTable, DelimitedText };

std::string_view to_string(ReportFormat format);
std::optional<ReportFormat> parse_report_format(std::string_view text);

std::string render_report(const MetricsReport& report, ReportFormat format);

// Feedback annotations ------------------------------------------------------------

enum class FeedbackKind {
  InstructionForErrorCorrection,
  QuestionRephrasing,
  InputOutputSamples,
  SelfDebug,
  StepByStepInstructions,
};

inline constexpr FeedbackKind kAllFeedbackKinds[] = {
    FeedbackKind::InstructionForErrorCorrection, FeedbackKind::QuestionRephrasing,
    FeedbackKind::InputOutputSamples,            FeedbackKind::SelfDebug,
    FeedbackKind::StepByStepInstructions,
};

std::string_view to_string(FeedbackKind kind);
std::optional<FeedbackKind> parse_feedback_kind(std::string_view text);

struct FeedbackAnnotation {
  std::string session_id;
  std::size_t turn_index = 0;
  FeedbackKind kind = FeedbackKind::InstructionForErrorCorrection;
  std::optional<bool> accurate;
  std::optional<bool> complete;  // only meaningful when accurate
  std::string annotator;

  bool operator==(const FeedbackAnnotation&) const = default;
};

/// Reads line-delimited annotation records.
std::vector<FeedbackAnnotation> parse_annotations(std::string_view text);
std::vector<FeedbackAnnotation> load_annotations(const std::filesystem::path& path);

struct FeedbackKindStats {
  FeedbackKind kind = FeedbackKind::InstructionForErrorCorrection;
  std::size_t sessions_with_kind = 0;
  std::optional<double> frequency;  // sessions_with_kind / annotated sessions
  std::size_t judged = 0;           // annotations carrying an accuracy judgment
  std::size_t accurate = 0;
  std::optional<double> accuracy;
  std::optional<double> success_given_accurate;
  std::optional<double> completeness;  // complete / accurate-with-completeness-judgment

  bool operator==(const FeedbackKindStats&) const = default;
};

/// One row per kind that occurs, in enum order. Frequency is counted at the
/// conversation level: a kind counts once per session however often it recurs.
std::vector<FeedbackKindStats> feedback_stats(const std::vector<FeedbackAnnotation>& annotations,
                                              const std::vector<TranscriptSession>& logs);

std::string render_feedback_stats(const std::vector<FeedbackKindStats>& stats,
                                  ReportFormat format);

}  // namespace explainloop
