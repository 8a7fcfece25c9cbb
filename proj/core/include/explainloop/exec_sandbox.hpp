#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "explainloop/sql_value.hpp"
#include "explainloop/task_model.hpp"

namespace explainloop {

enum class ExecStatus { Ok, RuntimeError, Timeout, SetupError };

struct CaseResult {
  std::size_t index = 0;
  bool passed = false;
  std::string detail;

  bool operator==(const CaseResult&) const = default;
};

struct ExecutionOutcome {
  ExecStatus status = ExecStatus::Ok;
  std::vector<std::string> columns;  // Sql only
  std::vector<SqlRow> sql_rows;      // Sql only, engine order
  std::vector<CaseResult> case_results;  // Python only, case order
  std::string stderr_excerpt;
  std::int64_t wall_ms = 0;

  bool operator==(const ExecutionOutcome&) const = default;
};

enum class VerdictReason { ResultsMatch, ResultsDiffer, ExecutionFailed, AllCasesPassed, CaseFailed, TimedOut };

struct SuccessVerdict {
  bool success = false;
  VerdictReason reason = VerdictReason::ExecutionFailed;

  bool operator==(const SuccessVerdict&) const = default;
};

std::string_view to_string(ExecStatus status);
std::string_view to_string(VerdictReason reason);
std::optional<ExecStatus> parse_exec_status(std::string_view text);
std::optional<VerdictReason> parse_verdict_reason(std::string_view text);

SuccessVerdict make_verdict(VerdictReason reason);

inline constexpr double kRelativeTolerance = 1e-6;

/// Cell equality used by the comparator: integers and reals compare
/// numerically with relative tolerance, text and blobs exactly, NULL = NULL.
bool sql_values_match(const SqlValue& a, const SqlValue& b);

/// Compares result sets as ordered sequences or as multisets of rows.
bool sql_results_match(const std::vector<SqlRow>& pred, const std::vector<SqlRow>& gold,
                       bool ordered);

SuccessVerdict judge_sql(const ExecutionOutcome& pred_outcome, const ExecutionOutcome& gold_outcome,
                         std::string_view gold_code);
SuccessVerdict judge_python(const ExecutionOutcome& outcome);

struct SandboxConfig {
  int sql_limit_ms = 10000;
  int python_case_limit_ms = 10000;
  std::string python_path = "python3";
  std::size_t max_concurrent = 4;
};

/// Counting semaphore with a run-time capacity.
class SandboxSlots {
 public:
  explicit SandboxSlots(std::size_t capacity) : free_(capacity == 0 ? 1 : capacity) {}
  void acquire();
  void release();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t free_;
};

class Sandbox {
 public:
  explicit Sandbox(SandboxConfig config = {});

  /// Runs the first statement of `code` against a read-only connection.
  ExecutionOutcome run_sql(std::string_view code, const std::filesystem::path& database,
                           int limit_ms) const;

  /// Runs every assertion in a fresh interpreter process with `code` prepended,
  /// inside a throwaway scratch directory.
  ExecutionOutcome run_python(std::string_view code, const std::vector<std::string>& cases,
                              int per_case_limit_ms) const;

  /// Dispatches on the task language with the configured limits.
  ExecutionOutcome execute(const TaskBundle& task, std::string_view code) const;

  /// Judges an outcome produced by execute() against the task's gold code.
  /// Gold outcomes are cached per task id.
  SuccessVerdict judge(const TaskBundle& task, const ExecutionOutcome& outcome) const;

  const SandboxConfig& config() const { return config_; }

 private:
  ExecutionOutcome gold_outcome(const TaskBundle& task) const;

  SandboxConfig config_;
  mutable SandboxSlots slots_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, ExecutionOutcome> gold_cache_;
};

}  // namespace explainloop
