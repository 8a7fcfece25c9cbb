#include "explainloop/exec_sandbox.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "explainloop/sql_lexer.hpp"
#include "sqlite_handle.hpp"

namespace explainloop {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

int progress_deadline(void* arg) {
  return Clock::now() >= *static_cast<Clock::time_point*>(arg) ? 1 : 0;
}

// NULL < numbers < text < blob; numbers by value.
int type_rank(const SqlValue& v) {
  switch (v.index()) {
    case 0: return 0;
    case 1:
    case 2: return 1;
    case 3: return 2;
    default: return 3;
  }
}

double as_double(const SqlValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

bool value_less(const SqlValue& a, const SqlValue& b) {
  int ra = type_rank(a);
  int rb = type_rank(b);
  if (ra != rb) return ra < rb;
  switch (ra) {
    case 1: return as_double(a) < as_double(b);
    case 2: return std::get<std::string>(a) < std::get<std::string>(b);
    case 3: return std::get<Blob>(a).bytes < std::get<Blob>(b).bytes;
    default: return false;
  }
}

bool row_less(const SqlRow& a, const SqlRow& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), value_less);
}

bool rows_match(const SqlRow& a, const SqlRow& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!sql_values_match(a[i], b[i])) return false;
  }
  return true;
}

bool greedy_multiset_match(const std::vector<SqlRow>& pred, const std::vector<SqlRow>& gold) {
  std::vector<bool> used(gold.size(), false);
  for (const auto& row : pred) {
    bool found = false;
    for (std::size_t j = 0; j < gold.size(); ++j) {
      if (!used[j] && rows_match(row, gold[j])) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(ExecStatus status) {
  switch (status) {
    case ExecStatus::Ok: return "ok";
    case ExecStatus::RuntimeError: return "runtime_error";
    case ExecStatus::Timeout: return "timeout";
    case ExecStatus::SetupError: return "setup_error";
  }
  return "ok";
}

std::string_view to_string(VerdictReason reason) {
  switch (reason) {
    case VerdictReason::ResultsMatch: return "results_match";
    case VerdictReason::ResultsDiffer: return "results_differ";
    case VerdictReason::ExecutionFailed: return "execution_failed";
    case VerdictReason::AllCasesPassed: return "all_cases_passed";
    case VerdictReason::CaseFailed: return "case_failed";
    case VerdictReason::TimedOut: return "timed_out";
  }
  return "execution_failed";
}

std::optional<ExecStatus> parse_exec_status(std::string_view text) {
  for (ExecStatus s : {ExecStatus::Ok, ExecStatus::RuntimeError, ExecStatus::Timeout,
                       ExecStatus::SetupError}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::optional<VerdictReason> parse_verdict_reason(std::string_view text) {
  for (VerdictReason r : {VerdictReason::ResultsMatch, VerdictReason::ResultsDiffer,
                          VerdictReason::ExecutionFailed, VerdictReason::AllCasesPassed,
                          VerdictReason::CaseFailed, VerdictReason::TimedOut}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

SuccessVerdict make_verdict(VerdictReason reason) {
  return {reason == VerdictReason::ResultsMatch || reason == VerdictReason::AllCasesPassed,
          reason};
}

bool sql_values_match(const SqlValue& a, const SqlValue& b) {
  int ra = type_rank(a);
  if (ra != type_rank(b)) return false;
  if (ra != 1) return a == b;
  if (a.index() == 1 && b.index() == 1) return std::get<std::int64_t>(a) == std::get<std::int64_t>(b);
  double x = as_double(a);
  double y = as_double(b);
  if (x == y) return true;
  return std::fabs(x - y) <= kRelativeTolerance * std::max(std::fabs(x), std::fabs(y));
}

bool sql_results_match(const std::vector<SqlRow>& pred, const std::vector<SqlRow>& gold,
                       bool ordered) {
  if (pred.size() != gold.size()) return false;
  if (ordered) {
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (!rows_match(pred[i], gold[i])) return false;
    }
    return true;
  }
  auto a = pred;
  auto b = gold;
  std::sort(a.begin(), a.end(), row_less);
  std::sort(b.begin(), b.end(), row_less);
  bool sorted_equal = true;
  for (std::size_t i = 0; i < a.size() && sorted_equal; ++i) sorted_equal = rows_match(a[i], b[i]);
  if (sorted_equal) return true;
  // Values within tolerance can sort apart; fall back to pairwise matching.
  constexpr std::size_t kGreedyLimit = 4000;
  return a.size() <= kGreedyLimit && greedy_multiset_match(a, b);
}

SuccessVerdict judge_sql(const ExecutionOutcome& pred_outcome, const ExecutionOutcome& gold_outcome,
                         std::string_view gold_code) {
  if (pred_outcome.status == ExecStatus::Timeout) return make_verdict(VerdictReason::TimedOut);
  if (pred_outcome.status != ExecStatus::Ok || gold_outcome.status != ExecStatus::Ok) {
    return make_verdict(VerdictReason::ExecutionFailed);
  }
  bool ordered = sql::has_top_level_order_by(gold_code);
  return make_verdict(sql_results_match(pred_outcome.sql_rows, gold_outcome.sql_rows, ordered)
                          ? VerdictReason::ResultsMatch
                          : VerdictReason::ResultsDiffer);
}

SuccessVerdict judge_python(const ExecutionOutcome& outcome) {
  if (outcome.status == ExecStatus::SetupError || outcome.case_results.empty()) {
    return make_verdict(VerdictReason::ExecutionFailed);
  }
  bool any_failed = false;
  bool all_timeouts = true;
  for (const auto& c : outcome.case_results) {
    if (c.passed) continue;
    any_failed = true;
    if (c.detail != "timeout") all_timeouts = false;
  }
  if (!any_failed) return make_verdict(VerdictReason::AllCasesPassed);
  return make_verdict(all_timeouts ? VerdictReason::TimedOut : VerdictReason::CaseFailed);
}

void SandboxSlots::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return free_ > 0; });
  --free_;
}

void SandboxSlots::release() {
  {
    std::lock_guard lock(mutex_);
    ++free_;
  }
  cv_.notify_one();
}

namespace {

struct SlotGuard {
  SandboxSlots& slots;
  explicit SlotGuard(SandboxSlots& s) : slots(s) { slots.acquire(); }
  ~SlotGuard() { slots.release(); }
};

}  // namespace

Sandbox::Sandbox(SandboxConfig config) : config_(std::move(config)), slots_(config_.max_concurrent) {}

ExecutionOutcome Sandbox::run_sql(std::string_view code, const std::filesystem::path& database,
                                  int limit_ms) const {
  SlotGuard slot(slots_);
  ExecutionOutcome out;
  auto started = Clock::now();
  auto finish = [&](ExecStatus status, std::string message) {
    out.status = status;
    out.stderr_excerpt = std::move(message);
    out.wall_ms = elapsed_ms(started);
    return out;
  };

  std::error_code ec;
  if (!std::filesystem::is_regular_file(database, ec)) {
    return finish(ExecStatus::SetupError, "database not found: " + database.string());
  }
  std::string error;
  auto db = detail::open_read_only(database, error);
  if (!db) return finish(ExecStatus::SetupError, error);

  auto deadline = started + std::chrono::milliseconds(limit_ms);
  sqlite3_progress_handler(db.get(), 1000, progress_deadline, &deadline);

  std::string sql(code);
  sqlite3_stmt* raw = nullptr;
  int rc = sqlite3_prepare_v2(db.get(), sql.c_str(), static_cast<int>(sql.size()), &raw, nullptr);
  detail::StmtHandle stmt(raw);
  auto failure_status = [&](int code_rc) {
    int primary = code_rc & 0xff;
    if (primary == SQLITE_INTERRUPT) return ExecStatus::Timeout;
    if (primary == SQLITE_NOTADB || primary == SQLITE_CORRUPT || primary == SQLITE_CANTOPEN) {
      return ExecStatus::SetupError;
    }
    return ExecStatus::RuntimeError;
  };
  if (rc != SQLITE_OK) return finish(failure_status(rc), sqlite3_errmsg(db.get()));
  if (!stmt) return finish(ExecStatus::RuntimeError, "empty query");
  if (!sqlite3_stmt_readonly(stmt.get())) {
    return finish(ExecStatus::RuntimeError, "only read-only statements are allowed");
  }

  int ncol = sqlite3_column_count(stmt.get());
  for (int c = 0; c < ncol; ++c) {
    const char* name = sqlite3_column_name(stmt.get(), c);
    out.columns.emplace_back(name ? name : "");
  }
  while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
    SqlRow row;
    row.reserve(static_cast<std::size_t>(ncol));
    for (int c = 0; c < ncol; ++c) row.push_back(detail::column_value(stmt.get(), c));
    out.sql_rows.push_back(std::move(row));
  }
  if (rc != SQLITE_DONE) {
    out.sql_rows.clear();
    ExecStatus status = failure_status(rc);
    return finish(status, status == ExecStatus::Timeout ? "timeout" : sqlite3_errmsg(db.get()));
  }
  return finish(ExecStatus::Ok, "");
}

ExecutionOutcome Sandbox::execute(const TaskBundle& task, std::string_view code) const {
  if (task.language == Language::Sql) {
    return run_sql(code, task.context.database, config_.sql_limit_ms);
  }
  std::vector<std::string> cases;
  for (const auto& tc : task.context.test_cases) cases.push_back(tc.assertion);
  return run_python(code, cases, config_.python_case_limit_ms);
}

ExecutionOutcome Sandbox::gold_outcome(const TaskBundle& task) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = gold_cache_.find(task.task_id); it != gold_cache_.end()) return it->second;
  }
  auto outcome = execute(task, task.gold_code);
  std::lock_guard lock(cache_mutex_);
  gold_cache_.emplace(task.task_id, outcome);
  return outcome;
}

SuccessVerdict Sandbox::judge(const TaskBundle& task, const ExecutionOutcome& outcome) const {
  if (task.language == Language::Python) return judge_python(outcome);
  return judge_sql(outcome, gold_outcome(task), task.gold_code);
}

}  // namespace explainloop
