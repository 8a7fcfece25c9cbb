#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "explainloop/exec_sandbox.hpp"
#include "explainloop/task_model.hpp"

namespace explainloop {

enum class SessionMode { IntelliExplain, Vanilla };

enum class SessionState {
  AwaitingStart,
  Generating,
  Explaining,
  AwaitingFeedback,
  Correcting,
  Completed,
  SkippedUnclearQuestion,
  SkippedUnsolvable,
  TimedOut,
};

enum class SessionEvent { Start, Feedback, Complete, SkipUnclear, SkipUnsolvable, Tick };

enum class TerminalKind { CompletedByUser, SkipUnclear, SkipUnsolvable, Timeout };

enum class SkipReason { UnclearQuestion, Unsolvable };

inline constexpr SessionState kAllStates[] = {
    SessionState::AwaitingStart,    SessionState::Generating, SessionState::Explaining,
    SessionState::AwaitingFeedback, SessionState::Correcting, SessionState::Completed,
    SessionState::SkippedUnclearQuestion, SessionState::SkippedUnsolvable, SessionState::TimedOut,
};

inline constexpr SessionEvent kAllEvents[] = {
    SessionEvent::Start,       SessionEvent::Feedback,       SessionEvent::Complete,
    SessionEvent::SkipUnclear, SessionEvent::SkipUnsolvable, SessionEvent::Tick,
};

std::string_view to_string(SessionMode mode);
std::string_view to_string(SessionState state);
std::string_view to_string(SessionEvent event);
std::string_view to_string(TerminalKind kind);
std::string_view to_string(SkipReason reason);
std::optional<SessionMode> parse_mode(std::string_view text);
std::optional<SessionState> parse_state(std::string_view text);
std::optional<TerminalKind> parse_terminal_kind(std::string_view text);
std::optional<SkipReason> parse_skip_reason(std::string_view text);

bool is_terminal(SessionState state);

/// The documented transition table. Returns the state an event leads to, or
/// nullopt when the pair is invalid. `expired` means the session deadline has
/// passed: every event on a live session then leads to TimedOut.
///
///   AwaitingStart    + Start          -> Generating
///   AwaitingFeedback + Feedback       -> Correcting (IntelliExplain) | Generating (Vanilla)
///   AwaitingFeedback + Complete       -> Completed
///   AwaitingFeedback + SkipUnclear    -> SkippedUnclearQuestion
///   AwaitingFeedback + SkipUnsolvable -> SkippedUnsolvable
///   live state       + Tick           -> unchanged, or TimedOut when expired
///   terminal state   + Tick           -> unchanged
///   anything else                     -> invalid
std::optional<SessionState> transition(SessionState state, SessionEvent event, SessionMode mode,
                                       bool expired);

struct Turn {
  std::size_t index = 0;
  std::string code;
  std::string explanation;  // IntelliExplain only
  std::string model_reply;  // Vanilla only: the free-form reply shown to the user
  std::optional<ExecutionOutcome> execution;  // IntelliExplain only
  SuccessVerdict verdict;
  std::optional<std::string> user_feedback;
  std::vector<std::string> prompts_used;
  std::optional<std::string> error_notice;

  bool operator==(const Turn&) const = default;
};

struct TerminalOutcome {
  TerminalKind kind = TerminalKind::CompletedByUser;
  SuccessVerdict final_verdict;
  std::int64_t elapsed_ms = 0;

  bool operator==(const TerminalOutcome&) const = default;
};

struct Session {
  std::string session_id;
  TaskBundle task;
  SessionMode mode = SessionMode::IntelliExplain;
  SessionState state = SessionState::AwaitingStart;
  std::vector<Turn> turns;
  std::int64_t started_at_ms = 0;
  std::int64_t deadline_ms = 300000;
  std::optional<TerminalOutcome> outcome;

  bool operator==(const Session&) const = default;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
};

/// Milliseconds since the Unix epoch.
class SystemClock : public Clock {
 public:
  std::int64_t now_ms() const override;
};

class ManualClock : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t now_ms() const override { return now_.load(); }
  void set(std::int64_t ms) { now_.store(ms); }
  void advance(std::int64_t ms) { now_.fetch_add(ms); }

 private:
  std::atomic<std::int64_t> now_;
};

}  // namespace explainloop
