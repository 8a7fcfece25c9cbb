#include "explainloop/session.hpp"

#include <chrono>

namespace explainloop {

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view text, const E (&values)[N]) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(SessionMode mode) {
  return mode == SessionMode::IntelliExplain ? "intelliexplain" : "vanilla";
}

std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::AwaitingStart: return "awaiting_start";
    case SessionState::Generating: return "generating";
    case SessionState::Explaining: return "explaining";
    case SessionState::AwaitingFeedback: return "awaiting_feedback";
    case SessionState::Correcting: return "correcting";
    case SessionState::Completed: return "completed";
    case SessionState::SkippedUnclearQuestion: return "skipped_unclear_question";
    case SessionState::SkippedUnsolvable: return "skipped_unsolvable";
    case SessionState::TimedOut: return "timed_out";
  }
  return "awaiting_start";
}

std::string_view to_string(SessionEvent event) {
  switch (event) {
    case SessionEvent::Start: return "start";
    case SessionEvent::Feedback: return "feedback";
    case SessionEvent::Complete: return "complete";
    case SessionEvent::SkipUnclear: return "skip_unclear";
    case SessionEvent::SkipUnsolvable: return "skip_unsolvable";
    case SessionEvent::Tick: return "tick";
  }
  return "tick";
}

std::string_view to_string(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::CompletedByUser: return "completed_by_user";
    case TerminalKind::SkipUnclear: return "skip_unclear";
    case TerminalKind::SkipUnsolvable: return "skip_unsolvable";
    case TerminalKind::Timeout: return "timeout";
  }
  return "timeout";
}

std::string_view to_string(SkipReason reason) {
  return reason == SkipReason::UnclearQuestion ? "unclear_question" : "unsolvable";
}

std::optional<SessionMode> parse_mode(std::string_view text) {
  constexpr SessionMode all[] = {SessionMode::IntelliExplain, SessionMode::Vanilla};
  return parse_enum(text, all);
}

std::optional<SessionState> parse_state(std::string_view text) {
  return parse_enum(text, kAllStates);
}

std::optional<TerminalKind> parse_terminal_kind(std::string_view text) {
  constexpr TerminalKind all[] = {TerminalKind::CompletedByUser, TerminalKind::SkipUnclear,
                                  TerminalKind::SkipUnsolvable, TerminalKind::Timeout};
  return parse_enum(text, all);
}

std::optional<SkipReason> parse_skip_reason(std::string_view text) {
  constexpr SkipReason all[] = {SkipReason::UnclearQuestion, SkipReason::Unsolvable};
  return parse_enum(text, all);
}

bool is_terminal(SessionState state) {
  switch (state) {
    case SessionState::Completed:
    case SessionState::SkippedUnclearQuestion:
    case SessionState::SkippedUnsolvable:
    case SessionState::TimedOut:
      return true;
    default:
      return false;
  }
}

std::optional<SessionState> transition(SessionState state, SessionEvent event, SessionMode mode,
                                       bool expired) {
  if (is_terminal(state)) {
    if (event == SessionEvent::Tick) return state;
    return std::nullopt;
  }
  if (expired) return SessionState::TimedOut;
  if (event == SessionEvent::Tick) return state;

  if (state == SessionState::AwaitingStart) {
    if (event == SessionEvent::Start) return SessionState::Generating;
    return std::nullopt;
  }
  if (state == SessionState::AwaitingFeedback) {
    switch (event) {
      case SessionEvent::Feedback:
        return mode == SessionMode::IntelliExplain ? SessionState::Correcting
                                                   : SessionState::Generating;
      case SessionEvent::Complete: return SessionState::Completed;
      case SessionEvent::SkipUnclear: return SessionState::SkippedUnclearQuestion;
      case SessionEvent::SkipUnsolvable: return SessionState::SkippedUnsolvable;
      default: return std::nullopt;
    }
  }
  return std::nullopt;
}

std::int64_t SystemClock::now_ms() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace explainloop
