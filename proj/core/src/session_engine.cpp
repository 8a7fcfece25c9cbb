#include "explainloop/session_engine.hpp"

#include <algorithm>
#include <cstdio>

#include "explainloop/error.hpp"

namespace explainloop {

std::string_view to_string(NoticeKind kind) {
  switch (kind) {
    case NoticeKind::TurnReady: return "turn_ready";
    case NoticeKind::AwaitingFeedback: return "awaiting_feedback";
    case NoticeKind::Terminal: return "terminal";
    case NoticeKind::Error: return "error";
  }
  return "error";
}

SessionEngine::SessionEngine(std::shared_ptr<Gateway> gateway,
                             std::shared_ptr<const Sandbox> sandbox,
                             std::shared_ptr<const DemoStore> demos, std::shared_ptr<Clock> clock,
                             EngineConfig config, std::shared_ptr<TranscriptSink> transcript)
    : gateway_(std::move(gateway)),
      sandbox_(std::move(sandbox)),
      demos_(std::move(demos)),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()),
      config_(config),
      transcript_(std::move(transcript)) {
  if (!gateway_ || !sandbox_ || !demos_) {
    throw Error(ErrorCode::InvalidConfig, "session engine needs a gateway, sandbox and demos");
  }
}

void SessionEngine::set_observer(Observer observer) { observer_ = std::move(observer); }

std::shared_ptr<SessionEngine::Slot> SessionEngine::slot_for(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::UnknownSession, "unknown session '" + session_id + "'");
  }
  return it->second;
}

void SessionEngine::publish(Slot& slot) {
  auto copy = std::make_shared<const Session>(slot.session);
  std::lock_guard lock(slot.published_mutex);
  slot.published = std::move(copy);
}

void SessionEngine::notify(NoticeKind kind, const Session& session, const std::string& message) {
  if (observer_) observer_(EngineNotice{kind, session, message});
}

void SessionEngine::log(const std::string& line) {
  if (transcript_) transcript_->append(line);
}

bool SessionEngine::expired(const Session& session, std::int64_t now) const {
  return now - session.started_at_ms > session.deadline_ms;
}

void SessionEngine::finish(Slot& slot, TerminalKind kind, SessionState state) {
  Session& s = slot.session;
  std::int64_t now = clock_->now_ms();
  TerminalOutcome outcome;
  outcome.kind = kind;
  outcome.final_verdict =
      s.turns.empty() ? make_verdict(VerdictReason::ExecutionFailed) : s.turns.back().verdict;
  outcome.elapsed_ms = std::clamp<std::int64_t>(now - s.started_at_ms, 0, s.deadline_ms);
  s.state = state;
  s.outcome = outcome;
  log(transcript_terminal(s.session_id, outcome, now));
  publish(slot);
  notify(NoticeKind::Terminal, s);
}

bool SessionEngine::apply(Slot& slot, SessionEvent event) {
  Session& s = slot.session;
  bool late = expired(s, clock_->now_ms());
  auto next = transition(s.state, event, s.mode, late);
  if (!next) {
    throw Error(ErrorCode::InvalidState, "cannot apply " + std::string(to_string(event)) +
                                             " to a session in state " +
                                             std::string(to_string(s.state)));
  }
  if (is_terminal(s.state)) return false;
  switch (*next) {
    case SessionState::TimedOut:
      finish(slot, TerminalKind::Timeout, SessionState::TimedOut);
      return false;
    case SessionState::Completed:
      finish(slot, TerminalKind::CompletedByUser, *next);
      return false;
    case SessionState::SkippedUnclearQuestion:
      finish(slot, TerminalKind::SkipUnclear, *next);
      return false;
    case SessionState::SkippedUnsolvable:
      finish(slot, TerminalKind::SkipUnsolvable, *next);
      return false;
    default:
      break;
  }
  if (event == SessionEvent::Tick) return false;
  s.state = *next;
  publish(slot);
  return true;
}

std::string SessionEngine::call_model(Turn& turn, const PromptBundle& bundle) {
  turn.prompts_used.push_back(bundle.fingerprint);
  return gateway_->complete(bundle);
}

void SessionEngine::fill_intelli_turn(Slot& slot, Turn& turn, const PromptBundle& generation) {
  const TaskBundle& task = slot.session.task;
  turn.code = extract_code(call_model(turn, generation));
  turn.execution = sandbox_->execute(task, turn.code);
  turn.verdict = sandbox_->judge(task, *turn.execution);

  slot.session.state = SessionState::Explaining;
  publish(slot);
  PromptBundle explain = task.language == Language::Sql
                             ? build_restatement_prompt(turn.code, task.question, *demos_)
                             : build_description_prompt(turn.code, *demos_);
  turn.explanation = trim(call_model(turn, explain));
}

void SessionEngine::append_turn(Slot& slot, Turn turn) {
  Session& s = slot.session;
  s.turns.push_back(std::move(turn));
  s.state = SessionState::AwaitingFeedback;
  const Turn& added = s.turns.back();
  log(transcript_turn_added(s.session_id, added, clock_->now_ms()));
  publish(slot);
  notify(NoticeKind::TurnReady, s);
  if (added.error_notice) notify(NoticeKind::Error, s, *added.error_notice);
  notify(NoticeKind::AwaitingFeedback, s);
}

void SessionEngine::run_initial_turn(Slot& slot) {
  const Session& s = slot.session;
  Turn turn;
  turn.index = s.turns.size();
  try {
    if (s.mode == SessionMode::IntelliExplain) {
      fill_intelli_turn(slot, turn, build_codegen_prompt(s.task, *demos_));
    } else {
      turn.model_reply = call_model(turn, build_vanilla_prompt(s.task, {}, {}));
      turn.code = extract_code(turn.model_reply);
      turn.verdict = sandbox_->judge(s.task, sandbox_->execute(s.task, turn.code));
    }
  } catch (const Error& e) {
    turn.error_notice = e.what();
  }
  append_turn(slot, std::move(turn));
}

void SessionEngine::run_follow_up_turn(Slot& slot, const std::string& feedback) {
  const Session& s = slot.session;
  Turn turn;
  turn.index = s.turns.size();
  try {
    if (s.mode == SessionMode::IntelliExplain) {
      const Turn* base = nullptr;
      for (auto it = s.turns.rbegin(); it != s.turns.rend(); ++it) {
        if (!it->error_notice && !it->code.empty() && !it->explanation.empty()) {
          base = &*it;
          break;
        }
      }
      PromptBundle generation =
          base ? build_correction_prompt(base->code, base->explanation, feedback, s.task, *demos_)
               : build_codegen_prompt(s.task, *demos_);
      fill_intelli_turn(slot, turn, generation);
    } else {
      std::vector<std::string> replies;
      std::vector<std::string> follow_ups;
      for (const auto& t : s.turns) {
        if (t.error_notice) continue;
        replies.push_back(t.model_reply);
        follow_ups.push_back(t.user_feedback.value_or(""));
      }
      if (!follow_ups.empty()) follow_ups.back() = feedback;
      turn.model_reply = call_model(turn, build_vanilla_prompt(s.task, replies, follow_ups));
      turn.code = extract_code(turn.model_reply);
      turn.verdict = sandbox_->judge(s.task, sandbox_->execute(s.task, turn.code));
    }
  } catch (const Error& e) {
    turn.error_notice = e.what();
  }
  append_turn(slot, std::move(turn));
}

Session SessionEngine::start_session(const TaskBundle& task, SessionMode mode,
                                     std::optional<std::string> session_id) {
  validate_task(task);
  auto slot = std::make_shared<Slot>();
  {
    std::unique_lock lock(sessions_mutex_);
    std::string id;
    if (session_id) {
      id = *session_id;
      if (id.empty() || sessions_.count(id)) {
        throw Error(ErrorCode::PreconditionViolated, "session id '" + id + "' is not available");
      }
    } else {
      do {
        char buf[32];
        std::snprintf(buf, sizeof buf, "session-%04zu", next_id_++);
        id = buf;
      } while (sessions_.count(id));
    }
    Session& s = slot->session;
    s.session_id = id;
    s.task = task;
    s.mode = mode;
    s.state = SessionState::AwaitingStart;
    s.started_at_ms = clock_->now_ms();
    s.deadline_ms = config_.deadline_ms;
    publish(*slot);
    sessions_.emplace(id, slot);
  }

  std::lock_guard events(slot->events);
  log(transcript_session_created(slot->session, clock_->now_ms()));
  if (apply(*slot, SessionEvent::Start)) run_initial_turn(*slot);
  return slot->session;
}

Session SessionEngine::submit_feedback(const std::string& session_id, std::string_view feedback) {
  auto slot = slot_for(session_id);
  std::lock_guard events(slot->events);
  Session& s = slot->session;

  bool late = expired(s, clock_->now_ms());
  auto next = transition(s.state, SessionEvent::Feedback, s.mode, late);
  if (next && !is_terminal(s.state) && *next == SessionState::TimedOut) {
    finish(*slot, TerminalKind::Timeout, SessionState::TimedOut);
    return s;
  }
  if (next) {
    std::string text = trim(feedback);
    if (text.empty()) throw Error(ErrorCode::EmptyFeedback, "feedback is empty");
    if (s.turns.size() >= config_.max_turns) {
      throw Error(ErrorCode::TurnLimitReached,
                  "session reached the limit of " + std::to_string(config_.max_turns) + " turns");
    }
  }
  if (!apply(*slot, SessionEvent::Feedback)) return s;

  std::string text = trim(feedback);
  Turn& last = s.turns.back();
  last.user_feedback = text;
  log(transcript_feedback(s.session_id, last.index, text, clock_->now_ms()));
  publish(*slot);
  run_follow_up_turn(*slot, text);
  return s;
}

Session SessionEngine::complete_session(const std::string& session_id) {
  auto slot = slot_for(session_id);
  std::lock_guard events(slot->events);
  apply(*slot, SessionEvent::Complete);
  return slot->session;
}

Session SessionEngine::skip_session(const std::string& session_id, SkipReason reason) {
  auto slot = slot_for(session_id);
  std::lock_guard events(slot->events);
  apply(*slot, reason == SkipReason::UnclearQuestion ? SessionEvent::SkipUnclear
                                                      : SessionEvent::SkipUnsolvable);
  return slot->session;
}

Session SessionEngine::tick(const std::string& session_id) {
  auto slot = slot_for(session_id);
  std::lock_guard events(slot->events);
  apply(*slot, SessionEvent::Tick);
  return slot->session;
}

void SessionEngine::tick_all() {
  for (const auto& id : session_ids()) {
    auto slot = slot_for(id);
    std::unique_lock events(slot->events, std::try_to_lock);
    if (!events.owns_lock()) continue;  // busy; its own event will check the timer
    apply(*slot, SessionEvent::Tick);
  }
}

Session SessionEngine::snapshot(const std::string& session_id) const {
  auto slot = slot_for(session_id);
  std::lock_guard lock(slot->published_mutex);
  return *slot->published;
}

std::vector<std::string> SessionEngine::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

bool SessionEngine::has_session(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.count(session_id) > 0;
}

}  // namespace explainloop
