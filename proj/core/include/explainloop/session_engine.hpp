#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "explainloop/exec_sandbox.hpp"
#include "explainloop/llm_gateway.hpp"
#include "explainloop/prompt_forge.hpp"
#include "explainloop/session.hpp"
#include "explainloop/transcript.hpp"

namespace explainloop {

struct EngineConfig {
  std::int64_t deadline_ms = 300000;
  std::int64_t grace_ms = 2000;
  std::size_t max_turns = 20;
};

/// What the engine reports to observers after each visible step.
enum class NoticeKind { TurnReady, AwaitingFeedback, Terminal, Error };

std::string_view to_string(NoticeKind kind);

struct EngineNotice {
  NoticeKind kind;
  const Session& session;
  std::string message;  // Error only
};

/// Runs the generate / execute / explain / feedback / correct loop for many
/// sessions. Events for one session are serialized; distinct sessions run
/// concurrently. Snapshots are consistent copies published after every step.
class SessionEngine {
 public:
  using Observer = std::function<void(const EngineNotice&)>;

  SessionEngine(std::shared_ptr<Gateway> gateway, std::shared_ptr<const Sandbox> sandbox,
                std::shared_ptr<const DemoStore> demos, std::shared_ptr<Clock> clock,
                EngineConfig config = {}, std::shared_ptr<TranscriptSink> transcript = nullptr);

  /// Observers run on the thread that processed the event, inside the
  /// session's critical section, so notices for one session arrive in order.
  void set_observer(Observer observer);

  /// Validates the task before any model call. An explicit id must be unused;
  /// otherwise ids are "session-0001", "session-0002", ...
  Session start_session(const TaskBundle& task, SessionMode mode,
                        std::optional<std::string> session_id = std::nullopt);
  Session submit_feedback(const std::string& session_id, std::string_view feedback);
  Session complete_session(const std::string& session_id);
  Session skip_session(const std::string& session_id, SkipReason reason);
  Session tick(const std::string& session_id);
  void tick_all();

  Session snapshot(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;
  bool has_session(const std::string& session_id) const;

  const EngineConfig& config() const { return config_; }
  const Clock& clock() const { return *clock_; }

 private:
  struct Slot {
    std::mutex events;
    Session session;
    mutable std::mutex published_mutex;
    std::shared_ptr<const Session> published;
  };

  std::shared_ptr<Slot> slot_for(const std::string& session_id) const;
  void publish(Slot& slot);
  void notify(NoticeKind kind, const Session& session, const std::string& message = {});
  void log(const std::string& line);

  bool expired(const Session& session, std::int64_t now) const;
  /// Applies the transition table; throws InvalidState for invalid pairs.
  /// Returns false when the event turned into a timeout instead.
  bool apply(Slot& slot, SessionEvent event);
  void finish(Slot& slot, TerminalKind kind, SessionState state);

  void run_initial_turn(Slot& slot);
  void run_follow_up_turn(Slot& slot, const std::string& feedback);
  void fill_intelli_turn(Slot& slot, Turn& turn, const PromptBundle& generation);
  void append_turn(Slot& slot, Turn turn);
  std::string call_model(Turn& turn, const PromptBundle& bundle);

  std::shared_ptr<Gateway> gateway_;
  std::shared_ptr<const Sandbox> sandbox_;
  std::shared_ptr<const DemoStore> demos_;
  std::shared_ptr<Clock> clock_;
  EngineConfig config_;
  std::shared_ptr<TranscriptSink> transcript_;
  Observer observer_;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::size_t next_id_ = 1;
};

}  // namespace explainloop
