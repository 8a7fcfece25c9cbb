#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <string>
#include <thread>
#include <vector>

#include "explainloop/error.hpp"
#include "explainloop/session_engine.hpp"

namespace explainloop {

struct ApiEvent {
  std::string session_id;
  std::uint64_t sequence = 0;  // 1, 2, 3, ... per session
  NoticeKind kind = NoticeKind::TurnReady;
  nlohmann::json payload;

  bool operator==(const ApiEvent&) const = default;
};

nlohmann::json event_to_json(const ApiEvent& event);
/// Server-sent-event framing: id, event and data lines, blank-line terminated.
std::string event_to_sse(const ApiEvent& event);

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
  std::map<std::string, std::string> query;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// HTTP status for an engine error code.
int http_status_for(ErrorCode code);
ApiResponse error_response(ErrorCode code, const std::string& message);

/// Thin HTTP adapter over a SessionEngine. Routes:
///
///   GET  /api/tasks
///   GET  /api/sessions
///   POST /api/sessions                      {"task_id", "mode"}
///   GET  /api/sessions/{id}
///   POST /api/sessions/{id}/feedback        {"text"}
///   POST /api/sessions/{id}/complete
///   POST /api/sessions/{id}/skip            {"reason": "unclear_question" | "unsolvable"}
///   GET  /api/sessions/{id}/events/log      ?after=N, JSON list
///   GET  /api/sessions/{id}/events          ?after=N or Last-Event-ID, event stream
class Service {
 public:
  Service(std::shared_ptr<SessionEngine> engine, std::vector<TaskBundle> corpus);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Routes one request without any network involvement.
  ApiResponse dispatch(const ApiRequest& request);

  /// Events of a session with sequence > after. Waits up to `wait_ms` for at
  /// least one to arrive.
  std::vector<ApiEvent> events_after(const std::string& session_id, std::uint64_t after,
                                     int wait_ms = 0);

  /// Binds and serves until stop(). Port 0 picks a free port; the bound port
  /// is reported through bound_port() once listening.
  void serve(const std::string& host, int port);
  /// Binds synchronously and serves on a background thread.
  int start_background(const std::string& host, int port = 0);
  void stop();
  int bound_port() const { return bound_port_.load(); }

  /// Background timer enforcement interval.
  void set_tick_interval_ms(int ms) { tick_interval_ms_ = ms; }

 private:
  struct EventLog {
    std::vector<ApiEvent> events;
  };
  struct Server;

  void on_notice(const EngineNotice& notice);
  void run_ticker();

  std::shared_ptr<SessionEngine> engine_;
  std::vector<TaskBundle> corpus_;

  std::mutex events_mutex_;
  std::condition_variable events_cv_;
  std::map<std::string, EventLog> logs_;

  std::unique_ptr<Server> server_;
  std::thread server_thread_;
  std::thread ticker_;
  std::mutex ticker_mutex_;
  std::condition_variable ticker_cv_;
  std::atomic<bool> stopping_{false};
  std::atomic<int> bound_port_{0};
  int tick_interval_ms_ = 250;
};

}  // namespace explainloop
