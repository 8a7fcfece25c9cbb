#include "explainloop/service.hpp"

#include <httplib.h>

#include <chrono>

#include "explainloop/error.hpp"
#include "explainloop/json_codec.hpp"

namespace explainloop {

using nlohmann::json;

struct Service::Server {
  httplib::Server http;
};

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start < path.size()) {
    std::size_t end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

ApiResponse json_response(int status, const json& body) {
  return {status, body.dump(), "application/json"};
}

json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::PreconditionViolated, "request body must be a JSON object");
  }
  return j;
}

std::string string_field(const json& body, const char* key, bool required) {
  if (!body.contains(key)) {
    if (required) throw Error(ErrorCode::PreconditionViolated, std::string("missing field '") + key + "'");
    return {};
  }
  if (!body.at(key).is_string()) {
    throw Error(ErrorCode::PreconditionViolated, std::string("field '") + key + "' must be a string");
  }
  return body.at(key).get<std::string>();
}

std::uint64_t parse_sequence(const std::string& text) {
  if (text.empty()) return 0;
  if (text.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::PreconditionViolated, "sequence must be a non-negative integer");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::PreconditionViolated, "sequence must be a non-negative integer");
  }
}

json session_summary(const Session& s) {
  return {{"session_id", s.session_id},
          {"task_id", s.task.task_id},
          {"mode", to_string(s.mode)},
          {"state", to_string(s.state)}};
}

}  // namespace

json event_to_json(const ApiEvent& event) {
  return {{"session_id", event.session_id},
          {"sequence", event.sequence},
          {"kind", to_string(event.kind)},
          {"payload", event.payload}};
}

std::string event_to_sse(const ApiEvent& event) {
  return "id: " + std::to_string(event.sequence) + "\nevent: " + std::string(to_string(event.kind)) +
         "\ndata: " + event_to_json(event).dump() + "\n\n";
}

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownTask:
      return 404;
    case ErrorCode::InvalidState:
    case ErrorCode::TurnLimitReached:
      return 409;
    case ErrorCode::EmptyFeedback:
    case ErrorCode::PreconditionViolated:
    case ErrorCode::MalformedTask:
    case ErrorCode::InvalidConfig:
      return 422;
    case ErrorCode::CassetteMiss:
    case ErrorCode::ProviderError:
    case ErrorCode::GatewayTimeout:
      return 502;
    default:
      return 500;
  }
}

ApiResponse error_response(ErrorCode code, const std::string& message) {
  return json_response(http_status_for(code),
                       {{"error", {{"code", error_code_name(code)}, {"message", message}}}});
}

Service::Service(std::shared_ptr<SessionEngine> engine, std::vector<TaskBundle> corpus)
    : engine_(std::move(engine)), corpus_(std::move(corpus)), server_(std::make_unique<Server>()) {
  if (!engine_) throw Error(ErrorCode::InvalidConfig, "service needs a session engine");
  engine_->set_observer([this](const EngineNotice& notice) { on_notice(notice); });
}

Service::~Service() {
  stop();
  engine_->set_observer(nullptr);
}

void Service::on_notice(const EngineNotice& notice) {
  const Session& s = notice.session;
  json payload;
  switch (notice.kind) {
    case NoticeKind::TurnReady:
      payload = {{"turn", turn_to_json(s.turns.back(), {true, is_terminal(s.state)})}};
      break;
    case NoticeKind::AwaitingFeedback:
      payload = {{"state", to_string(s.state)}, {"turn_count", s.turns.size()}};
      break;
    case NoticeKind::Terminal:
      payload = {{"state", to_string(s.state)}, {"outcome", terminal_to_json(*s.outcome)}};
      break;
    case NoticeKind::Error:
      payload = {{"message", notice.message}};
      break;
  }
  {
    std::lock_guard lock(events_mutex_);
    auto& log = logs_[s.session_id];
    ApiEvent event{s.session_id, log.events.size() + 1, notice.kind, std::move(payload)};
    log.events.push_back(std::move(event));
  }
  events_cv_.notify_all();
}

std::vector<ApiEvent> Service::events_after(const std::string& session_id, std::uint64_t after,
                                            int wait_ms) {
  std::unique_lock lock(events_mutex_);
  auto ready = [&] {
    if (stopping_) return true;
    auto it = logs_.find(session_id);
    return it != logs_.end() && it->second.events.size() > after;
  };
  if (wait_ms > 0) events_cv_.wait_for(lock, std::chrono::milliseconds(wait_ms), ready);
  std::vector<ApiEvent> out;
  auto it = logs_.find(session_id);
  if (it == logs_.end()) return out;
  for (std::size_t i = after; i < it->second.events.size(); ++i) out.push_back(it->second.events[i]);
  return out;
}

ApiResponse Service::dispatch(const ApiRequest& request) {
  try {
    auto parts = split_path(request.path);
    if (parts.size() < 2 || parts[0] != "api") {
      return error_response(ErrorCode::UnknownSession, "no route for " + request.path);
    }
    const std::string& method = request.method;
    std::int64_t now = engine_->clock().now_ms();

    if (parts[1] == "tasks" && parts.size() == 2 && method == "GET") {
      json tasks = json::array();
      for (const auto& t : corpus_) tasks.push_back(task_to_json(t));
      return json_response(200, {{"tasks", tasks}});
    }
    if (parts[1] != "sessions") {
      return error_response(ErrorCode::UnknownSession, "no route for " + request.path);
    }

    if (parts.size() == 2) {
      if (method == "GET") {
        json list = json::array();
        for (const auto& id : engine_->session_ids()) {
          list.push_back(session_summary(engine_->snapshot(id)));
        }
        return json_response(200, {{"sessions", list}});
      }
      if (method == "POST") {
        json body = parse_body(request.body);
        std::string task_id = string_field(body, "task_id", true);
        std::string mode_text = string_field(body, "mode", false);
        auto mode = mode_text.empty() ? std::optional(SessionMode::IntelliExplain)
                                      : parse_mode(mode_text);
        if (!mode) {
          throw Error(ErrorCode::PreconditionViolated, "mode must be intelliexplain or vanilla");
        }
        const TaskBundle* task = find_task(corpus_, task_id);
        if (!task) throw Error(ErrorCode::UnknownTask, "unknown task '" + task_id + "'");
        Session s = engine_->start_session(*task, *mode);
        return json_response(201, session_to_json(s, engine_->clock().now_ms()));
      }
    }

    const std::string& id = parts[2];
    if (parts.size() == 3 && method == "GET") {
      return json_response(200, session_to_json(engine_->snapshot(id), now));
    }
    if (parts.size() == 4 && method == "POST") {
      json body = parse_body(request.body);
      Session s;
      if (parts[3] == "feedback") {
        s = engine_->submit_feedback(id, string_field(body, "text", true));
      } else if (parts[3] == "complete") {
        s = engine_->complete_session(id);
      } else if (parts[3] == "skip") {
        auto reason = parse_skip_reason(string_field(body, "reason", true));
        if (!reason) {
          throw Error(ErrorCode::PreconditionViolated,
                      "reason must be unclear_question or unsolvable");
        }
        s = engine_->skip_session(id, *reason);
      } else {
        return error_response(ErrorCode::UnknownSession, "no route for " + request.path);
      }
      return json_response(200, session_to_json(s, engine_->clock().now_ms()));
    }
    if (parts.size() == 5 && parts[3] == "events" && parts[4] == "log" && method == "GET") {
      if (!engine_->has_session(id)) throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'");
      auto after_it = request.query.find("after");
      std::uint64_t after = after_it == request.query.end() ? 0 : parse_sequence(after_it->second);
      json list = json::array();
      for (const auto& e : events_after(id, after)) list.push_back(event_to_json(e));
      return json_response(200, {{"events", list}});
    }
    return error_response(ErrorCode::UnknownSession, "no route for " + method + " " + request.path);
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  }
}

void Service::run_ticker() {
  std::unique_lock lock(ticker_mutex_);
  while (!stopping_) {
    ticker_cv_.wait_for(lock, std::chrono::milliseconds(tick_interval_ms_),
                        [&] { return stopping_.load(); });
    if (stopping_) break;
    lock.unlock();
    engine_->tick_all();
    lock.lock();
  }
}

namespace {

void install_routes(httplib::Server& http, Service& service, SessionEngine& engine,
                    std::atomic<bool>& stopping) {
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Last-Event-ID");
    res.status = 204;
  });

  http.Get(R"(/api/sessions/([^/]+)/events)",
           [&service, &engine, &stopping](const httplib::Request& req, httplib::Response& res) {
             std::string id = req.matches[1];
             std::uint64_t after = 0;
             try {
               if (!engine.has_session(id)) {
                 throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'");
               }
               if (req.has_param("after")) after = parse_sequence(req.get_param_value("after"));
               else if (req.has_header("Last-Event-ID")) {
                 after = parse_sequence(req.get_header_value("Last-Event-ID"));
               }
             } catch (const Error& e) {
               auto r = error_response(e.code(), e.what());
               res.status = r.status;
               res.set_content(r.body, r.content_type);
               return;
             }
             auto cursor = std::make_shared<std::uint64_t>(after);
             res.set_header("Cache-Control", "no-cache");
             res.set_chunked_content_provider(
                 "text/event-stream",
                 [&service, &engine, &stopping, id, cursor](std::size_t, httplib::DataSink& sink) {
                   if (stopping) {
                     sink.done();
                     return true;
                   }
                   auto events = service.events_after(id, *cursor, 15000);
                   if (events.empty()) {
                     if (is_terminal(engine.snapshot(id).state)) {
                       sink.done();
                       return true;
                     }
                     static const std::string keep_alive = ": keep-alive\n\n";
                     return sink.write(keep_alive.data(), keep_alive.size());
                   }
                   for (const auto& e : events) {
                     std::string frame = event_to_sse(e);
                     if (!sink.write(frame.data(), frame.size())) return false;
                     *cursor = e.sequence;
                     if (e.kind == NoticeKind::Terminal) {
                       sink.done();
                       return true;
                     }
                   }
                   return true;
                 });
           });

  auto adapt = [&service](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request{req.method, req.path, req.body, {}};
    for (const auto& [k, v] : req.params) request.query.emplace(k, v);
    ApiResponse response = service.dispatch(request);
    res.status = response.status;
    res.set_content(response.body, response.content_type);
  };
  http.Get(R"(/api/.*)", adapt);
  http.Post(R"(/api/.*)", adapt);
}

}  // namespace

void Service::serve(const std::string& host, int port) {
  install_routes(server_->http, *this, *engine_, stopping_);
  int bound = port;
  if (port == 0) {
    bound = server_->http.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::Io, "cannot bind " + host);
  } else if (!server_->http.bind_to_port(host, port)) {
    throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  bound_port_ = bound;
  if (!ticker_.joinable()) ticker_ = std::thread([this] { run_ticker(); });
  server_->http.listen_after_bind();
}

int Service::start_background(const std::string& host, int port) {
  install_routes(server_->http, *this, *engine_, stopping_);
  int bound = port;
  if (port == 0) {
    bound = server_->http.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::Io, "cannot bind " + host);
  } else if (!server_->http.bind_to_port(host, port)) {
    throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  bound_port_ = bound;
  ticker_ = std::thread([this] { run_ticker(); });
  server_thread_ = std::thread([this] { server_->http.listen_after_bind(); });
  server_->http.wait_until_ready();
  return bound;
}

void Service::stop() {
  stopping_ = true;
  events_cv_.notify_all();
  ticker_cv_.notify_all();
  if (server_) server_->http.stop();
  if (server_thread_.joinable()) server_thread_.join();
  if (ticker_.joinable()) ticker_.join();
}

}  // namespace explainloop
