#include <gtest/gtest.h>

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <thread>

#include "explainloop/service.hpp"
#include "fixtures.hpp"

using namespace explainloop;
using namespace explainloop::testing;
using nlohmann::json;

namespace {

struct ServiceWorld {
  StubWorld world{fixture_rules()};
  Service service{world.engine, full_corpus()};

  ApiResponse call(const std::string& method, const std::string& path, const json& body = nullptr,
                   std::map<std::string, std::string> query = {}) {
    return service.dispatch({method, path, body.is_null() ? "" : body.dump(), std::move(query)});
  }

  std::string create(const std::string& task_id, const std::string& mode = "intelliexplain") {
    auto r = call("POST", "/api/sessions", {{"task_id", task_id}, {"mode", mode}});
    EXPECT_EQ(r.status, 201) << r.body;
    return json::parse(r.body).at("session_id").get<std::string>();
  }
};

void strip_timing(json& j) {
  if (j.is_object()) {
    j.erase("wall_ms");
    for (auto& [_, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

std::vector<std::string> sse_ids(const std::string& stream) {
  std::vector<std::string> ids;
  std::size_t pos = 0;
  while ((pos = stream.find("id: ", pos)) != std::string::npos) {
    auto end = stream.find('\n', pos);
    ids.push_back(stream.substr(pos + 4, end - pos - 4));
    pos = end;
  }
  return ids;
}

}  // namespace

TEST(Service, CreateReturnsFirstTurn) {
  ServiceWorld w;
  auto r = w.call("POST", "/api/sessions", {{"task_id", "sql-001"}, {"mode", "intelliexplain"}});
  ASSERT_EQ(r.status, 201);
  auto j = json::parse(r.body);
  EXPECT_EQ(j["state"], "awaiting_feedback");
  ASSERT_EQ(j["turns"].size(), 1u);
  EXPECT_EQ(j["turns"][0]["code"], "SELECT grade FROM Highschooler");
  EXPECT_FALSE(j["turns"][0]["explanation"].get<std::string>().empty());
  EXPECT_FALSE(j["turns"][0].contains("verdict"));
  EXPECT_FALSE(j["task"].contains("gold_code"));
  EXPECT_EQ(j["remaining_ms"], 300000);
}

TEST(Service, DefaultModeIsIntelliExplain) {
  ServiceWorld w;
  auto r = w.call("POST", "/api/sessions", {{"task_id", "sql-001"}});
  EXPECT_EQ(json::parse(r.body)["mode"], "intelliexplain");
}

TEST(Service, FullLoopThroughDispatch) {
  ServiceWorld w;
  auto id = w.create("sql-002");
  auto r = w.call("POST", "/api/sessions/" + id + "/feedback",
                  {{"text", "Also count the students in grade 10."}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(json::parse(r.body)["turns"].size(), 2u);
  r = w.call("POST", "/api/sessions/" + id + "/complete", json::object());
  auto j = json::parse(r.body);
  EXPECT_EQ(j["state"], "completed");
  EXPECT_EQ(j["outcome"]["final_verdict"]["success"], true);
  EXPECT_TRUE(j["turns"][1].contains("verdict"));

  r = w.call("POST", "/api/sessions/" + id + "/feedback", {{"text", "more"}});
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(json::parse(r.body)["error"]["code"], "invalid_state");
}

TEST(Service, ErrorStatuses) {
  ServiceWorld w;
  EXPECT_EQ(w.call("GET", "/api/sessions/nope").status, 404);
  EXPECT_EQ(w.call("POST", "/api/sessions", {{"task_id", "sql-999"}}).status, 404);
  EXPECT_EQ(w.call("GET", "/api/elsewhere").status, 404);
  EXPECT_EQ(w.call("POST", "/api/sessions", {{"mode", "vanilla"}}).status, 422);
  EXPECT_EQ(w.call("POST", "/api/sessions", {{"task_id", "sql-001"}, {"mode", "chatty"}}).status, 422);
  EXPECT_EQ(w.service.dispatch({"POST", "/api/sessions", "[1,2]", {}}).status, 422);
  auto id = w.create("sql-001");
  EXPECT_EQ(w.call("POST", "/api/sessions/" + id + "/feedback", {{"text", "  "}}).status, 422);
  EXPECT_EQ(w.call("POST", "/api/sessions/" + id + "/skip", {{"reason", "bored"}}).status, 422);
  EXPECT_EQ(w.call("GET", "/api/sessions/" + id + "/events/log", nullptr, {{"after", "-1"}}).status,
            422);
  EXPECT_EQ(http_status_for(ErrorCode::CassetteMiss), 502);
}

TEST(Service, ResponsesMatchEngineSnapshots) {
  ServiceWorld w;
  auto id = w.create("mbpp-4");
  auto r = w.call("POST", "/api/sessions/" + id + "/feedback",
                  {{"text", "Positions are counted from 1, so return the element at index k - 1."}});
  auto api = json::parse(r.body);
  auto snap = w.world.engine->snapshot(id);
  ASSERT_EQ(api["turns"].size(), snap.turns.size());
  for (std::size_t i = 0; i < snap.turns.size(); ++i) {
    EXPECT_EQ(api["turns"][i]["code"], snap.turns[i].code);
    EXPECT_EQ(api["turns"][i]["explanation"], snap.turns[i].explanation);
  }
  EXPECT_EQ(api["state"], std::string(to_string(snap.state)));
}

TEST(Service, SkipAndListing) {
  ServiceWorld w;
  auto a = w.create("sql-013");
  w.create("sql-008", "vanilla");
  auto r = w.call("POST", "/api/sessions/" + a + "/skip", {{"reason", "unclear_question"}});
  EXPECT_EQ(json::parse(r.body)["state"], "skipped_unclear_question");
  auto list = json::parse(w.call("GET", "/api/sessions").body)["sessions"];
  ASSERT_EQ(list.size(), 2u);
  auto tasks = json::parse(w.call("GET", "/api/tasks").body)["tasks"];
  EXPECT_EQ(tasks.size(), 45u);
}

TEST(Service, EventLogIsContiguous) {
  ServiceWorld w;
  auto id = w.create("sql-002");
  w.call("POST", "/api/sessions/" + id + "/feedback", {{"text", "Also count the students in grade 10."}});
  w.call("POST", "/api/sessions/" + id + "/complete", json::object());
  auto events = w.service.events_after(id, 0);
  ASSERT_EQ(events.size(), 5u);
  for (std::size_t i = 0; i < events.size(); ++i) EXPECT_EQ(events[i].sequence, i + 1);
  EXPECT_EQ(events.back().kind, NoticeKind::Terminal);
  EXPECT_EQ(events.back().payload["state"], "completed");
  EXPECT_EQ(w.service.events_after(id, 3).size(), 2u);
  auto log = json::parse(w.call("GET", "/api/sessions/" + id + "/events/log", nullptr, {{"after", "4"}}).body);
  ASSERT_EQ(log["events"].size(), 1u);
  EXPECT_EQ(log["events"][0]["sequence"], 5);
  EXPECT_EQ(event_to_sse(events[0]).rfind("id: 1\nevent: turn_ready\ndata: ", 0), 0u);
}

TEST(Service, ApiSessionGolden) {
  ServiceWorld w;
  auto id = w.create("sql-002");
  w.call("POST", "/api/sessions/" + id + "/feedback", {{"text", "Also count the students in grade 10."}});
  auto open = json::parse(w.call("GET", "/api/sessions/" + id).body);
  w.call("POST", "/api/sessions/" + id + "/complete", json::object());
  auto closed = json::parse(w.call("GET", "/api/sessions/" + id).body);
  strip_timing(open);
  strip_timing(closed);
  json both = {{"open", open}, {"closed", closed}};
  EXPECT_EQ(golden_mismatch("api_session.json", both.dump(2) + "\n"), "");
}

TEST(Service, HttpEndToEndWithTwoStreamSubscribers) {
  ServiceWorld w;
  int port = w.service.start_background("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);

  auto created = client.Post("/api/sessions", R"({"task_id":"sql-002"})", "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  auto id = json::parse(created->body)["session_id"].get<std::string>();

  std::string streams[2];
  std::thread readers[2];
  for (int i = 0; i < 2; ++i) {
    readers[i] = std::thread([&, i] {
      httplib::Client c("127.0.0.1", port);
      c.set_read_timeout(20, 0);
      c.Get("/api/sessions/" + id + "/events", [&](const char* data, size_t n) {
        streams[i].append(data, n);
        return true;
      });
    });
  }
  auto fb = client.Post("/api/sessions/" + id + "/feedback",
                        R"({"text":"Also count the students in grade 10."})", "application/json");
  ASSERT_TRUE(fb);
  EXPECT_EQ(fb->status, 200);
  auto done = client.Post("/api/sessions/" + id + "/complete", "{}", "application/json");
  ASSERT_TRUE(done);
  EXPECT_EQ(json::parse(done->body)["state"], "completed");
  for (auto& r : readers) r.join();

  EXPECT_EQ(sse_ids(streams[0]), (std::vector<std::string>{"1", "2", "3", "4", "5"}));
  EXPECT_EQ(sse_ids(streams[0]), sse_ids(streams[1]));
  EXPECT_NE(streams[0].find("event: terminal"), std::string::npos);

  auto missing = client.Get("/api/sessions/nope");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  w.service.stop();
}

TEST(Service, TickerExpiresIdleSessions) {
  ServiceWorld w;
  auto id = w.create("sql-001");
  w.service.set_tick_interval_ms(10);
  w.service.start_background("127.0.0.1", 0);
  w.world.clock->set(301000);
  auto events = w.service.events_after(id, 2, 3000);
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.back().kind, NoticeKind::Terminal);
  EXPECT_EQ(events.back().payload["outcome"]["kind"], "timeout");
  w.service.stop();
}
