#include <gtest/gtest.h>

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#include "explainloop/error.hpp"
#include "fixtures.hpp"

using namespace explainloop;
using namespace explainloop::testing;
namespace fs = std::filesystem;

namespace {

class CapturingTransport : public Transport {
 public:
  explicit CapturingTransport(HttpResponse response) : response_(std::move(response)) {}
  HttpResponse post(const HttpRequest& request) override {
    requests.push_back(request);
    return response_;
  }
  std::vector<HttpRequest> requests;

 private:
  HttpResponse response_;
};

std::string chat_body(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}
      .dump();
}

PromptBundle sample_bundle(const std::string& text = "hello") {
  return make_bundle(PromptPurpose::CodeGen, {{Role::System, "sys"}, {Role::User, text}});
}

fs::path temp_file(const std::string& name) {
  auto p = fs::temp_directory_path() / ("explainloop-gw-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Gateway, RequestBodyShape) {
  ModelConfig config;
  auto body = nlohmann::json::parse(Gateway::request_body(sample_bundle(), config));
  EXPECT_EQ(body["model"], "gpt-3.5-turbo-0613");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["max_tokens"], 512);
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(body["messages"][1]["content"], "hello");
}

TEST(Gateway, LiveCallsProviderWithCredentialFromEnvironment) {
  ::setenv("EXPLAINLOOP_TEST_KEY", "sk-test", 1);
  auto transport = std::make_shared<CapturingTransport>(HttpResponse{200, chat_body("SELECT 1")});
  ModelConfig config;
  config.credential_ref = "EXPLAINLOOP_TEST_KEY";
  Gateway gw(config, GatewayMode::Live, transport, std::make_shared<Cassette>());
  EXPECT_EQ(gw.complete(sample_bundle()), "SELECT 1");
  ASSERT_EQ(transport->requests.size(), 1u);
  bool has_auth = false;
  for (const auto& [k, v] : transport->requests[0].headers) {
    if (k == "Authorization") has_auth = v == "Bearer sk-test";
  }
  EXPECT_TRUE(has_auth);
  EXPECT_EQ(gw.cassette()->size(), 0u);
  ::unsetenv("EXPLAINLOOP_TEST_KEY");
}

TEST(Gateway, ReplayMissRaisesWithoutNetwork) {
  auto transport = std::make_shared<CapturingTransport>(HttpResponse{200, chat_body("x")});
  Gateway gw(ModelConfig{}, GatewayMode::Replay, transport, std::make_shared<Cassette>());
  auto bundle = sample_bundle();
  try {
    gw.complete(bundle);
    FAIL();
  } catch (const CassetteMissError& e) {
    EXPECT_EQ(e.code(), ErrorCode::CassetteMiss);
    EXPECT_NE(std::string(e.what()).find(bundle.fingerprint), std::string::npos);
  }
  EXPECT_TRUE(transport->requests.empty());
}

TEST(Gateway, RecordThenReplayPersistsAndReusesCompletions) {
  auto path = temp_file("record.jsonl");
  auto transport = std::make_shared<CapturingTransport>(HttpResponse{200, chat_body("reply")});
  {
    Gateway gw(ModelConfig{}, GatewayMode::RecordThenReplay, transport,
               std::make_shared<Cassette>(path));
    EXPECT_EQ(gw.complete(sample_bundle()), "reply");
    EXPECT_EQ(gw.complete(sample_bundle()), "reply");
    EXPECT_EQ(gw.network_calls(), 1u);
  }
  auto reloaded = std::make_shared<Cassette>(path);
  ASSERT_EQ(reloaded->size(), 1u);
  Gateway replay(ModelConfig{}, GatewayMode::Replay, transport, reloaded);
  EXPECT_EQ(replay.complete(sample_bundle()), "reply");
  EXPECT_EQ(transport->requests.size(), 1u);
}

TEST(Gateway, OverwriteRequestsAgainAndLastLineWins) {
  auto path = temp_file("overwrite.jsonl");
  auto first = std::make_shared<CapturingTransport>(HttpResponse{200, chat_body("old")});
  Gateway(ModelConfig{}, GatewayMode::RecordThenReplay, first, std::make_shared<Cassette>(path))
      .complete(sample_bundle());
  auto second = std::make_shared<CapturingTransport>(HttpResponse{200, chat_body("new")});
  Gateway(ModelConfig{}, GatewayMode::RecordThenReplay, second, std::make_shared<Cassette>(path), true)
      .complete(sample_bundle());
  Cassette reloaded(path);
  EXPECT_EQ(reloaded.size(), 1u);
  EXPECT_EQ(reloaded.find(sample_bundle().fingerprint)->response_text, "new");
}

TEST(Gateway, ProviderErrorCarriesStatusAndExcerpt) {
  auto transport = std::make_shared<CapturingTransport>(HttpResponse{429, std::string(500, 'r')});
  Gateway gw(ModelConfig{}, GatewayMode::Live, transport, std::make_shared<Cassette>());
  try {
    gw.complete(sample_bundle());
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderError);
    EXPECT_EQ(e.status(), 429);
    EXPECT_LT(std::string(e.what()).size(), 300u);
  }
  auto garbage = std::make_shared<CapturingTransport>(HttpResponse{200, "{}"});
  Gateway gw2(ModelConfig{}, GatewayMode::Live, garbage, std::make_shared<Cassette>());
  EXPECT_THROW(gw2.complete(sample_bundle()), ProviderError);
}

TEST(Cassette, RecordRoundTrip) {
  CompletionRecord r{sample_bundle().fingerprint, sample_bundle(), "out", 12, "2024-01-01T00:00:00Z"};
  EXPECT_EQ(decode_record(encode_record(r)), r);
}

TEST(Cassette, CorruptLinesAreRejected) {
  EXPECT_THROW(decode_record("not json"), Error);
  CompletionRecord r{sample_bundle().fingerprint, sample_bundle(), "out", 1, "t"};
  auto j = nlohmann::json::parse(encode_record(r));
  j["fingerprint"] = std::string(64, '0');
  try {
    decode_record(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CassetteCorrupt);
  }
  auto path = temp_file("corrupt.jsonl");
  std::ofstream(path) << encode_record(r) << "\n{broken\n";
  EXPECT_THROW(Cassette{path}, Error);
}

TEST(Cassette, FixtureCassetteCoversFixtureRuns) {
  Cassette c(data_dir() / "cassettes/fixture.jsonl");
  EXPECT_GT(c.size(), 20u);
  for (const auto& r : c.records()) EXPECT_EQ(r.fingerprint, r.request.fingerprint);
}

TEST(ScriptedTransport, MatchesPurposeAndSubstrings) {
  auto t = ScriptedTransport::from_json_text(R"({"rules": [
      {"purpose": "restate_explain", "contains": "needle", "response": "A"},
      {"contains": ["needle", "hay"], "response": "B"},
      {"response": "C"}]})");
  Gateway gw(ModelConfig{}, GatewayMode::Live,
             std::make_shared<ScriptedTransport>(std::move(t)), std::make_shared<Cassette>());
  EXPECT_EQ(gw.complete(sample_bundle("needle in hay")), "B");
  EXPECT_EQ(gw.complete(make_bundle(PromptPurpose::RestateExplain, {{Role::User, "needle"}})), "A");
  EXPECT_EQ(gw.complete(sample_bundle("other")), "C");
}

TEST(ScriptedTransport, UnmatchedRequestIsProviderError) {
  Gateway gw(ModelConfig{}, GatewayMode::Live, std::make_shared<ScriptedTransport>(),
             std::make_shared<Cassette>());
  EXPECT_THROW(gw.complete(sample_bundle()), ProviderError);
}

TEST(HttplibTransport, TalksToAnOpenAiShapedEndpoint) {
  httplib::Server server;
  std::string seen_auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    auto body = nlohmann::json::parse(req.body);
    res.set_content(chat_body("echo: " + body["messages"].back()["content"].get<std::string>()),
                    "application/json");
  });
  server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content(chat_body("late"), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("EXPLAINLOOP_TEST_KEY2", "sk-local", 1);
  ModelConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  config.credential_ref = "EXPLAINLOOP_TEST_KEY2";
  Gateway gw(config, GatewayMode::Live, std::make_shared<HttplibTransport>(),
             std::make_shared<Cassette>());
  EXPECT_EQ(gw.complete(sample_bundle("ping")), "echo: ping");
  EXPECT_EQ(seen_auth, "Bearer sk-local");

  ModelConfig slow = config;
  slow.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/slow";
  slow.timeout_ms = 300;
  Gateway slow_gw(slow, GatewayMode::Live, std::make_shared<HttplibTransport>(),
                  std::make_shared<Cassette>());
  try {
    slow_gw.complete(sample_bundle());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GatewayTimeout);
  }

  ModelConfig closed = config;
  closed.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  Gateway closed_gw(closed, GatewayMode::Live, std::make_shared<HttplibTransport>(),
                    std::make_shared<Cassette>());
  EXPECT_THROW(closed_gw.complete(sample_bundle()), ProviderError);

  server.stop();
  th.join();
  ::unsetenv("EXPLAINLOOP_TEST_KEY2");
}
