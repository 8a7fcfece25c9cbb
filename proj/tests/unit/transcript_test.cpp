#include <gtest/gtest.h>

#include <filesystem>

#include "explainloop/error.hpp"
#include "fixtures.hpp"

using namespace explainloop;
using namespace explainloop::testing;

namespace {

ErrorCode parse_error(const std::string& text, std::string* message = nullptr) {
  try {
    parse_transcript(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST(Transcript, EngineLogRoundTrips) {
  StubWorld w(fixture_rules());
  auto s = w.engine->start_session(task("sql-002"), SessionMode::IntelliExplain);
  w.clock->advance(45000);
  s = w.engine->submit_feedback(s.session_id, "Also count the students in grade 10.");
  w.clock->advance(15000);
  s = w.engine->complete_session(s.session_id);

  auto parsed = parse_transcript(w.transcript->text());
  ASSERT_EQ(parsed.size(), 1u);
  const auto& p = parsed[0];
  EXPECT_EQ(p.session_id, s.session_id);
  EXPECT_EQ(p.task_id, "sql-002");
  EXPECT_EQ(p.mode, SessionMode::IntelliExplain);
  EXPECT_EQ(p.deadline_ms, 300000);
  ASSERT_EQ(p.turns.size(), 2u);
  EXPECT_EQ(p.turns[1].code, s.turns[1].code);
  EXPECT_EQ(p.turns[1].explanation, s.turns[1].explanation);
  EXPECT_EQ(p.turns[1].verdict, s.turns[1].verdict);
  ASSERT_EQ(p.feedback.size(), 1u);
  EXPECT_EQ(p.feedback[0].first, 0u);
  EXPECT_EQ(p.feedback[0].second, "Also count the students in grade 10.");
  ASSERT_TRUE(p.terminal);
  EXPECT_EQ(*p.terminal, *s.outcome);
  EXPECT_EQ(p.terminal->elapsed_ms, 60000);
}

TEST(Transcript, SessionsKeepOrderOfFirstAppearance) {
  StubWorld w(fixture_rules());
  auto a = w.engine->start_session(task("sql-001"), SessionMode::IntelliExplain);
  auto b = w.engine->start_session(task("sql-008"), SessionMode::Vanilla);
  w.engine->complete_session(b.session_id);
  w.engine->complete_session(a.session_id);
  auto parsed = parse_transcript(w.transcript->text());
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0].session_id, a.session_id);
  EXPECT_EQ(parsed[1].mode, SessionMode::Vanilla);
}

TEST(Transcript, FileSinkWritesLines) {
  auto path = std::filesystem::temp_directory_path() / "explainloop_transcript_test.jsonl";
  std::filesystem::remove(path);
  {
    auto sink = std::make_shared<FileTranscript>(path);
    StubWorld w(fixture_rules());
    SessionEngine engine(w.gateway, w.sandbox, default_demos(), w.clock, {}, sink);
    auto s = engine.start_session(task("sql-001"), SessionMode::IntelliExplain);
    engine.skip_session(s.session_id, SkipReason::UnclearQuestion);
  }
  auto parsed = load_transcripts({path});
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].terminal->kind, TerminalKind::SkipUnclear);
  std::filesystem::remove(path);
}

TEST(Transcript, BlankLinesAreIgnored) {
  StubWorld w(fixture_rules());
  w.engine->start_session(task("sql-001"), SessionMode::IntelliExplain);
  auto text = "\n" + w.transcript->text() + "\n  \n";
  EXPECT_EQ(parse_transcript(text).size(), 1u);
}

TEST(Transcript, MalformedLinesAreNamed) {
  std::string created =
      R"({"event":"session_created","session_id":"a","task_id":"sql-001","mode":"vanilla","started_at_ms":0,"deadline_ms":300000,"at_ms":0})";
  std::string message;
  EXPECT_EQ(parse_error(created + "\n{not json\n", &message), ErrorCode::MalformedTranscript);
  EXPECT_NE(message.find("line 2"), std::string::npos);
  EXPECT_EQ(parse_error(created + "\n" + created + "\n"), ErrorCode::MalformedTranscript);
  EXPECT_EQ(parse_error(R"({"event":"feedback","session_id":"zz","turn_index":0,"text":"x","at_ms":1})"),
            ErrorCode::MalformedTranscript);
  EXPECT_EQ(parse_error(R"({"event":"exploded","session_id":"a"})"), ErrorCode::MalformedTranscript);
  EXPECT_EQ(parse_error(R"({"session_id":"a"})"), ErrorCode::MalformedTranscript);
}

TEST(Transcript, EventsAfterTerminalAreRejected) {
  StubWorld w(fixture_rules());
  auto s = w.engine->start_session(task("sql-001"), SessionMode::IntelliExplain);
  w.engine->complete_session(s.session_id);
  auto text = w.transcript->text() + transcript_feedback(s.session_id, 0, "late", 5) + "\n";
  EXPECT_EQ(parse_error(text), ErrorCode::MalformedTranscript);
}
