#include <gtest/gtest.h>

#include "explainloop/session.hpp"

using namespace explainloop;

TEST(SessionEnums, NamesRoundTrip) {
  for (auto s : kAllStates) EXPECT_EQ(parse_state(to_string(s)), s);
  for (auto m : {SessionMode::IntelliExplain, SessionMode::Vanilla}) EXPECT_EQ(parse_mode(to_string(m)), m);
  for (auto k : {TerminalKind::CompletedByUser, TerminalKind::SkipUnclear, TerminalKind::SkipUnsolvable,
                 TerminalKind::Timeout}) {
    EXPECT_EQ(parse_terminal_kind(to_string(k)), k);
  }
  EXPECT_EQ(to_string(SessionState::SkippedUnclearQuestion), "skipped_unclear_question");
  EXPECT_FALSE(parse_state("bogus").has_value());
}

TEST(Transition, HappyPathIntelliExplain) {
  auto m = SessionMode::IntelliExplain;
  EXPECT_EQ(transition(SessionState::AwaitingStart, SessionEvent::Start, m, false), SessionState::Generating);
  EXPECT_EQ(transition(SessionState::AwaitingFeedback, SessionEvent::Feedback, m, false),
            SessionState::Correcting);
  EXPECT_EQ(transition(SessionState::AwaitingFeedback, SessionEvent::Complete, m, false),
            SessionState::Completed);
}

TEST(Transition, VanillaFeedbackRegenerates) {
  EXPECT_EQ(transition(SessionState::AwaitingFeedback, SessionEvent::Feedback, SessionMode::Vanilla, false),
            SessionState::Generating);
}

TEST(Transition, InvalidPairs) {
  auto m = SessionMode::IntelliExplain;
  EXPECT_FALSE(transition(SessionState::Generating, SessionEvent::Complete, m, false));
  EXPECT_FALSE(transition(SessionState::AwaitingFeedback, SessionEvent::Start, m, false));
  EXPECT_FALSE(transition(SessionState::Completed, SessionEvent::SkipUnclear, m, false));
}

TEST(Transition, ExpiryAndTerminalAbsorption) {
  auto m = SessionMode::IntelliExplain;
  EXPECT_EQ(transition(SessionState::AwaitingFeedback, SessionEvent::Tick, m, false),
            SessionState::AwaitingFeedback);
  EXPECT_EQ(transition(SessionState::AwaitingFeedback, SessionEvent::Tick, m, true), SessionState::TimedOut);
  EXPECT_EQ(transition(SessionState::Completed, SessionEvent::Tick, m, true), SessionState::Completed);
  for (auto s : kAllStates) EXPECT_EQ(is_terminal(s), transition(s, SessionEvent::Start, m, true) == std::nullopt);
}

TEST(ManualClockTest, SetAndAdvance) {
  ManualClock c(5);
  EXPECT_EQ(c.now_ms(), 5);
  c.advance(10);
  EXPECT_EQ(c.now_ms(), 15);
  c.set(1);
  EXPECT_EQ(c.now_ms(), 1);
  EXPECT_GT(SystemClock{}.now_ms(), 1600000000000);
}
