#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "explainloop/session.hpp"

namespace explainloop {

/// Destination for transcript lines. Implementations must be safe for
/// concurrent appends.
class TranscriptSink {
 public:
  virtual ~TranscriptSink() = default;
  virtual void append(const std::string& line) = 0;
};

class MemoryTranscript : public TranscriptSink {
 public:
  void append(const std::string& line) override;
  std::vector<std::string> lines() const;
  std::string text() const;  // lines joined, each newline-terminated

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> lines_;
};

/// Appends to a JSONL file, flushing after every line.
class FileTranscript : public TranscriptSink {
 public:
  explicit FileTranscript(const std::filesystem::path& path);
  void append(const std::string& line) override;

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

// Line encoders ---------------------------------------------------------------

std::string transcript_session_created(const Session& session, std::int64_t at_ms);
std::string transcript_turn_added(const std::string& session_id, const Turn& turn,
                                  std::int64_t at_ms);
std::string transcript_feedback(const std::string& session_id, std::size_t turn_index,
                                const std::string& text, std::int64_t at_ms);
std::string transcript_terminal(const std::string& session_id, const TerminalOutcome& outcome,
                                std::int64_t at_ms);

// Reader ------------------------------------------------------------------------

struct TranscriptSession {
  std::string session_id;
  std::string task_id;
  SessionMode mode = SessionMode::IntelliExplain;
  std::int64_t started_at_ms = 0;
  std::int64_t deadline_ms = 0;
  std::vector<Turn> turns;
  std::vector<std::pair<std::size_t, std::string>> feedback;  // (turn index, text)
  std::optional<TerminalOutcome> terminal;
};

/// Groups transcript lines by session, in order of first appearance. Throws
/// MalformedTranscript naming the offending line.
std::vector<TranscriptSession> parse_transcript(std::string_view text);
std::vector<TranscriptSession> load_transcripts(const std::vector<std::filesystem::path>& paths);

}  // namespace explainloop
