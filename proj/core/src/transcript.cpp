#include "explainloop/transcript.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "explainloop/error.hpp"
#include "explainloop/json_codec.hpp"

namespace explainloop {

using nlohmann::json;

void MemoryTranscript::append(const std::string& line) {
  std::lock_guard lock(mutex_);
  lines_.push_back(line);
}

std::vector<std::string> MemoryTranscript::lines() const {
  std::lock_guard lock(mutex_);
  return lines_;
}

std::string MemoryTranscript::text() const {
  std::lock_guard lock(mutex_);
  std::string out;
  for (const auto& l : lines_) out += l + "\n";
  return out;
}

FileTranscript::FileTranscript(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::app);
  if (!out_) throw Error(ErrorCode::Io, "cannot open transcript " + path.string());
}

void FileTranscript::append(const std::string& line) {
  std::lock_guard lock(mutex_);
  out_ << line << '\n';
  out_.flush();
}

std::string transcript_session_created(const Session& session, std::int64_t at_ms) {
  return json{{"event", "session_created"},
              {"session_id", session.session_id},
              {"task_id", session.task.task_id},
              {"mode", to_string(session.mode)},
              {"started_at_ms", session.started_at_ms},
              {"deadline_ms", session.deadline_ms},
              {"at_ms", at_ms}}
      .dump();
}

std::string transcript_turn_added(const std::string& session_id, const Turn& turn,
                                  std::int64_t at_ms) {
  return json{{"event", "turn_added"},
              {"session_id", session_id},
              {"turn", turn_to_json(turn, {false, true})},
              {"at_ms", at_ms}}
      .dump();
}

std::string transcript_feedback(const std::string& session_id, std::size_t turn_index,
                                const std::string& text, std::int64_t at_ms) {
  return json{{"event", "feedback"},
              {"session_id", session_id},
              {"turn_index", turn_index},
              {"text", text},
              {"at_ms", at_ms}}
      .dump();
}

std::string transcript_terminal(const std::string& session_id, const TerminalOutcome& outcome,
                                std::int64_t at_ms) {
  json j = terminal_to_json(outcome);
  j["event"] = "terminal";
  j["session_id"] = session_id;
  j["at_ms"] = at_ms;
  return j.dump();
}

std::vector<TranscriptSession> parse_transcript(std::string_view text) {
  std::vector<TranscriptSession> sessions;
  std::map<std::string, std::size_t> index;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) -> Error {
      return Error(ErrorCode::MalformedTranscript,
                   "transcript line " + std::to_string(line_no) + ": " + why);
    };
    try {
      json j = json::parse(line);
      std::string event = j.at("event").get<std::string>();
      std::string id = j.at("session_id").get<std::string>();

      if (event == "session_created") {
        if (index.count(id)) throw fail("session " + id + " created twice");
        TranscriptSession s;
        s.session_id = id;
        s.task_id = j.at("task_id").get<std::string>();
        auto mode = parse_mode(j.at("mode").get<std::string>());
        if (!mode) throw fail("unknown mode");
        s.mode = *mode;
        s.started_at_ms = j.at("started_at_ms").get<std::int64_t>();
        s.deadline_ms = j.at("deadline_ms").get<std::int64_t>();
        index.emplace(id, sessions.size());
        sessions.push_back(std::move(s));
        continue;
      }

      auto it = index.find(id);
      if (it == index.end()) throw fail("event for unknown session " + id);
      TranscriptSession& s = sessions[it->second];
      if (s.terminal) throw fail("event after terminal outcome of " + id);

      if (event == "turn_added") {
        s.turns.push_back(turn_from_json(j.at("turn")));
      } else if (event == "feedback") {
        s.feedback.emplace_back(j.at("turn_index").get<std::size_t>(),
                                j.at("text").get<std::string>());
      } else if (event == "terminal") {
        s.terminal = terminal_from_json(j);
      } else {
        throw fail("unknown event '" + event + "'");
      }
    } catch (const json::exception& e) {
      throw fail(e.what());
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
  }
  return sessions;
}

std::vector<TranscriptSession> load_transcripts(const std::vector<std::filesystem::path>& paths) {
  std::string all;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read transcript " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    all += buf.str();
    if (!all.empty() && all.back() != '\n') all += '\n';
  }
  return parse_transcript(all);
}

}  // namespace explainloop
