#include "explainloop/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "explainloop/error.hpp"

namespace explainloop {

using nlohmann::json;

namespace {

struct Sample {
  bool success;
  double time_ms;
};

GroupMetrics summarize(std::vector<Sample> samples) {
  GroupMetrics g;
  g.sessions = samples.size();
  if (samples.empty()) return g;
  // Fixed summation order keeps results independent of session order.
  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    return a.time_ms != b.time_ms ? a.time_ms < b.time_ms : a.success < b.success;
  });
  double n = static_cast<double>(samples.size());
  double time_sum = 0;
  for (const auto& s : samples) {
    g.successes += s.success ? 1 : 0;
    time_sum += s.time_ms;
  }
  double rate = static_cast<double>(g.successes) / n;
  double time_mean = time_sum / n;
  double time_var = 0;
  for (const auto& s : samples) time_var += (s.time_ms - time_mean) * (s.time_ms - time_mean);
  g.success_rate = rate;
  g.success_sd = std::sqrt(rate * (1.0 - rate));
  g.avg_time_ms = time_mean;
  g.time_sd_ms = std::sqrt(time_var / n);
  return g;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string percent_cell(const std::optional<double>& mean, const std::optional<double>& sd) {
  if (!mean) return "n/a";
  return fixed(*mean * 100.0, 1) + "% \xC2\xB1 " + fixed(sd.value_or(0) * 100.0, 1) + "%";
}

std::string seconds_cell(const std::optional<double>& mean, const std::optional<double>& sd) {
  if (!mean) return "n/a";
  return fixed(*mean / 1000.0, 1) + "s \xC2\xB1 " + fixed(sd.value_or(0) / 1000.0, 1) + "s";
}

std::string na_or(const std::optional<double>& v, int decimals) {
  return v ? fixed(*v, decimals) : "NA";
}

std::string pad(const std::string& text, std::size_t width) {
  // width counts code points so the "±" sign aligns like one column
  std::size_t cps = 0;
  for (unsigned char c : text) cps += (c & 0xC0) != 0x80;
  return cps >= width ? text : text + std::string(width - cps, ' ');
}

std::string strip_trailing(std::string line) {
  while (!line.empty() && line.back() == ' ') line.pop_back();
  return line;
}

}  // namespace

bool session_succeeded(const TranscriptSession& session) {
  return session.terminal && session.terminal->kind == TerminalKind::CompletedByUser &&
         session.terminal->final_verdict.success;
}

MetricsReport compute_metrics(const std::vector<TranscriptSession>& logs,
                              const std::vector<TaskBundle>& corpus) {
  MetricsReport report;
  report.n_sessions = logs.size();
  std::vector<Sample> all;
  std::array<std::vector<Sample>, 3> by_level;
  for (const auto& s : logs) {
    const TaskBundle* task = find_task(corpus, s.task_id);
    if (!task) {
      throw Error(ErrorCode::UnknownTask,
                  "session " + s.session_id + " references unknown task " + s.task_id);
    }
    if (!s.terminal) {
      ++report.incomplete_count;
      continue;
    }
    if (s.terminal->kind == TerminalKind::SkipUnclear) {
      ++report.excluded_count;
      continue;
    }
    Sample sample{session_succeeded(s), static_cast<double>(s.terminal->elapsed_ms)};
    all.push_back(sample);
    if (task->difficulty) by_level[static_cast<std::size_t>(task->difficulty->level)].push_back(sample);
  }
  report.overall = summarize(std::move(all));
  for (std::size_t i = 0; i < by_level.size(); ++i) report.per_difficulty[i] = summarize(by_level[i]);
  return report;
}

std::string_view to_string(ReportFormat format) {
  return format == ReportFormat::PlainTable ? "table" : "tsv";
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "table") return ReportFormat::PlainTable;
  if (text == "tsv") return ReportFormat::DelimitedText;
  return std::nullopt;
}

std::string render_report(const MetricsReport& report, ReportFormat format) {
  constexpr DifficultyLevel levels[] = {DifficultyLevel::Easy, DifficultyLevel::Medium,
                                        DifficultyLevel::Hard};
  std::vector<std::pair<std::string, const GroupMetrics*>> rows;
  if (report.n_sessions > 0) {
    for (std::size_t i = 0; i < 3; ++i) {
      if (report.per_difficulty[i].sessions > 0) {
        rows.emplace_back(std::string(to_string(levels[i])), &report.per_difficulty[i]);
      }
    }
    rows.emplace_back("overall", &report.overall);
  }

  std::string out;
  if (format == ReportFormat::DelimitedText) {
    out = "group\tsessions\tsuccesses\tsuccess_rate\tsuccess_sd\tavg_time_ms\ttime_sd_ms\n";
    for (const auto& [name, g] : rows) {
      out += name + "\t" + std::to_string(g->sessions) + "\t" + std::to_string(g->successes) +
             "\t" + na_or(g->success_rate, 4) + "\t" + na_or(g->success_sd, 4) + "\t" +
             na_or(g->avg_time_ms, 1) + "\t" + na_or(g->time_sd_ms, 1) + "\n";
    }
    if (report.n_sessions > 0) {
      out += "excluded\t" + std::to_string(report.excluded_count) + "\t\t\t\t\t\n";
      out += "incomplete\t" + std::to_string(report.incomplete_count) + "\t\t\t\t\t\n";
    }
    return out;
  }

  out = strip_trailing(pad("group", 10) + pad("sessions", 10) + pad("success_rate", 18) +
                       "avg_time") +
        "\n";
  for (const auto& [name, g] : rows) {
    out += strip_trailing(pad(name, 10) + pad(std::to_string(g->sessions), 10) +
                          pad(percent_cell(g->success_rate, g->success_sd), 18) +
                          seconds_cell(g->avg_time_ms, g->time_sd_ms)) +
           "\n";
  }
  if (report.n_sessions > 0) {
    out += "\nsessions: " + std::to_string(report.n_sessions) +
           ", excluded (unclear question): " + std::to_string(report.excluded_count) +
           ", incomplete: " + std::to_string(report.incomplete_count) + "\n";
  }
  return out;
}

std::string_view to_string(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::InstructionForErrorCorrection: return "instruction_for_error_correction";
    case FeedbackKind::QuestionRephrasing: return "question_rephrasing";
    case FeedbackKind::InputOutputSamples: return "input_output_samples";
    case FeedbackKind::SelfDebug: return "self_debug";
    case FeedbackKind::StepByStepInstructions: return "step_by_step_instructions";
  }
  return "self_debug";
}

std::optional<FeedbackKind> parse_feedback_kind(std::string_view text) {
  for (FeedbackKind k : kAllFeedbackKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::vector<FeedbackAnnotation> parse_annotations(std::string_view text) {
  std::vector<FeedbackAnnotation> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = "annotation line " + std::to_string(line_no) + ": ";
    FeedbackAnnotation a;
    try {
      json j = json::parse(line);
      a.session_id = j.at("session_id").get<std::string>();
      a.turn_index = j.at("turn_index").get<std::size_t>();
      auto kind = parse_feedback_kind(j.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::PreconditionViolated, where + "unknown feedback kind");
      a.kind = *kind;
      if (j.contains("accurate") && !j.at("accurate").is_null()) a.accurate = j.at("accurate").get<bool>();
      if (j.contains("complete") && !j.at("complete").is_null()) a.complete = j.at("complete").get<bool>();
      a.annotator = j.value("annotator", std::string());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::PreconditionViolated, where + e.what());
    }
    if (a.complete && a.accurate != true) {
      throw Error(ErrorCode::PreconditionViolated,
                  where + "completeness may only be judged on accurate feedback");
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<FeedbackAnnotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read annotations " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_annotations(buf.str());
}

std::vector<FeedbackKindStats> feedback_stats(const std::vector<FeedbackAnnotation>& annotations,
                                              const std::vector<TranscriptSession>& logs) {
  std::map<std::string, const TranscriptSession*> sessions;
  for (const auto& s : logs) sessions.emplace(s.session_id, &s);

  std::set<std::string> annotated_sessions;
  std::map<FeedbackKind, std::set<std::string>> kind_sessions;
  struct Tally {
    std::size_t judged = 0, accurate = 0, accurate_success = 0, completeness_judged = 0,
                complete = 0;
  };
  std::map<FeedbackKind, Tally> tallies;

  for (const auto& a : annotations) {
    auto it = sessions.find(a.session_id);
    if (it == sessions.end()) {
      throw Error(ErrorCode::DanglingAnnotation,
                  "annotation references unknown session " + a.session_id);
    }
    const auto& turns = it->second->turns;
    bool turn_exists = std::any_of(turns.begin(), turns.end(),
                                   [&](const Turn& t) { return t.index == a.turn_index; });
    if (!turn_exists) {
      throw Error(ErrorCode::DanglingAnnotation, "annotation references missing turn " +
                                                     std::to_string(a.turn_index) + " of " +
                                                     a.session_id);
    }
    annotated_sessions.insert(a.session_id);
    kind_sessions[a.kind].insert(a.session_id);
    Tally& t = tallies[a.kind];
    if (a.accurate) {
      ++t.judged;
      if (*a.accurate) {
        ++t.accurate;
        if (session_succeeded(*it->second)) ++t.accurate_success;
        if (a.complete) {
          ++t.completeness_judged;
          if (*a.complete) ++t.complete;
        }
      }
    }
  }

  std::vector<FeedbackKindStats> out;
  for (FeedbackKind kind : kAllFeedbackKinds) {
    auto ks = kind_sessions.find(kind);
    if (ks == kind_sessions.end()) continue;
    const Tally& t = tallies[kind];
    FeedbackKindStats row;
    row.kind = kind;
    row.sessions_with_kind = ks->second.size();
    row.frequency = static_cast<double>(row.sessions_with_kind) /
                    static_cast<double>(annotated_sessions.size());
    row.judged = t.judged;
    row.accurate = t.accurate;
    if (t.judged) row.accuracy = static_cast<double>(t.accurate) / static_cast<double>(t.judged);
    if (t.accurate) {
      row.success_given_accurate =
          static_cast<double>(t.accurate_success) / static_cast<double>(t.accurate);
    }
    if (t.completeness_judged) {
      row.completeness = static_cast<double>(t.complete) / static_cast<double>(t.completeness_judged);
    }
    out.push_back(row);
  }
  return out;
}

std::string render_feedback_stats(const std::vector<FeedbackKindStats>& stats,
                                  ReportFormat format) {
  auto pct = [](const std::optional<double>& v) {
    return v ? fixed(*v * 100.0, 1) + "%" : std::string("-");
  };
  std::string out;
  if (format == ReportFormat::DelimitedText) {
    out = "kind\tsessions\tfrequency\taccuracy\tsuccess_given_accurate\tcompleteness\n";
    for (const auto& s : stats) {
      out += std::string(to_string(s.kind)) + "\t" + std::to_string(s.sessions_with_kind) + "\t" +
             na_or(s.frequency, 4) + "\t" + na_or(s.accuracy, 4) + "\t" +
             na_or(s.success_given_accurate, 4) + "\t" + na_or(s.completeness, 4) + "\n";
    }
    return out;
  }
  out = strip_trailing(pad("kind", 34) + pad("sessions", 10) + pad("frequency", 11) +
                       pad("accuracy", 10) + pad("sr_accurate", 13) + "completeness") +
        "\n";
  for (const auto& s : stats) {
    out += strip_trailing(pad(std::string(to_string(s.kind)), 34) +
                          pad(std::to_string(s.sessions_with_kind), 10) + pad(pct(s.frequency), 11) +
                          pad(pct(s.accuracy), 10) + pad(pct(s.success_given_accurate), 13) +
                          pct(s.completeness)) +
           "\n";
  }
  return out;
}

}  // namespace explainloop
