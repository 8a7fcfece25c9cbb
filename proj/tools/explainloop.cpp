#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <thread>
#include <vector>

#include "explainloop/batch.hpp"
#include "explainloop/error.hpp"
#include "explainloop/eval_harness.hpp"
#include "explainloop/json_codec.hpp"
#include "explainloop/llm_gateway.hpp"
#include "explainloop/service.hpp"

namespace fs = std::filesystem;
using namespace explainloop;

namespace {

struct Options {
  std::vector<std::string> corpora;
  std::string cassette;
  std::string mode = "replay";
  std::int64_t deadline_ms = 300000;
  std::string report_format = "table";
  std::string demos = std::string(EXPLAINLOOP_DEFAULT_DATA_DIR) + "/demos/default.demos";
  std::string python = "python3";
  std::string stub_rules;
  std::string endpoint;
  std::string model;
  std::string credential_env;
  bool overwrite = false;
};

std::vector<TaskBundle> load_corpora(const Options& opts) {
  std::vector<std::string> specs = opts.corpora;
  if (specs.empty()) {
    std::string base = std::string(EXPLAINLOOP_DEFAULT_DATA_DIR) + "/corpora/";
    specs = {"spider:" + base + "spider_fixture", "mbpp:" + base + "mbpp_fixture"};
  }
  std::vector<TaskBundle> all;
  for (const auto& spec : specs) {
    TaskOrigin origin = TaskOrigin::Custom;
    std::string path = spec;
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
      if (auto o = parse_origin(spec.substr(0, colon))) {
        origin = *o;
        path = spec.substr(colon + 1);
      }
    }
    auto tasks = load_corpus(path, origin);
    for (auto& t : tasks) {
      if (find_task(all, t.task_id)) {
        throw Error(ErrorCode::MalformedTask, "duplicate task id '" + t.task_id + "'");
      }
      all.push_back(std::move(t));
    }
  }
  return all;
}

ReportFormat report_format(const Options& opts) {
  auto f = parse_report_format(opts.report_format);
  if (!f) throw Error(ErrorCode::InvalidConfig, "unknown report format '" + opts.report_format + "'");
  return *f;
}

std::shared_ptr<Gateway> make_gateway(const Options& opts, GatewayMode mode) {
  ModelConfig config;
  if (!opts.endpoint.empty()) config.endpoint = opts.endpoint;
  if (!opts.model.empty()) config.model_name = opts.model;
  if (!opts.credential_env.empty()) config.credential_ref = opts.credential_env;

  std::shared_ptr<Transport> transport;
  if (!opts.stub_rules.empty()) {
    transport = std::make_shared<ScriptedTransport>(ScriptedTransport::from_file(opts.stub_rules));
  } else {
    transport = std::make_shared<HttplibTransport>();
  }
  auto cassette = opts.cassette.empty() ? std::make_shared<Cassette>()
                                        : std::make_shared<Cassette>(fs::path(opts.cassette));
  return std::make_shared<Gateway>(config, mode, transport, cassette, opts.overwrite);
}

GatewayMode gateway_mode(const Options& opts) {
  auto m = parse_gateway_mode(opts.mode);
  if (!m) throw Error(ErrorCode::InvalidConfig, "unknown gateway mode '" + opts.mode + "'");
  return *m;
}

std::shared_ptr<const Sandbox> make_sandbox(const Options& opts) {
  SandboxConfig config;
  config.python_path = opts.python;
  return std::make_shared<const Sandbox>(config);
}

EngineConfig engine_config(const Options& opts) {
  if (opts.deadline_ms <= 0) throw Error(ErrorCode::InvalidConfig, "deadline must be positive");
  EngineConfig config;
  config.deadline_ms = opts.deadline_ms;
  return config;
}

nlohmann::json run_summary(const RunResult& r) {
  nlohmann::json j = {{"index", r.index},
                      {"session_id", r.session_id},
                      {"task_id", r.task_id},
                      {"expectation_met", r.expectation_met}};
  if (r.session) {
    j["state"] = to_string(r.session->state);
    j["turns"] = r.session->turns.size();
  }
  if (r.error) j["error"] = *r.error;
  return j;
}

int emit_batch(const BatchResult& result, const Options& opts, const std::string& transcript_out,
               bool quiet_runs) {
  if (!transcript_out.empty()) {
    std::ofstream out(transcript_out);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + transcript_out);
    out << result.transcript;
  }
  if (!quiet_runs) {
    for (const auto& r : result.runs) std::cerr << run_summary(r).dump() << "\n";
  }
  std::cout << render_report(result.report, report_format(opts));
  for (const auto& r : result.runs) {
    if (!r.expectation_met) return 1;
  }
  return 0;
}

volatile std::sig_atomic_t g_stop = 0;

void handle_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explainloop: explanation-guided code generation sessions"};
  app.require_subcommand(1);
  Options opts;

  auto add_corpus = [&](CLI::App* cmd) {
    cmd->add_option("--corpus", opts.corpora, "Corpus directory or manifest, as [origin:]path");
  };
  auto add_engine = [&](CLI::App* cmd) {
    add_corpus(cmd);
    cmd->add_option("--cassette", opts.cassette, "Completion cassette (JSONL)");
    cmd->add_option("--mode", opts.mode, "Gateway mode")
        ->check(CLI::IsMember({"live", "replay", "record"}));
    cmd->add_option("--deadline-ms", opts.deadline_ms, "Session deadline in milliseconds");
    cmd->add_option("--demos", opts.demos, "Demonstration file");
    cmd->add_option("--python", opts.python, "Python interpreter for test cases");
    cmd->add_option("--stub-rules", opts.stub_rules, "Scripted provider rules instead of HTTP");
    cmd->add_option("--endpoint", opts.endpoint, "Chat-completion endpoint URL");
    cmd->add_option("--model", opts.model, "Model name");
    cmd->add_option("--credential-env", opts.credential_env,
                    "Name of the environment variable holding the API key");
  };
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--report-format", opts.report_format, "Report format")
        ->check(CLI::IsMember({"table", "tsv"}));
  };

  auto* corpus = app.add_subcommand("corpus", "Corpus preparation");
  corpus->require_subcommand(1);
  auto* validate = corpus->add_subcommand("validate", "Load and validate corpora");
  add_corpus(validate);

  auto* session = app.add_subcommand("session", "Single sessions");
  session->require_subcommand(1);
  auto* session_run = session->add_subcommand("run", "Run one scripted session and print it");
  add_engine(session_run);
  std::string task_id;
  std::string session_mode = "intelliexplain";
  std::vector<std::string> feedback;
  std::string finish = "complete";
  std::int64_t step_ms = 30000;
  session_run->add_option("--task", task_id, "Task id")->required();
  session_run->add_option("--session-mode", session_mode, "intelliexplain or vanilla")
      ->check(CLI::IsMember({"intelliexplain", "vanilla"}));
  session_run->add_option("--feedback", feedback, "Feedback message, in order");
  session_run->add_option("--finish", finish, "Finishing action")
      ->check(CLI::IsMember({"complete", "skip_unclear", "skip_unsolvable", "timeout"}));
  session_run->add_option("--step-ms", step_ms, "Simulated time per user action");

  std::string runs_path;
  std::string transcript_out;
  bool replay_flag = false;
  auto* batch = app.add_subcommand("batch", "Play scripted runs and report metrics");
  add_engine(batch);
  add_format(batch);
  batch->add_option("--runs", runs_path, "Runs file")->required();
  batch->add_option("--transcript-out", transcript_out, "Write the transcript here");
  batch->add_flag("--replay", replay_flag, "Shorthand for --mode replay");

  std::vector<std::string> logs;
  std::string annotations_path;
  auto* report = app.add_subcommand("report", "Metrics from transcripts");
  add_corpus(report);
  add_format(report);
  report->add_option("logs", logs, "Transcript files")->required();
  report->add_option("--annotations", annotations_path, "Feedback annotations (JSONL)");

  auto* cassette = app.add_subcommand("cassette", "Cassette maintenance");
  cassette->require_subcommand(1);
  auto* record = cassette->add_subcommand("record", "Record completions for scripted runs");
  add_engine(record);
  add_format(record);
  record->add_option("--runs", runs_path, "Runs file")->required();
  record->add_flag("--overwrite", opts.overwrite, "Re-request prompts already recorded");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string transcript_path;
  auto* serve = app.add_subcommand("serve", "HTTP API for interactive sessions");
  add_engine(serve);
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port; 0 picks one");
  serve->add_option("--transcript", transcript_path, "Append session transcripts here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (validate->parsed()) {
      auto tasks = load_corpora(opts);
      std::size_t sql = 0;
      for (const auto& t : tasks) sql += t.language == Language::Sql;
      std::cout << nlohmann::json{{"tasks", tasks.size()},
                                  {"sql", sql},
                                  {"python", tasks.size() - sql}}
                       .dump()
                << "\n";
      return 0;
    }

    if (report->parsed()) {
      auto corpus_tasks = load_corpora(opts);
      std::vector<fs::path> paths(logs.begin(), logs.end());
      auto sessions = load_transcripts(paths);
      auto format = report_format(opts);
      std::cout << render_report(compute_metrics(sessions, corpus_tasks), format);
      if (!annotations_path.empty()) {
        std::cout << "\n"
                  << render_feedback_stats(
                         feedback_stats(load_annotations(annotations_path), sessions), format);
      }
      return 0;
    }

    auto demos = std::make_shared<const DemoStore>(load_demo_store(opts.demos));
    auto corpus_tasks = load_corpora(opts);
    auto sandbox = make_sandbox(opts);
    auto config = engine_config(opts);

    if (session_run->parsed()) {
      ScriptedRun run;
      run.task_id = task_id;
      run.mode = *parse_mode(session_mode);
      run.feedback = feedback;
      run.finish = *parse_run_finish(finish);
      run.step_ms = step_ms;
      auto result = run_batch({run}, corpus_tasks, make_gateway(opts, gateway_mode(opts)), sandbox,
                              demos, config);
      const auto& r = result.runs.front();
      nlohmann::json out = run_summary(r);
      if (r.session) out["session"] = session_to_json(*r.session, r.session->started_at_ms);
      std::cout << out.dump(2) << "\n";
      return r.error ? 1 : 0;
    }

    if (batch->parsed()) {
      if (replay_flag) opts.mode = "replay";
      auto result = run_batch(load_runs(runs_path), corpus_tasks,
                              make_gateway(opts, gateway_mode(opts)), sandbox, demos, config);
      return emit_batch(result, opts, transcript_out, false);
    }

    if (record->parsed()) {
      if (opts.cassette.empty()) throw Error(ErrorCode::InvalidConfig, "record needs --cassette");
      auto gateway = make_gateway(opts, GatewayMode::RecordThenReplay);
      auto result = run_batch(load_runs(runs_path), corpus_tasks, gateway, sandbox, demos, config);
      std::cerr << "recorded " << gateway->network_calls() << " new completions, cassette holds "
                << gateway->cassette()->size() << "\n";
      return emit_batch(result, opts, "", false);
    }

    if (serve->parsed()) {
      std::shared_ptr<TranscriptSink> sink;
      if (!transcript_path.empty()) sink = std::make_shared<FileTranscript>(transcript_path);
      auto engine = std::make_shared<SessionEngine>(make_gateway(opts, gateway_mode(opts)), sandbox,
                                                    demos, std::make_shared<SystemClock>(), config,
                                                    sink);
      Service service(engine, corpus_tasks);
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      int bound = service.start_background(host, port);
      std::cerr << "listening on " << host << ":" << bound << "\n";
      while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
      }
      service.stop();
      return 0;
    }
  } catch (const Error& e) {
    std::cout << "error: "
              << nlohmann::json{{"code", error_code_name(e.code())}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << "error: " << nlohmann::json{{"code", "internal"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
  return 0;
}
