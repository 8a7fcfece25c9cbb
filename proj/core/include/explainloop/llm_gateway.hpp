#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "explainloop/prompt_forge.hpp"

namespace explainloop {

struct ModelConfig {
  std::string model_name = "gpt-3.5-turbo-0613";
  double temperature = 0.0;
  int max_output_tokens = 512;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string credential_ref = "OPENAI_API_KEY";
  int timeout_ms = 60000;
};

enum class GatewayMode { Live, Replay, RecordThenReplay };

std::string_view to_string(GatewayMode mode);
std::optional<GatewayMode> parse_gateway_mode(std::string_view text);

// Transport -----------------------------------------------------------------

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  int timeout_ms = 60000;
  PromptPurpose purpose = PromptPurpose::CodeGen;  // local metadata, never sent
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// The only path through which model traffic leaves the process. Throws
/// GatewayTimeoutError on deadline expiry and ProviderError(0, ...) when no
/// response could be obtained at all.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// HTTP(S) transport for chat-completion endpoints.
class HttplibTransport : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override;
};

/// Offline stand-in for a provider. Each rule may name a purpose and a list of
/// substrings that must all occur in the final user message; the first rule
/// that matches supplies the reply. Unmatched requests get HTTP 404.
class ScriptedTransport : public Transport {
 public:
  struct Rule {
    std::optional<PromptPurpose> purpose;
    std::vector<std::string> contains;
    std::string response;
  };

  ScriptedTransport() = default;
  explicit ScriptedTransport(std::vector<Rule> rules) : rules_(std::move(rules)) {}
  ScriptedTransport(ScriptedTransport&& other) noexcept
      : rules_(std::move(other.rules_)), calls_(other.calls_.load()) {}

  /// Reads {"rules":[{"purpose":..., "contains": "..." | [...], "response":...}]}.
  static ScriptedTransport from_file(const std::filesystem::path& path);
  static ScriptedTransport from_json_text(std::string_view text);

  void add_rule(Rule rule);
  HttpResponse post(const HttpRequest& request) override;
  std::size_t calls() const { return calls_.load(); }
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
  std::atomic<std::size_t> calls_{0};
};

// Cassettes -------------------------------------------------------------------

struct CompletionRecord {
  std::string fingerprint;
  PromptBundle request;
  std::string response_text;
  std::int64_t latency_ms = 0;
  std::string recorded_at;  // ISO-8601 UTC

  bool operator==(const CompletionRecord&) const = default;
};

std::string encode_record(const CompletionRecord& record);
CompletionRecord decode_record(std::string_view line);

/// Append-only JSONL store of completions keyed by prompt fingerprint. When a
/// fingerprint occurs more than once the last line wins. A cassette without a
/// path lives in memory only.
class Cassette {
 public:
  Cassette() = default;
  explicit Cassette(std::filesystem::path path);

  std::optional<CompletionRecord> find(const std::string& fingerprint) const;
  void append(const CompletionRecord& record);
  std::size_t size() const;
  std::vector<CompletionRecord> records() const;  // in file order, superseded lines dropped
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::size_t> index_;
  std::vector<CompletionRecord> records_;
};

// Gateway ---------------------------------------------------------------------

class Gateway {
 public:
  Gateway(ModelConfig config, GatewayMode mode, std::shared_ptr<Transport> transport,
          std::shared_ptr<Cassette> cassette, bool overwrite = false);

  std::string complete(const PromptBundle& bundle);
  std::string complete(const PromptBundle& bundle, const ModelConfig& config, GatewayMode mode);

  GatewayMode mode() const { return mode_; }
  const ModelConfig& config() const { return config_; }
  std::size_t network_calls() const { return network_calls_.load(); }
  const std::shared_ptr<Cassette>& cassette() const { return cassette_; }

  /// The chat-completion request body sent for a bundle.
  static std::string request_body(const PromptBundle& bundle, const ModelConfig& config);

 private:
  std::string call_provider(const PromptBundle& bundle, const ModelConfig& config,
                            std::int64_t& latency_ms);

  ModelConfig config_;
  GatewayMode mode_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<Cassette> cassette_;
  bool overwrite_;
  std::mutex write_mutex_;
  std::atomic<std::size_t> network_calls_{0};
};

}  // namespace explainloop
