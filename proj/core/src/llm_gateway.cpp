#include "explainloop/llm_gateway.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <nlohmann/json.hpp>

#include "explainloop/error.hpp"
#include "explainloop/json_codec.hpp"

namespace explainloop {

using nlohmann::json;

namespace {

std::string utc_now_iso() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

std::string_view to_string(GatewayMode mode) {
  switch (mode) {
    case GatewayMode::Live: return "live";
    case GatewayMode::Replay: return "replay";
    case GatewayMode::RecordThenReplay: return "record";
  }
  return "live";
}

std::optional<GatewayMode> parse_gateway_mode(std::string_view text) {
  for (GatewayMode m : {GatewayMode::Live, GatewayMode::Replay, GatewayMode::RecordThenReplay}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::string encode_record(const CompletionRecord& record) {
  json j = {{"fingerprint", record.fingerprint},
            {"request", bundle_to_json(record.request)},
            {"response_text", record.response_text},
            {"latency_ms", record.latency_ms},
            {"recorded_at", record.recorded_at}};
  return j.dump();
}

CompletionRecord decode_record(std::string_view line) {
  try {
    json j = json::parse(line);
    CompletionRecord r;
    r.fingerprint = j.at("fingerprint").get<std::string>();
    r.request = bundle_from_json(j.at("request"));
    r.response_text = j.at("response_text").get<std::string>();
    r.latency_ms = j.at("latency_ms").get<std::int64_t>();
    r.recorded_at = j.value("recorded_at", std::string());
    if (r.latency_ms < 0) throw Error(ErrorCode::CassetteCorrupt, "negative latency");
    if (r.request.fingerprint != r.fingerprint) {
      throw Error(ErrorCode::CassetteCorrupt,
                  "record fingerprint does not match its request " + r.fingerprint);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CassetteCorrupt, std::string("malformed cassette record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::CassetteCorrupt, std::string("malformed cassette record: ") + e.what());
  }
}

Cassette::Cassette(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // a missing file is an empty cassette
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    CompletionRecord record;
    try {
      record = decode_record(line);
    } catch (const Error& e) {
      throw Error(ErrorCode::CassetteCorrupt,
                  path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (auto it = index_.find(record.fingerprint); it != index_.end()) {
      records_[it->second] = std::move(record);
    } else {
      index_.emplace(record.fingerprint, records_.size());
      records_.push_back(std::move(record));
    }
  }
}

std::optional<CompletionRecord> Cassette::find(const std::string& fingerprint) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(fingerprint);
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

void Cassette::append(const CompletionRecord& record) {
  std::unique_lock lock(mutex_);
  if (!path_.empty()) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::app);
    if (!out) throw Error(ErrorCode::Io, "cannot append to cassette " + path_.string());
    out << encode_record(record) << '\n';
  }
  if (auto it = index_.find(record.fingerprint); it != index_.end()) {
    records_[it->second] = record;
  } else {
    index_.emplace(record.fingerprint, records_.size());
    records_.push_back(record);
  }
}

std::size_t Cassette::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::vector<CompletionRecord> Cassette::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

Gateway::Gateway(ModelConfig config, GatewayMode mode, std::shared_ptr<Transport> transport,
                 std::shared_ptr<Cassette> cassette, bool overwrite)
    : config_(std::move(config)),
      mode_(mode),
      transport_(std::move(transport)),
      cassette_(cassette ? std::move(cassette) : std::make_shared<Cassette>()),
      overwrite_(overwrite) {}

std::string Gateway::complete(const PromptBundle& bundle) {
  return complete(bundle, config_, mode_);
}

std::string Gateway::complete(const PromptBundle& bundle, const ModelConfig& config,
                              GatewayMode mode) {
  if (mode == GatewayMode::Replay) {
    auto hit = cassette_->find(bundle.fingerprint);
    if (!hit) throw CassetteMissError(bundle.fingerprint);
    return hit->response_text;
  }
  if (mode == GatewayMode::RecordThenReplay && !overwrite_) {
    if (auto hit = cassette_->find(bundle.fingerprint)) return hit->response_text;
  }

  std::int64_t latency = 0;
  std::string text = call_provider(bundle, config, latency);
  if (mode == GatewayMode::RecordThenReplay) {
    CompletionRecord record{bundle.fingerprint, bundle, text, latency, utc_now_iso()};
    std::lock_guard lock(write_mutex_);
    cassette_->append(record);
  }
  return text;
}

std::string Gateway::request_body(const PromptBundle& bundle, const ModelConfig& config) {
  json messages = json::array();
  for (const auto& m : bundle.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  json body = {{"model", config.model_name},
               {"temperature", config.temperature},
               {"max_tokens", config.max_output_tokens},
               {"messages", messages}};
  return body.dump();
}

std::string Gateway::call_provider(const PromptBundle& bundle, const ModelConfig& config,
                                   std::int64_t& latency_ms) {
  if (!transport_) throw Error(ErrorCode::InvalidConfig, "no transport configured");
  HttpRequest request;
  request.url = config.endpoint;
  request.body = request_body(bundle, config);
  request.timeout_ms = config.timeout_ms;
  request.purpose = bundle.purpose;
  request.headers.emplace_back("Content-Type", "application/json");
  if (!config.credential_ref.empty()) {
    if (const char* key = std::getenv(config.credential_ref.c_str()); key && *key) {
      request.headers.emplace_back("Authorization", std::string("Bearer ") + key);
    }
  }

  auto started = std::chrono::steady_clock::now();
  ++network_calls_;
  HttpResponse response = transport_->post(request);
  latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - started)
                   .count();
  if (response.status != 200) throw ProviderError(response.status, excerpt(response.body));
  try {
    json j = json::parse(response.body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ProviderError(response.status, "unexpected response body: " + excerpt(response.body));
  }
}

}  // namespace explainloop
