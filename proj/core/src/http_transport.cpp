#include <httplib.h>

#include <chrono>

#include "explainloop/error.hpp"
#include "explainloop/llm_gateway.hpp"

namespace explainloop {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "endpoint must be an absolute URL: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse HttplibTransport::post(const HttpRequest& request) {
  auto [origin, path] = split_url(request.url);
  httplib::Client client(origin);
  auto seconds = request.timeout_ms / 1000;
  auto micros = (request.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : request.headers) {
    if (k == "Content-Type") content_type = v;
    else headers.emplace(k, v);
  }

  auto started = std::chrono::steady_clock::now();
  auto result = client.Post(path, headers, request.body, content_type);
  if (!result) {
    auto err = result.error();
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      if (elapsed >= request.timeout_ms) throw GatewayTimeoutError(elapsed);
    }
    throw ProviderError(0, httplib::to_string(err));
  }
  return {result->status, result->body};
}

}  // namespace explainloop
