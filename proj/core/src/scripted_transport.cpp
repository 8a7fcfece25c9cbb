#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "explainloop/error.hpp"
#include "explainloop/llm_gateway.hpp"

namespace explainloop {

using nlohmann::json;

ScriptedTransport ScriptedTransport::from_json_text(std::string_view text) {
  std::vector<Rule> rules;
  try {
    json doc = json::parse(text);
    for (const auto& r : doc.at("rules")) {
      Rule rule;
      if (r.contains("purpose")) {
        auto p = parse_purpose(r.at("purpose").get<std::string>());
        if (!p) throw Error(ErrorCode::InvalidConfig, "unknown purpose in scripted rule");
        rule.purpose = p;
      }
      if (r.contains("contains")) {
        const auto& c = r.at("contains");
        if (c.is_string()) rule.contains.push_back(c.get<std::string>());
        else rule.contains = c.get<std::vector<std::string>>();
      }
      rule.response = r.at("response").get<std::string>();
      rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed scripted rules: ") + e.what());
  }
  return ScriptedTransport(std::move(rules));
}

ScriptedTransport ScriptedTransport::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read scripted rules " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

void ScriptedTransport::add_rule(Rule rule) { rules_.push_back(std::move(rule)); }

HttpResponse ScriptedTransport::post(const HttpRequest& request) {
  ++calls_;
  std::string last_user;
  try {
    json body = json::parse(request.body);
    for (const auto& m : body.at("messages")) {
      if (m.at("role") == "user") last_user = m.at("content").get<std::string>();
    }
  } catch (const json::exception&) {
    return {400, R"({"error":"request body is not a chat completion"})"};
  }

  for (const auto& rule : rules_) {
    if (rule.purpose && *rule.purpose != request.purpose) continue;
    bool all = true;
    for (const auto& needle : rule.contains) {
      if (last_user.find(needle) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (!all) continue;
    json reply = {{"choices", json::array({{{"index", 0},
                                            {"message",
                                             {{"role", "assistant"}, {"content", rule.response}}},
                                            {"finish_reason", "stop"}}})}};
    return {200, reply.dump()};
  }
  return {404, R"({"error":"no scripted rule matches this prompt"})"};
}

}  // namespace explainloop
