#include <fstream>
#include <map>
#include <sstream>

#include "explainloop/error.hpp"
#include "explainloop/prompt_forge.hpp"

namespace explainloop {

namespace {

struct RawRecord {
  std::string kind;
  std::string language;
  std::size_t line = 0;
  std::map<std::string, std::string> fields;
  std::map<std::string, std::size_t> field_lines;
};

[[noreturn]] void invalid(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::DemoStoreInvalid, "demo store line " + std::to_string(line) + ": " + why);
}

std::vector<RawRecord> split_records(std::string_view text) {
  std::vector<RawRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;

    if (t.front() == '[') {
      if (t.back() != ']') invalid(line_no, "unterminated record header");
      std::istringstream header(t.substr(1, t.size() - 2));
      RawRecord rec;
      rec.line = line_no;
      header >> rec.kind >> rec.language;
      records.push_back(std::move(rec));
      continue;
    }
    if (records.empty()) invalid(line_no, "field outside of a record");
    RawRecord& rec = records.back();

    std::string key;
    std::string value;
    if (auto block = t.find("<<<"); block != std::string::npos && trim(t.substr(block)) == "<<<") {
      key = trim(t.substr(0, block));
      std::string body;
      bool closed = false;
      bool first = true;
      std::size_t start = line_no;
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == ">>>") {
          closed = true;
          break;
        }
        if (!first) body += '\n';
        body += line;
        first = false;
      }
      if (!closed) invalid(start, "block '" + key + "' is never closed with >>>");
      value = std::move(body);
    } else if (auto eq = t.find('='); eq != std::string::npos) {
      key = trim(t.substr(0, eq));
      value = trim(t.substr(eq + 1));
    } else {
      invalid(line_no, "expected 'key = value' or 'key <<<'");
    }
    if (key.empty()) invalid(line_no, "empty field name");
    if (!rec.fields.emplace(key, std::move(value)).second) {
      invalid(line_no, "duplicate field '" + key + "'");
    }
    rec.field_lines.emplace(key, line_no);
  }
  return records;
}

std::string take(RawRecord& rec, const std::string& key) {
  auto it = rec.fields.find(key);
  if (it == rec.fields.end() || trim(it->second).empty()) {
    invalid(rec.line, "[" + rec.kind + "] record needs a non-empty '" + key + "' field");
  }
  std::string value = std::move(it->second);
  rec.fields.erase(it);
  return value;
}

Language record_language(const RawRecord& rec) {
  auto lang = parse_language(rec.language);
  if (!lang) invalid(rec.line, "[" + rec.kind + "] needs a language of sql or python");
  return *lang;
}

void expect_count(std::size_t actual, std::size_t expected, const std::string& what) {
  if (actual != expected) {
    throw Error(ErrorCode::DemoStoreInvalid, "demo store has " + std::to_string(actual) + " " +
                                                 what + ", expected exactly " +
                                                 std::to_string(expected));
  }
}

}  // namespace

std::vector<const CorrectionDemo*> DemoStore::corrections_for(Language language) const {
  std::vector<const CorrectionDemo*> out;
  for (const auto& d : correction_demos) {
    if (d.language == language) out.push_back(&d);
  }
  return out;
}

std::vector<const CodegenDemo*> DemoStore::codegen_for(Language language) const {
  std::vector<const CodegenDemo*> out;
  for (const auto& d : codegen_demos) {
    if (d.language == language) out.push_back(&d);
  }
  return out;
}

DemoStore parse_demo_store(std::string_view text) {
  DemoStore store;
  for (auto& rec : split_records(text)) {
    if (rec.kind == "restatement") {
      store.restatement_triplets.push_back(
          {take(rec, "sql"), take(rec, "question"), take(rec, "restated")});
    } else if (rec.kind == "description") {
      store.description_pairs.push_back({take(rec, "program"), take(rec, "description")});
    } else if (rec.kind == "correction") {
      CorrectionDemo d;
      d.language = record_language(rec);
      d.code = take(rec, "code");
      d.explanation = take(rec, "explanation");
      d.feedback = take(rec, "feedback");
      d.corrected_code = take(rec, "corrected");
      store.correction_demos.push_back(std::move(d));
    } else if (rec.kind == "codegen") {
      CodegenDemo d;
      d.language = record_language(rec);
      d.question = take(rec, "question");
      d.context = take(rec, "context");
      d.code = take(rec, "code");
      store.codegen_demos.push_back(std::move(d));
    } else {
      invalid(rec.line, "unknown record kind '" + rec.kind + "'");
    }
    if (!rec.fields.empty()) {
      const std::string& key = rec.fields.begin()->first;
      invalid(rec.field_lines.at(key), "unexpected field '" + key + "'");
    }
  }

  expect_count(store.restatement_triplets.size(), kRestatementDemoCount, "restatement triplets");
  expect_count(store.description_pairs.size(), kDescriptionDemoCount, "description pairs");
  for (Language lang : {Language::Sql, Language::Python}) {
    expect_count(store.corrections_for(lang).size(), kCorrectionDemosPerLanguage,
                 std::string(to_string(lang)) + " correction demos");
    if (store.codegen_for(lang).empty()) {
      throw Error(ErrorCode::DemoStoreInvalid,
                  "demo store has no " + std::string(to_string(lang)) + " codegen demos");
    }
  }
  return store;
}

DemoStore load_demo_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read demo store " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_demo_store(buf.str());
}

}  // namespace explainloop
