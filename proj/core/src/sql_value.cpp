#include "explainloop/sql_value.hpp"

#include <cstdio>

namespace explainloop {

namespace {

std::string render_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string render_sql_value(const SqlValue& value) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "NULL"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return render_real(v); }
    std::string operator()(const std::string& v) const {
      std::string out = "'";
      for (char c : v) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
    std::string operator()(const Blob& b) const {
      static constexpr char kHex[] = "0123456789abcdef";
      std::string out = "X'";
      for (auto byte : b.bytes) {
        out += kHex[byte >> 4];
        out += kHex[byte & 0xf];
      }
      return out + "'";
    }
  };
  return std::visit(Visitor{}, value);
}

std::string render_sql_row(const SqlRow& row) {
  std::string out = "(";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ", ";
    out += render_sql_value(row[i]);
  }
  return out + ")";
}

}  // namespace explainloop
