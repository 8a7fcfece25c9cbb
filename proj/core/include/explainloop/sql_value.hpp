#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace explainloop {

/// One cell of a SQL result set.
struct Blob {
  std::vector<std::uint8_t> bytes;
  bool operator==(const Blob&) const = default;
};

using SqlValue = std::variant<std::monostate, std::int64_t, double, std::string, Blob>;
using SqlRow = std::vector<SqlValue>;

/// Rendering used in schema listings and the UI: NULL, integers and reals as
/// printed by SQLite, text single-quoted with quotes doubled.
std::string render_sql_value(const SqlValue& value);
std::string render_sql_row(const SqlRow& row);

}  // namespace explainloop
