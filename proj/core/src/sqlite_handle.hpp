#pragma once

// Internal RAII wrappers around the SQLite C API.

#include <sqlite3.h>

#include <filesystem>
#include <memory>
#include <string>

#include "explainloop/sql_value.hpp"

namespace explainloop::detail {

struct DbCloser {
  void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
struct StmtFinalizer {
  void operator()(sqlite3_stmt* stmt) const { sqlite3_finalize(stmt); }
};

using DbHandle = std::unique_ptr<sqlite3, DbCloser>;
using StmtHandle = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

/// Opens a database strictly read-only: no file creation, no ATTACH, and
/// query_only on. Returns nullptr and fills `error` on failure.
inline DbHandle open_read_only(const std::filesystem::path& path, std::string& error) {
  sqlite3* raw = nullptr;
  int rc = sqlite3_open_v2(path.c_str(), &raw, SQLITE_OPEN_READONLY | SQLITE_OPEN_FULLMUTEX,
                           nullptr);
  DbHandle db(raw);
  if (rc != SQLITE_OK) {
    error = raw ? sqlite3_errmsg(raw) : sqlite3_errstr(rc);
    return nullptr;
  }
  sqlite3_limit(raw, SQLITE_LIMIT_ATTACHED, 0);
  char* msg = nullptr;
  if (sqlite3_exec(raw, "PRAGMA query_only = 1", nullptr, nullptr, &msg) != SQLITE_OK) {
    error = msg ? msg : "cannot enable query_only";
    sqlite3_free(msg);
    return nullptr;
  }
  return db;
}

inline SqlValue column_value(sqlite3_stmt* stmt, int col) {
  switch (sqlite3_column_type(stmt, col)) {
    case SQLITE_INTEGER:
      return static_cast<std::int64_t>(sqlite3_column_int64(stmt, col));
    case SQLITE_FLOAT:
      return sqlite3_column_double(stmt, col);
    case SQLITE_TEXT: {
      auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt, col));
      return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt, col)));
    }
    case SQLITE_BLOB: {
      auto* p = static_cast<const std::uint8_t*>(sqlite3_column_blob(stmt, col));
      Blob b;
      b.bytes.assign(p, p + sqlite3_column_bytes(stmt, col));
      return b;
    }
    default:
      return std::monostate{};
  }
}

}  // namespace explainloop::detail
