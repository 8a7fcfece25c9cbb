#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace explainloop {

enum class ErrorCode {
  MissingManifest,
  MalformedTask,
  DanglingDatabaseRef,
  UnlexableInput,
  MissingDemos,
  DemoStoreInvalid,
  PreconditionViolated,
  EmptyFeedback,
  CassetteMiss,
  CassetteCorrupt,
  ProviderError,
  GatewayTimeout,
  InvalidState,
  TurnLimitReached,
  UnknownSession,
  UnknownTask,
  DanglingAnnotation,
  MalformedTranscript,
  InvalidConfig,
  Io,
};

/// Stable snake_case identifier used in machine-readable error lines and
/// HTTP error bodies.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class MalformedTaskError : public Error {
 public:
  MalformedTaskError(std::string task_id, const std::string& reason)
      : Error(ErrorCode::MalformedTask, "task '" + task_id + "': " + reason),
        task_id_(std::move(task_id)) {}

  const std::string& task_id() const noexcept { return task_id_; }

 private:
  std::string task_id_;
};

class DanglingDatabaseRefError : public Error {
 public:
  DanglingDatabaseRefError(std::string task_id, const std::string& path)
      : Error(ErrorCode::DanglingDatabaseRef,
              "task '" + task_id + "' references missing database " + path),
        task_id_(std::move(task_id)) {}

  const std::string& task_id() const noexcept { return task_id_; }

 private:
  std::string task_id_;
};

/// Which side of an edit-count comparison failed to lex.
enum class LexSide { Predicted, Gold, Single };

class UnlexableInputError : public Error {
 public:
  UnlexableInputError(LexSide which, std::size_t position, const std::string& reason)
      : Error(ErrorCode::UnlexableInput,
              reason + " at offset " + std::to_string(position)),
        which_(which),
        position_(position) {}

  LexSide which() const noexcept { return which_; }
  std::size_t position() const noexcept { return position_; }

 private:
  LexSide which_;
  std::size_t position_;
};

class ProviderError : public Error {
 public:
  ProviderError(int status, std::string body_excerpt)
      : Error(ErrorCode::ProviderError,
              "provider returned status " + std::to_string(status) + ": " + body_excerpt),
        status_(status),
        body_excerpt_(std::move(body_excerpt)) {}

  int status() const noexcept { return status_; }
  const std::string& body_excerpt() const noexcept { return body_excerpt_; }

 private:
  int status_;
  std::string body_excerpt_;
};

class CassetteMissError : public Error {
 public:
  explicit CassetteMissError(std::string fingerprint)
      : Error(ErrorCode::CassetteMiss, "no cassette record for prompt " + fingerprint),
        fingerprint_(std::move(fingerprint)) {}

  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::string fingerprint_;
};

class GatewayTimeoutError : public Error {
 public:
  explicit GatewayTimeoutError(std::int64_t elapsed_ms)
      : Error(ErrorCode::GatewayTimeout,
              "model call timed out after " + std::to_string(elapsed_ms) + " ms"),
        elapsed_ms_(elapsed_ms) {}

  std::int64_t elapsed_ms() const noexcept { return elapsed_ms_; }

 private:
  std::int64_t elapsed_ms_;
};

}  // namespace explainloop
