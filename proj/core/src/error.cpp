#include "explainloop/error.hpp"

namespace explainloop {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingManifest: return "missing_manifest";
    case ErrorCode::MalformedTask: return "malformed_task";
    case ErrorCode::DanglingDatabaseRef: return "dangling_database_ref";
    case ErrorCode::UnlexableInput: return "unlexable_input";
    case ErrorCode::MissingDemos: return "missing_demos";
    case ErrorCode::DemoStoreInvalid: return "demo_store_invalid";
    case ErrorCode::PreconditionViolated: return "precondition_violated";
    case ErrorCode::EmptyFeedback: return "empty_feedback";
    case ErrorCode::CassetteMiss: return "cassette_miss";
    case ErrorCode::CassetteCorrupt: return "cassette_corrupt";
    case ErrorCode::ProviderError: return "provider_error";
    case ErrorCode::GatewayTimeout: return "timeout";
    case ErrorCode::InvalidState: return "invalid_state";
    case ErrorCode::TurnLimitReached: return "turn_limit_reached";
    case ErrorCode::UnknownSession: return "unknown_session";
    case ErrorCode::UnknownTask: return "unknown_task";
    case ErrorCode::DanglingAnnotation: return "dangling_annotation";
    case ErrorCode::MalformedTranscript: return "malformed_transcript";
    case ErrorCode::InvalidConfig: return "invalid_config";
    case ErrorCode::Io: return "io_error";
  }
  return "unknown";
}

}  // namespace explainloop
