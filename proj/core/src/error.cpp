#include "revsel/error.hpp"

namespace revsel {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotVisible: return "not_visible";
    case ErrorCode::kNotSelected: return "not_selected";
    case ErrorCode::kIsSeed: return "is_seed";
    case ErrorCode::kNotSeed: return "not_seed";
    case ErrorCode::kAlreadySelected: return "already_selected";
    case ErrorCode::kNotCandidate: return "not_candidate";
    case ErrorCode::kConflictWithSubmitters: return "conflict_with_submitters";
    case ErrorCode::kConflictWithReviewers: return "conflict_with_reviewers";
    case ErrorCode::kSelectionConflict: return "selection_conflict";
    case ErrorCode::kSubstituteNotQualified: return "substitute_not_qualified";
    case ErrorCode::kEmptySelection: return "empty_selection";
    case ErrorCode::kSchemaViolation: return "schema_violation";
    case ErrorCode::kDanglingId: return "dangling_id";
    case ErrorCode::kIngestError: return "ingest_error";
    case ErrorCode::kIoError: return "io_error";
    case ErrorCode::kAmbiguous: return "ambiguous";
  }
  return "unknown";
}

}  // namespace revsel
