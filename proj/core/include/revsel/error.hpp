#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace revsel {

// Stable machine-readable error codes. The string form returned by
// error_code_name() is part of the HTTP API and must not change.
enum class ErrorCode {
  kNotFound,
  kInvalidArgument,
  kNotVisible,
  kNotSelected,
  kIsSeed,
  kNotSeed,
  kAlreadySelected,
  kNotCandidate,
  kConflictWithSubmitters,
  kConflictWithReviewers,
  kSelectionConflict,
  kSubstituteNotQualified,
  kEmptySelection,
  kSchemaViolation,
  kDanglingId,
  kIngestError,
  kIoError,
  kAmbiguous,
};

std::string_view error_code_name(ErrorCode code);

// A pair of researchers whose co-authorship blocks an operation.
struct ConflictPair {
  std::string first;
  std::string second;

  friend bool operator==(const ConflictPair&, const ConflictPair&) = default;
};

// Every engine failure is reported as an Error. `subject` names the
// offending id when there is one; `conflicts` lists blocking pairs for the
// conflict codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {},
        std::vector<ConflictPair> conflicts = {})
      : std::runtime_error(std::move(message)),
        code_(code),
        subject_(std::move(subject)),
        conflicts_(std::move(conflicts)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::vector<ConflictPair>& conflicts() const noexcept {
    return conflicts_;
  }

 private:
  ErrorCode code_;
  std::string subject_;
  std::vector<ConflictPair> conflicts_;
};

}  // namespace revsel
