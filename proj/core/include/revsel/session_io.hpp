#pragma once

#include <string>
#include <string_view>

#include "revsel/corpus.hpp"
#include "revsel/review_session.hpp"

namespace revsel {

inline constexpr int kSessionSchemaVersion = 1;

// Versioned JSON. Expiration thresholds without a limit are written as null.
std::string save_session(const Session& session);

// Unknown fields are ignored. Throws kSchemaViolation for malformed
// documents and kDanglingId, naming the id, when a referenced paper or
// author is missing from `index`.
Session load_session(std::string_view blob, const CorpusIndex& index);

}  // namespace revsel
