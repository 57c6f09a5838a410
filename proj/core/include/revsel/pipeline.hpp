#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "revsel/corpus.hpp"
#include "revsel/export.hpp"
#include "revsel/review_session.hpp"

namespace revsel {

// Headless seed-to-reviewers run. Seeds are paper ids or exact titles;
// submitting authors are author ids or exact names.
struct FindRequest {
  std::vector<std::string> seeds;
  std::vector<std::string> submitting_authors;
  std::size_t reviewers_wanted = 3;
  SessionSettings settings;
};

struct FindReport {
  Session session;
  std::vector<RankedCandidate> candidates;
  // Candidates passed over by the greedy pick because of a conflict.
  std::vector<AuthorId> skipped;
  std::optional<ExportDocument> document;
};

PaperId resolve_paper(const CorpusIndex& index, const std::string& key);
AuthorId resolve_author(const CorpusIndex& index, const std::string& key);

// Walks the ranked candidates and selects each one that is still a
// non-conflicted candidate until `reviewers_wanted` are chosen. This greedy
// rule is a convenience for batch use, not part of the interactive model.
FindReport run_find(const CorpusIndex& index, const FindRequest& request);

std::string render_find_json(const FindReport& report);
std::string render_find_text(const FindReport& report);

}  // namespace revsel
