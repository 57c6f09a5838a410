#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "revsel/corpus.hpp"
#include "revsel/graph_engine.hpp"

namespace revsel {

// Declared in precedence order: when several roles apply, the first wins.
enum class Role {
  kSubmittingAuthor,
  kSubmittingCoauthor,
  kSelectedReviewer,
  kReviewerCoauthor,
  kCandidate,
  kCollaborator,
};

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view name);

// Submitting authors and the co-authors of submitters or reviewers are
// conflicted and cannot be selected.
bool is_conflicted(Role role);

struct SessionFlags {
  bool hide_conflicted = false;
  bool expand = false;

  friend bool operator==(const SessionFlags&, const SessionFlags&) = default;
};

struct SessionSettings {
  RelevanceParams params;
  Thresholds thresholds;
  SessionFlags flags;
  std::size_t substitute_cap = 5;

  friend bool operator==(const SessionSettings&,
                         const SessionSettings&) = default;
};

// One reviewer-finding session. Every operation below returns a new value
// and leaves its input untouched on failure.
struct Session {
  std::string session_id;
  std::set<AuthorId> submitting_authors;
  PaperNetworkState network;
  std::vector<AuthorId> selected_reviewers;
  SessionSettings settings;

  friend bool operator==(const Session&, const Session&) = default;
};

Session new_session(const CorpusIndex& index, std::string session_id);

Session set_submitting_authors(const Session& session,
                               const CorpusIndex& index,
                               const std::set<AuthorId>& authors);

// Fails with kSelectionConflict if the new thresholds would put two
// selected reviewers, or a reviewer and a submitter, in conflict.
Session update_settings(const Session& session, const CorpusIndex& index,
                        const SessionSettings& settings);

Session with_network(const Session& session, const CorpusIndex& index,
                     PaperNetworkState network);

Role role_of(const Session& session, const CorpusIndex& index,
             const AuthorId& author);

// Roles for every researcher the session touches: submitters, reviewers,
// candidates, and all of their co-authors.
std::map<AuthorId, Role> role_map(const Session& session,
                                  const CorpusIndex& index);

Session select_reviewer(const Session& session, const CorpusIndex& index,
                        const AuthorId& author);
Session remove_reviewer(const Session& session, const AuthorId& author);

struct RankedCandidate {
  ReviewerCandidate candidate;
  Role role = Role::kCandidate;
  bool conflicted = false;
};

// Candidate list under the session settings with roles attached. Honors
// hide_conflicted.
std::vector<RankedCandidate> session_candidates(const Session& session,
                                                const CorpusIndex& index);

struct RoledResearcherNode {
  ResearcherNode node;
  Role role = Role::kCollaborator;
};

struct SessionResearcherNetwork {
  std::vector<RoledResearcherNode> nodes;
  std::vector<ResearcherEdge> edges;
};

SessionResearcherNetwork session_researcher_network(const Session& session,
                                                    const CorpusIndex& index);

struct SubstituteEntry {
  AuthorId author_id;
  std::string name;
  int common_papers_with_reviewer = 0;
  double relevance = 0.0;

  friend bool operator==(const SubstituteEntry&,
                         const SubstituteEntry&) = default;
};

struct SubstituteList {
  AuthorId for_reviewer;
  std::vector<SubstituteEntry> entries;

  friend bool operator==(const SubstituteList&,
                         const SubstituteList&) = default;
};

// Candidates that could replace `reviewer`: not conflicted with any
// submitter or with any other selected reviewer. Ordered by shared papers
// with the reviewer, then relevance, then name. `cap` defaults to the
// session's substitute_cap.
SubstituteList substitutes(const Session& session, const CorpusIndex& index,
                           const AuthorId& reviewer,
                           std::optional<std::size_t> cap = std::nullopt);

Session swap_reviewer(const Session& session, const CorpusIndex& index,
                      const AuthorId& reviewer, const AuthorId& substitute);

}  // namespace revsel
