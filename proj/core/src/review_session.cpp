#include "revsel/review_session.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <utility>

#include "revsel/error.hpp"

namespace revsel {
namespace {

constexpr std::array<std::pair<Role, std::string_view>, 6> kRoleNames{{
    {Role::kSubmittingAuthor, "submitting_author"},
    {Role::kSubmittingCoauthor, "submitting_coauthor"},
    {Role::kSelectedReviewer, "selected_reviewer"},
    {Role::kReviewerCoauthor, "reviewer_coauthor"},
    {Role::kCandidate, "candidate"},
    {Role::kCollaborator, "collaborator"},
}};

void require_author(const CorpusIndex& index, const AuthorId& id) {
  if (!index.has_author(id)) {
    throw Error(ErrorCode::kNotFound, "unknown author '" + id + "'", id);
  }
}

bool contains(const std::vector<AuthorId>& ids, const AuthorId& id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::string describe_pairs(const std::vector<ConflictPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    if (!out.empty()) out += ", ";
    out += p.first + "/" + p.second;
  }
  return out;
}

// Pairs (reviewer, submitter) and (reviewer, reviewer) that would violate
// selection safety.
std::vector<ConflictPair> selection_violations(
    const std::vector<AuthorId>& reviewers,
    const std::set<AuthorId>& submitters, const CorpusIndex& index,
    const Thresholds& thresholds) {
  std::vector<ConflictPair> pairs;
  for (const auto& r : reviewers) {
    for (const auto& s : submitters) {
      if (r == s || in_conflict(r, s, index, thresholds)) pairs.push_back({r, s});
    }
  }
  for (std::size_t i = 0; i < reviewers.size(); ++i) {
    for (std::size_t j = i + 1; j < reviewers.size(); ++j) {
      if (in_conflict(reviewers[i], reviewers[j], index, thresholds)) {
        pairs.push_back({reviewers[i], reviewers[j]});
      }
    }
  }
  return pairs;
}

// Resolves roles against one fixed candidate set.
class RoleResolver {
 public:
  RoleResolver(const Session& session, const CorpusIndex& index)
      : session_(session), index_(index) {
    for (auto& c : candidate_reviewers(
             session.network, index, session.settings.params,
             session.settings.thresholds, session.settings.flags.expand)) {
      candidates_.insert(c.author_id);
      ranked_.push_back(std::move(c));
    }
  }

  Role role(const AuthorId& author) const {
    const auto& th = session_.settings.thresholds;
    if (session_.submitting_authors.contains(author)) {
      return Role::kSubmittingAuthor;
    }
    for (const auto& s : session_.submitting_authors) {
      if (in_conflict(author, s, index_, th)) return Role::kSubmittingCoauthor;
    }
    if (contains(session_.selected_reviewers, author)) {
      return Role::kSelectedReviewer;
    }
    for (const auto& r : session_.selected_reviewers) {
      if (in_conflict(author, r, index_, th)) return Role::kReviewerCoauthor;
    }
    return candidates_.contains(author) ? Role::kCandidate
                                        : Role::kCollaborator;
  }

  std::vector<ReviewerCandidate>& ranked() { return ranked_; }

 private:
  const Session& session_;
  const CorpusIndex& index_;
  std::set<AuthorId> candidates_;
  std::vector<ReviewerCandidate> ranked_;
};

std::vector<SubstituteEntry> qualifying_substitutes(const Session& session,
                                                    const CorpusIndex& index,
                                                    const AuthorId& reviewer) {
  if (!contains(session.selected_reviewers, reviewer)) {
    throw Error(ErrorCode::kNotSelected,
                "'" + reviewer + "' is not a selected reviewer", reviewer);
  }
  const auto& th = session.settings.thresholds;
  std::vector<SubstituteEntry> entries;
  for (const auto& c :
       candidate_reviewers(session.network, index, session.settings.params, th,
                           /*expand=*/false)) {
    const auto& id = c.author_id;
    if (contains(session.selected_reviewers, id) ||
        session.submitting_authors.contains(id)) {
      continue;
    }
    auto conflicts_with = [&](const AuthorId& other) {
      return in_conflict(id, other, index, th);
    };
    if (std::any_of(session.submitting_authors.begin(),
                    session.submitting_authors.end(), conflicts_with)) {
      continue;
    }
    bool blocked = false;
    for (const auto& other : session.selected_reviewers) {
      if (other != reviewer && conflicts_with(other)) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;
    const auto* shared = index.coauthor_edge(id, reviewer);
    entries.push_back(
        {id, c.name, shared ? static_cast<int>(shared->papers.size()) : 0,
         c.relevance});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& l, const auto& r) {
    if (l.common_papers_with_reviewer != r.common_papers_with_reviewer) {
      return l.common_papers_with_reviewer > r.common_papers_with_reviewer;
    }
    if (l.relevance != r.relevance) return l.relevance > r.relevance;
    return std::tie(l.name, l.author_id) < std::tie(r.name, r.author_id);
  });
  return entries;
}

}  // namespace

std::string_view role_name(Role role) {
  for (const auto& [value, name] : kRoleNames) {
    if (value == role) return name;
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view name) {
  for (const auto& [value, text] : kRoleNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

bool is_conflicted(Role role) {
  return role == Role::kSubmittingAuthor ||
         role == Role::kSubmittingCoauthor || role == Role::kReviewerCoauthor;
}

Session new_session(const CorpusIndex& index, std::string session_id) {
  Session session;
  session.session_id = std::move(session_id);
  session.settings.thresholds = Thresholds::defaults_for(index);
  return session;
}

Session set_submitting_authors(const Session& session,
                               const CorpusIndex& index,
                               const std::set<AuthorId>& authors) {
  for (const auto& id : authors) require_author(index, id);
  auto pairs = selection_violations(session.selected_reviewers, authors, index,
                                    session.settings.thresholds);
  if (!pairs.empty()) {
    throw Error(ErrorCode::kSelectionConflict,
                "selected reviewers conflict with submitting authors: " +
                    describe_pairs(pairs),
                {}, std::move(pairs));
  }
  auto next = session;
  next.submitting_authors = authors;
  return next;
}

Session update_settings(const Session& session, const CorpusIndex& index,
                        const SessionSettings& settings) {
  settings.params.validate();
  settings.thresholds.validate();
  auto pairs =
      selection_violations(session.selected_reviewers,
                           session.submitting_authors, index,
                           settings.thresholds);
  if (!pairs.empty()) {
    throw Error(ErrorCode::kSelectionConflict,
                "settings would put selected reviewers in conflict: " +
                    describe_pairs(pairs),
                {}, std::move(pairs));
  }
  auto next = session;
  next.settings = settings;
  return next;
}

Session with_network(const Session& session, const CorpusIndex& index,
                     PaperNetworkState network) {
  validate_state(network, index);
  auto next = session;
  next.network = std::move(network);
  return next;
}

Role role_of(const Session& session, const CorpusIndex& index,
             const AuthorId& author) {
  require_author(index, author);
  return RoleResolver(session, index).role(author);
}

std::map<AuthorId, Role> role_map(const Session& session,
                                  const CorpusIndex& index) {
  RoleResolver resolver(session, index);
  const auto& th = session.settings.thresholds;
  std::set<AuthorId> touched(session.submitting_authors);
  touched.insert(session.selected_reviewers.begin(),
                 session.selected_reviewers.end());
  for (const auto& c : resolver.ranked()) touched.insert(c.author_id);
  std::set<AuthorId> with_coauthors = touched;
  for (const auto& id : touched) {
    if (!index.has_author(id)) continue;
    auto co = coauthors(id, index, th);
    with_coauthors.insert(co.begin(), co.end());
  }
  std::map<AuthorId, Role> roles;
  for (const auto& id : with_coauthors) roles.emplace(id, resolver.role(id));
  return roles;
}

Session select_reviewer(const Session& session, const CorpusIndex& index,
                        const AuthorId& author) {
  require_author(index, author);
  if (contains(session.selected_reviewers, author)) {
    throw Error(ErrorCode::kAlreadySelected,
                "'" + author + "' is already a selected reviewer", author);
  }
  const auto& th = session.settings.thresholds;
  std::vector<ConflictPair> pairs;
  for (const auto& s : session.submitting_authors) {
    if (s == author || in_conflict(author, s, index, th)) {
      pairs.push_back({author, s});
    }
  }
  if (!pairs.empty()) {
    throw Error(ErrorCode::kConflictWithSubmitters,
                "'" + author + "' conflicts with submitting authors: " +
                    describe_pairs(pairs),
                author, std::move(pairs));
  }
  for (const auto& r : session.selected_reviewers) {
    if (in_conflict(author, r, index, th)) pairs.push_back({author, r});
  }
  if (!pairs.empty()) {
    throw Error(ErrorCode::kConflictWithReviewers,
                "'" + author + "' conflicts with selected reviewers: " +
                    describe_pairs(pairs),
                author, std::move(pairs));
  }
  if (RoleResolver(session, index).role(author) != Role::kCandidate) {
    throw Error(ErrorCode::kNotCandidate,
                "'" + author + "' is not a candidate reviewer", author);
  }
  auto next = session;
  next.selected_reviewers.push_back(author);
  return next;
}

Session remove_reviewer(const Session& session, const AuthorId& author) {
  auto it = std::find(session.selected_reviewers.begin(),
                      session.selected_reviewers.end(), author);
  if (it == session.selected_reviewers.end()) {
    throw Error(ErrorCode::kNotSelected,
                "'" + author + "' is not a selected reviewer", author);
  }
  auto next = session;
  next.selected_reviewers.erase(next.selected_reviewers.begin() +
                                (it - session.selected_reviewers.begin()));
  return next;
}

std::vector<RankedCandidate> session_candidates(const Session& session,
                                                const CorpusIndex& index) {
  RoleResolver resolver(session, index);
  std::vector<RankedCandidate> out;
  for (auto& c : resolver.ranked()) {
    const Role role = resolver.role(c.author_id);
    if (session.settings.flags.hide_conflicted && is_conflicted(role)) continue;
    out.push_back({std::move(c), role, is_conflicted(role)});
  }
  return out;
}

SessionResearcherNetwork session_researcher_network(const Session& session,
                                                    const CorpusIndex& index) {
  const auto& s = session.settings;
  auto net = researcher_network(session.network, index, s.params, s.thresholds,
                                s.flags.expand);
  RoleResolver resolver(session, index);
  SessionResearcherNetwork out;
  std::set<AuthorId> hidden;
  for (auto& node : net.nodes) {
    const Role role = resolver.role(node.author_id);
    if (s.flags.hide_conflicted && is_conflicted(role)) {
      hidden.insert(node.author_id);
      continue;
    }
    out.nodes.push_back({std::move(node), role});
  }
  for (auto& edge : net.edges) {
    if (hidden.contains(edge.a) || hidden.contains(edge.b)) continue;
    out.edges.push_back(std::move(edge));
  }
  return out;
}

SubstituteList substitutes(const Session& session, const CorpusIndex& index,
                           const AuthorId& reviewer,
                           std::optional<std::size_t> cap) {
  SubstituteList list{reviewer, qualifying_substitutes(session, index, reviewer)};
  const std::size_t limit = cap.value_or(session.settings.substitute_cap);
  if (list.entries.size() > limit) list.entries.resize(limit);
  return list;
}

Session swap_reviewer(const Session& session, const CorpusIndex& index,
                      const AuthorId& reviewer, const AuthorId& substitute) {
  auto entries = qualifying_substitutes(session, index, reviewer);
  bool qualifies = std::any_of(entries.begin(), entries.end(), [&](auto& e) {
    return e.author_id == substitute;
  });
  if (!qualifies) {
    throw Error(ErrorCode::kSubstituteNotQualified,
                "'" + substitute + "' is not a valid substitute for '" +
                    reviewer + "'",
                substitute);
  }
  return select_reviewer(remove_reviewer(session, reviewer), index,
                         substitute);
}

}  // namespace revsel
