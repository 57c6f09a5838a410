#include "revsel/pipeline.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "revsel/error.hpp"

namespace revsel {
namespace {

using nlohmann::ordered_json;

template <typename Lookup>
std::string resolve(const CorpusIndex& index, const std::string& key,
                    bool known, Lookup lookup, const char* kind) {
  if (known) return key;
  auto matches = lookup(index, key);
  if (matches.size() == 1) return matches.front();
  if (matches.empty()) {
    throw Error(ErrorCode::kNotFound,
                std::string("no ") + kind + " matches '" + key + "'", key);
  }
  throw Error(ErrorCode::kAmbiguous,
              std::string("'") + key + "' matches several " + kind + "s", key);
}

}  // namespace

PaperId resolve_paper(const CorpusIndex& index, const std::string& key) {
  return resolve(
      index, key, index.has_paper(key),
      [](const CorpusIndex& i, const std::string& k) { return i.find_by_title(k); },
      "paper");
}

AuthorId resolve_author(const CorpusIndex& index, const std::string& key) {
  return resolve(
      index, key, index.has_author(key),
      [](const CorpusIndex& i, const std::string& k) { return i.find_by_name(k); },
      "author");
}

FindReport run_find(const CorpusIndex& index, const FindRequest& request) {
  std::vector<PaperId> seeds;
  for (const auto& key : request.seeds) seeds.push_back(resolve_paper(index, key));
  std::set<AuthorId> submitters;
  for (const auto& key : request.submitting_authors) {
    submitters.insert(resolve_author(index, key));
  }

  FindReport report;
  Session session = new_session(index, "find");
  session = update_settings(session, index, request.settings);
  session = set_submitting_authors(session, index, submitters);
  session = with_network(session, index, init_network(index, seeds));

  Session ranking = session;
  ranking.settings.flags.hide_conflicted = false;
  for (const auto& entry : session_candidates(ranking, index)) {
    if (session.selected_reviewers.size() >= request.reviewers_wanted) break;
    const auto& id = entry.candidate.author_id;
    if (role_of(session, index, id) != Role::kCandidate) {
      report.skipped.push_back(id);
      continue;
    }
    session = select_reviewer(session, index, id);
  }
  report.candidates = session_candidates(session, index);
  if (!session.selected_reviewers.empty()) {
    report.document = export_reviewer_list(session, index);
  }
  report.session = std::move(session);
  return report;
}

std::string render_find_json(const FindReport& report) {
  ordered_json candidates = ordered_json::array();
  for (const auto& c : report.candidates) {
    candidates.push_back({{"author_id", c.candidate.author_id},
                          {"name", c.candidate.name},
                          {"relevance", c.candidate.relevance},
                          {"selected_papers", c.candidate.selected_paper_ids.size()},
                          {"visible_papers", c.candidate.visible_paper_ids.size()},
                          {"last_active_year", c.candidate.last_active_year},
                          {"role", role_name(c.role)},
                          {"conflicted", c.conflicted}});
  }
  ordered_json out = {{"seeds", report.session.network.seeds},
                      {"candidates", std::move(candidates)},
                      {"skipped", report.skipped}};
  if (report.document) {
    out["export"] = ordered_json::parse(render_export_json(*report.document));
  } else {
    out["export"] = nullptr;
  }
  return out.dump(2) + "\n";
}

std::string render_find_text(const FindReport& report) {
  std::ostringstream out;
  out << "Candidate reviewers\n";
  out << "===================\n";
  std::size_t n = 0;
  for (const auto& c : report.candidates) {
    char score[32];
    std::snprintf(score, sizeof score, "%.2f", c.candidate.relevance);
    out << ++n << ". " << c.candidate.name << "  " << score << "  "
        << role_name(c.role) << (c.conflicted ? " (conflicted)" : "") << "\n";
  }
  if (report.candidates.empty()) out << "(none)\n";
  if (report.document) {
    out << "\n" << render_export_text(*report.document);
  } else {
    out << "\nNo reviewers selected.\n";
  }
  return out.str();
}

}  // namespace revsel
