#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "revsel/corpus.hpp"
#include "revsel/review_session.hpp"

namespace revsel {

// Search links; resolving a DBLP record needs the live service.
std::string dblp_paper_url(std::string_view title);
std::string dblp_author_url(std::string_view name);
std::string percent_encode(std::string_view text);

struct BibEntry {
  PaperId id;
  std::vector<std::string> authors;
  std::string title;
  std::string venue;
  int year = 0;
  std::string dblp_url;

  // "A. Author, B. Author. Title. Venue, 2004."
  std::string citation() const;
};

struct ExportSubstitute {
  AuthorId author_id;
  std::string name;
  int common_papers = 0;
  double relevance = 0.0;
};

struct ExportReviewer {
  AuthorId author_id;
  std::string name;
  double relevance = 0.0;
  std::string dblp_url;
  std::vector<BibEntry> papers;
  std::vector<ExportSubstitute> substitutes;
};

struct ExportDocument {
  std::string session_id;
  std::vector<std::string> submitting_authors;  // names, sorted
  std::vector<ExportReviewer> reviewers;
};

BibEntry bib_entry(const CorpusIndex& index, const PaperId& paper);

// Per reviewer: the selected papers they authored (or, when they have none,
// their papers in the network) and their substitutes. Throws
// kEmptySelection when no reviewer is selected.
ExportDocument export_reviewer_list(const Session& session,
                                    const CorpusIndex& index);

std::string render_export_json(const ExportDocument& doc);
std::string render_export_text(const ExportDocument& doc);

}  // namespace revsel
