#include "revsel/export.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "revsel/error.hpp"

namespace revsel {
namespace {

using nlohmann::ordered_json;

std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

}  // namespace

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0x0F];
    }
  }
  return out;
}

std::string dblp_paper_url(std::string_view title) {
  return "https://dblp.org/search?q=" + percent_encode(title);
}

std::string dblp_author_url(std::string_view name) {
  return "https://dblp.org/search/author?q=" + percent_encode(name);
}

std::string BibEntry::citation() const {
  std::string out;
  for (std::size_t i = 0; i < authors.size(); ++i) {
    if (i > 0) out += ", ";
    out += authors[i];
  }
  if (!out.empty()) out += ". ";
  out += title;
  if (!title.empty() && title.back() != '.' && title.back() != '?' &&
      title.back() != '!') {
    out += '.';
  }
  out += ' ';
  if (!venue.empty()) out += venue + ", ";
  out += std::to_string(year) + ".";
  return out;
}

BibEntry bib_entry(const CorpusIndex& index, const PaperId& paper) {
  const auto& record = index.paper(paper);
  BibEntry entry;
  entry.id = record.id;
  for (const auto& a : record.authors) entry.authors.push_back(a.name);
  entry.title = record.title;
  entry.venue = record.venue;
  entry.year = record.year;
  entry.dblp_url = dblp_paper_url(record.title);
  return entry;
}

ExportDocument export_reviewer_list(const Session& session,
                                    const CorpusIndex& index) {
  if (session.selected_reviewers.empty()) {
    throw Error(ErrorCode::kEmptySelection, "no reviewer has been selected");
  }
  ExportDocument doc;
  doc.session_id = session.session_id;
  for (const auto& id : session.submitting_authors) {
    doc.submitting_authors.push_back(index.author_name(id));
  }
  std::sort(doc.submitting_authors.begin(), doc.submitting_authors.end());

  for (const auto& id : session.selected_reviewers) {
    auto researcher = describe_researcher(id, session.network, index,
                                          session.settings.params);
    ExportReviewer reviewer;
    reviewer.author_id = id;
    reviewer.name = researcher.name;
    reviewer.relevance = researcher.relevance;
    reviewer.dblp_url = dblp_author_url(researcher.name);
    const auto& motivating = researcher.selected_paper_ids.empty()
                                 ? researcher.visible_paper_ids
                                 : researcher.selected_paper_ids;
    for (const auto& p : motivating) reviewer.papers.push_back(bib_entry(index, p));
    std::stable_sort(reviewer.papers.begin(), reviewer.papers.end(),
                     [](const BibEntry& l, const BibEntry& r) {
                       return l.year < r.year;
                     });
    for (const auto& e : substitutes(session, index, id).entries) {
      reviewer.substitutes.push_back(
          {e.author_id, e.name, e.common_papers_with_reviewer, e.relevance});
    }
    doc.reviewers.push_back(std::move(reviewer));
  }
  return doc;
}

std::string render_export_json(const ExportDocument& doc) {
  ordered_json reviewers = ordered_json::array();
  for (const auto& r : doc.reviewers) {
    ordered_json papers = ordered_json::array();
    for (const auto& p : r.papers) {
      papers.push_back({{"id", p.id},
                        {"authors", p.authors},
                        {"title", p.title},
                        {"venue", p.venue},
                        {"year", p.year},
                        {"citation", p.citation()},
                        {"dblp_url", p.dblp_url}});
    }
    ordered_json subs = ordered_json::array();
    for (const auto& s : r.substitutes) {
      subs.push_back({{"author_id", s.author_id},
                      {"name", s.name},
                      {"common_papers", s.common_papers},
                      {"relevance", s.relevance}});
    }
    reviewers.push_back({{"author_id", r.author_id},
                         {"name", r.name},
                         {"relevance", r.relevance},
                         {"dblp_url", r.dblp_url},
                         {"papers", std::move(papers)},
                         {"substitutes", std::move(subs)}});
  }
  ordered_json out = {{"session_id", doc.session_id},
                      {"submitting_authors", doc.submitting_authors},
                      {"reviewers", std::move(reviewers)}};
  return out.dump(2) + "\n";
}

std::string render_export_text(const ExportDocument& doc) {
  std::ostringstream out;
  out << "Selected reviewers\n";
  out << "==================\n";
  if (!doc.submitting_authors.empty()) {
    out << "Submitting authors: ";
    for (std::size_t i = 0; i < doc.submitting_authors.size(); ++i) {
      out << (i ? ", " : "") << doc.submitting_authors[i];
    }
    out << "\n";
  }
  std::size_t n = 0;
  for (const auto& r : doc.reviewers) {
    out << "\n" << ++n << ". " << r.name << " (relevance "
        << format_score(r.relevance) << ")\n";
    out << "   " << r.dblp_url << "\n";
    std::size_t k = 0;
    for (const auto& p : r.papers) {
      out << "   [" << ++k << "] " << p.citation() << "\n";
    }
    out << "   Substitutes:\n";
    if (r.substitutes.empty()) out << "     (none)\n";
    for (const auto& s : r.substitutes) {
      out << "     - " << s.name << " (" << s.common_papers
          << (s.common_papers == 1 ? " common paper" : " common papers")
          << ", relevance " << format_score(s.relevance) << ")\n";
    }
  }
  return out.str();
}

}  // namespace revsel
