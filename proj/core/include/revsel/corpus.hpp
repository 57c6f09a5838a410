#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace revsel {

using PaperId = std::string;
using AuthorId = std::string;

struct AuthorRef {
  AuthorId id;
  std::string name;

  friend bool operator==(const AuthorRef&, const AuthorRef&) = default;
};

// One publication as read from the corpus. `out_citations` keeps the raw
// reference list; the index only materializes edges whose target it holds.
struct PaperRecord {
  PaperId id;
  std::string title;
  int year = 0;
  std::string venue;
  std::vector<AuthorRef> authors;
  std::vector<PaperId> out_citations;

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

struct CleaningRules {
  // Lower-case substrings; a title containing any of them is front matter.
  std::vector<std::string> front_matter_patterns = default_patterns();

  static std::vector<std::string> default_patterns();
};

struct IngestFilter {
  std::set<std::string> venue_allowlist;  // empty admits every venue
  int year_min = std::numeric_limits<int>::min();
  int year_max = std::numeric_limits<int>::max();
  CleaningRules cleaning;

  // Throws kInvalidArgument when year_min > year_max.
  void validate() const;
  bool admits(const PaperRecord& record) const;
};

// True when the record is not a research paper: no authors, or a title
// matching one of the front-matter patterns (case-insensitive).
bool is_non_paper(const PaperRecord& record, const CleaningRules& rules);

struct IngestStats {
  std::size_t lines_read = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
  std::size_t dropped_missing_year = 0;
  std::size_t dropped_by_filter = 0;
  std::size_t dropped_non_papers = 0;
  std::size_t papers = 0;
  std::size_t citations = 0;
  std::size_t citations_dropped = 0;
  std::size_t authors = 0;

  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

struct CoauthorEdge {
  std::set<PaperId> papers;
  int last_year = 0;

  friend bool operator==(const CoauthorEdge&, const CoauthorEdge&) = default;
};

struct TitleMatch {
  PaperId id;
  std::string title;
  int year = 0;
  bool already_in_network = false;

  friend bool operator==(const TitleMatch&, const TitleMatch&) = default;
};

struct AuthorMatch {
  AuthorId id;
  std::string name;
  std::size_t papers = 0;
  int last_active_year = 0;
};

// Immutable store of papers, citations and co-authorship. Safe for
// concurrent reads once built.
class CorpusIndex {
 public:
  CorpusIndex() = default;

  // Records must have unique ids. Citation targets absent from `records`
  // are dropped; the number dropped is available via dangling_citations().
  static CorpusIndex build(std::vector<PaperRecord> records);

  const std::map<PaperId, PaperRecord>& papers() const { return papers_; }
  const std::map<AuthorId, std::string>& author_names() const {
    return author_names_;
  }
  const std::map<std::pair<AuthorId, AuthorId>, CoauthorEdge>& coauthor_edges()
      const {
    return coauthor_edges_;
  }

  bool has_paper(std::string_view id) const;
  bool has_author(std::string_view id) const;

  // Throw kNotFound for unknown ids.
  const PaperRecord& paper(std::string_view id) const;
  const std::string& author_name(std::string_view id) const;
  std::size_t citation_count(std::string_view id) const;
  int last_active_year(std::string_view author) const;

  // Unknown ids yield an empty set.
  const std::set<PaperId>& in_citations(std::string_view id) const;
  const std::set<PaperId>& out_citations(std::string_view id) const;
  const std::set<PaperId>& author_papers(std::string_view author) const;
  const std::set<AuthorId>& all_coauthors(std::string_view author) const;

  // Order of arguments does not matter. nullptr when the two never
  // co-authored a paper.
  const CoauthorEdge* coauthor_edge(std::string_view a,
                                    std::string_view b) const;

  std::size_t citation_edge_count() const { return citation_edges_; }
  std::size_t dangling_citations() const { return dangling_citations_; }
  int min_year() const { return min_year_; }
  int max_year() const { return max_year_; }

  // Every whitespace-separated keyword of `query` must occur in the title,
  // case-insensitively. Ordered by year, then title, then id. A paper is
  // flagged already_in_network when it is a member of `network`.
  std::vector<TitleMatch> search_titles(
      std::string_view query, std::size_t limit,
      const std::set<PaperId>* network = nullptr) const;

  // Same keyword rule over author names; ordered by name, then id.
  std::vector<AuthorMatch> search_authors(std::string_view query,
                                          std::size_t limit) const;

  // Exact title lookup; several papers may share a title.
  std::vector<PaperId> find_by_title(std::string_view title) const;
  std::vector<AuthorId> find_by_name(std::string_view name) const;

  friend bool operator==(const CorpusIndex&, const CorpusIndex&) = default;

 private:
  std::map<PaperId, PaperRecord> papers_;
  std::map<PaperId, std::set<PaperId>> in_citations_;
  std::map<PaperId, std::set<PaperId>> out_citations_;
  std::map<AuthorId, std::set<PaperId>> author_papers_;
  std::map<AuthorId, std::string> author_names_;
  std::map<AuthorId, int> last_active_;
  std::map<std::pair<AuthorId, AuthorId>, CoauthorEdge> coauthor_edges_;
  std::map<AuthorId, std::set<AuthorId>> coauthors_;
  std::map<PaperId, std::string> folded_titles_;
  std::size_t citation_edges_ = 0;
  std::size_t dangling_citations_ = 0;
  int min_year_ = 0;
  int max_year_ = 0;
};

struct IngestResult {
  CorpusIndex index;
  IngestStats stats;
};

// Reads newline-delimited JSON records shaped like the Semantic Scholar
// Open Research Corpus. Lines that are not valid JSON abort ingestion with
// kIngestError naming the line; JSON lines missing required fields are
// skipped and counted as malformed.
IngestResult ingest_corpus(std::istream& source, const IngestFilter& filter);
IngestResult ingest_corpus_file(const std::filesystem::path& path,
                                const IngestFilter& filter);

// Parses one NDJSON line. Returns false when the JSON is well-formed but
// not a usable record. Throws kIngestError on invalid JSON.
bool parse_corpus_line(std::string_view line, std::size_t line_number,
                       PaperRecord& out);

// Snapshot: a single JSON document holding the cleaned records.
void save_snapshot(const CorpusIndex& index, std::ostream& out);
CorpusIndex load_snapshot(std::istream& in);
CorpusIndex load_snapshot_file(const std::filesystem::path& path);

// Filter config document: {"venues": [...], "year_min": N, "year_max": N,
// "front_matter_patterns": [...]}. Every key is optional.
IngestFilter filter_from_json(std::string_view text);
IngestFilter load_filter_file(const std::filesystem::path& path);

// Lower-cases ASCII letters; other bytes pass through.
std::string fold_case(std::string_view text);

}  // namespace revsel
