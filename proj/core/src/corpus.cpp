#include "revsel/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "revsel/error.hpp"

namespace revsel {
namespace {

using nlohmann::json;

const std::set<std::string> kEmptyIds;

std::vector<std::string> split_keywords(std::string_view query) {
  std::vector<std::string> words;
  std::istringstream stream{fold_case(query)};
  for (std::string word; stream >> word;) words.push_back(std::move(word));
  return words;
}

bool contains_all(const std::string& haystack,
                  const std::vector<std::string>& needles) {
  return std::all_of(needles.begin(), needles.end(), [&](const auto& n) {
    return haystack.find(n) != std::string::npos;
  });
}

std::string string_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

int year_field(const json& obj) {
  auto it = obj.find("year");
  if (it == obj.end() || it->is_null()) return 0;
  if (it->is_number_integer()) return it->get<int>();
  if (it->is_number()) return static_cast<int>(it->get<double>());
  if (it->is_string()) {
    try {
      return std::stoi(it->get<std::string>());
    } catch (const std::exception&) {
      return 0;
    }
  }
  return 0;
}

// Authors without any id get a synthetic one derived from their name.
bool parse_author(const json& entry, AuthorRef& out) {
  if (!entry.is_object()) return false;
  out.name = string_field(entry, "name");
  out.id.clear();
  if (auto ids = entry.find("ids"); ids != entry.end() && ids->is_array()) {
    for (const auto& id : *ids) {
      if (id.is_string() && !id.get<std::string>().empty()) {
        out.id = id.get<std::string>();
        break;
      }
      if (id.is_number_integer()) {
        out.id = std::to_string(id.get<long long>());
        break;
      }
    }
  } else if (auto id = entry.find("id"); id != entry.end() && id->is_string()) {
    out.id = id->get<std::string>();
  }
  if (out.id.empty()) {
    if (out.name.empty()) return false;
    out.id = "name:" + out.name;
  }
  if (out.name.empty()) out.name = out.id;
  return true;
}

json record_to_json(const PaperRecord& record) {
  json authors = json::array();
  for (const auto& a : record.authors) {
    authors.push_back({{"ids", json::array({a.id})}, {"name", a.name}});
  }
  return {{"id", record.id},
          {"title", record.title},
          {"year", record.year},
          {"venue", record.venue},
          {"authors", std::move(authors)},
          {"outCitations", record.out_citations}};
}

}  // namespace

std::string fold_case(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string> CleaningRules::default_patterns() {
  return {"preface",   "foreword",          "editorial",   "acknowledgment",
          "reviewers", "table of contents", "author index"};
}

void IngestFilter::validate() const {
  if (year_min > year_max) {
    throw Error(ErrorCode::kInvalidArgument,
                "year_min " + std::to_string(year_min) + " exceeds year_max " +
                    std::to_string(year_max));
  }
}

bool IngestFilter::admits(const PaperRecord& record) const {
  if (record.year < year_min || record.year > year_max) return false;
  return venue_allowlist.empty() || venue_allowlist.contains(record.venue);
}

bool is_non_paper(const PaperRecord& record, const CleaningRules& rules) {
  if (record.authors.empty()) return true;
  const std::string title = fold_case(record.title);
  return std::any_of(rules.front_matter_patterns.begin(),
                     rules.front_matter_patterns.end(),
                     [&](const std::string& pattern) {
                       return !pattern.empty() &&
                              title.find(fold_case(pattern)) !=
                                  std::string::npos;
                     });
}

CorpusIndex CorpusIndex::build(std::vector<PaperRecord> records) {
  CorpusIndex index;
  for (auto& record : records) {
    PaperId id = record.id;
    index.papers_.emplace(std::move(id), std::move(record));
  }

  bool first = true;
  for (const auto& [id, paper] : index.papers_) {
    index.in_citations_[id];
    auto& out = index.out_citations_[id];
    for (const auto& target : paper.out_citations) {
      if (target == id || !index.papers_.contains(target)) {
        ++index.dangling_citations_;
        continue;
      }
      if (out.insert(target).second) ++index.citation_edges_;
    }
    index.folded_titles_[id] = fold_case(paper.title);
    if (first || paper.year < index.min_year_) index.min_year_ = paper.year;
    if (first || paper.year > index.max_year_) index.max_year_ = paper.year;
    first = false;
  }
  for (const auto& [id, targets] : index.out_citations_) {
    for (const auto& target : targets) index.in_citations_[target].insert(id);
  }

  // Names come from the earliest paper (by year, then id) listing the author.
  std::map<AuthorId, std::pair<int, PaperId>> name_source;
  for (const auto& [id, paper] : index.papers_) {
    std::set<AuthorId> unique;
    for (const auto& author : paper.authors) {
      if (!unique.insert(author.id).second) continue;
      index.author_papers_[author.id].insert(id);
      auto& last = index.last_active_[author.id];
      last = std::max(last, paper.year);
      auto key = std::make_pair(paper.year, id);
      auto [it, inserted] = name_source.try_emplace(author.id, key);
      if (inserted || key < it->second) {
        it->second = key;
        index.author_names_[author.id] = author.name;
      }
    }
    for (auto a = unique.begin(); a != unique.end(); ++a) {
      for (auto b = std::next(a); b != unique.end(); ++b) {
        auto& edge = index.coauthor_edges_[{*a, *b}];
        edge.papers.insert(id);
        edge.last_year = std::max(edge.last_year, paper.year);
        index.coauthors_[*a].insert(*b);
        index.coauthors_[*b].insert(*a);
      }
    }
  }
  return index;
}

bool CorpusIndex::has_paper(std::string_view id) const {
  return papers_.find(std::string(id)) != papers_.end();
}

bool CorpusIndex::has_author(std::string_view id) const {
  return author_names_.find(std::string(id)) != author_names_.end();
}

const PaperRecord& CorpusIndex::paper(std::string_view id) const {
  auto it = papers_.find(std::string(id));
  if (it == papers_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown paper '" + std::string(id) + "'",
                std::string(id));
  }
  return it->second;
}

const std::string& CorpusIndex::author_name(std::string_view id) const {
  auto it = author_names_.find(std::string(id));
  if (it == author_names_.end()) {
    throw Error(ErrorCode::kNotFound,
                "unknown author '" + std::string(id) + "'", std::string(id));
  }
  return it->second;
}

std::size_t CorpusIndex::citation_count(std::string_view id) const {
  auto it = in_citations_.find(std::string(id));
  if (it == in_citations_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown paper '" + std::string(id) + "'",
                std::string(id));
  }
  return it->second.size();
}

int CorpusIndex::last_active_year(std::string_view author) const {
  auto it = last_active_.find(std::string(author));
  if (it == last_active_.end()) {
    throw Error(ErrorCode::kNotFound,
                "unknown author '" + std::string(author) + "'",
                std::string(author));
  }
  return it->second;
}

const std::set<PaperId>& CorpusIndex::in_citations(std::string_view id) const {
  auto it = in_citations_.find(std::string(id));
  return it == in_citations_.end() ? kEmptyIds : it->second;
}

const std::set<PaperId>& CorpusIndex::out_citations(std::string_view id) const {
  auto it = out_citations_.find(std::string(id));
  return it == out_citations_.end() ? kEmptyIds : it->second;
}

const std::set<PaperId>& CorpusIndex::author_papers(
    std::string_view author) const {
  auto it = author_papers_.find(std::string(author));
  return it == author_papers_.end() ? kEmptyIds : it->second;
}

const std::set<AuthorId>& CorpusIndex::all_coauthors(
    std::string_view author) const {
  auto it = coauthors_.find(std::string(author));
  return it == coauthors_.end() ? kEmptyIds : it->second;
}

const CoauthorEdge* CorpusIndex::coauthor_edge(std::string_view a,
                                               std::string_view b) const {
  std::pair<AuthorId, AuthorId> key{std::string(a), std::string(b)};
  if (key.second < key.first) std::swap(key.first, key.second);
  auto it = coauthor_edges_.find(key);
  return it == coauthor_edges_.end() ? nullptr : &it->second;
}

std::vector<TitleMatch> CorpusIndex::search_titles(
    std::string_view query, std::size_t limit,
    const std::set<PaperId>* network) const {
  auto words = split_keywords(query);
  if (words.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "search query is empty");
  }
  std::vector<TitleMatch> matches;
  for (const auto& [id, folded] : folded_titles_) {
    if (!contains_all(folded, words)) continue;
    const auto& paper = papers_.at(id);
    matches.push_back({id, paper.title, paper.year,
                       network != nullptr && network->contains(id)});
  }
  std::sort(matches.begin(), matches.end(), [](const auto& l, const auto& r) {
    return std::tie(l.year, l.title, l.id) < std::tie(r.year, r.title, r.id);
  });
  if (matches.size() > limit) matches.resize(limit);
  return matches;
}

std::vector<AuthorMatch> CorpusIndex::search_authors(std::string_view query,
                                                     std::size_t limit) const {
  auto words = split_keywords(query);
  if (words.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "search query is empty");
  }
  std::vector<AuthorMatch> matches;
  for (const auto& [id, name] : author_names_) {
    if (!contains_all(fold_case(name), words)) continue;
    matches.push_back(
        {id, name, author_papers(id).size(), last_active_.at(id)});
  }
  std::sort(matches.begin(), matches.end(), [](const auto& l, const auto& r) {
    return std::tie(l.name, l.id) < std::tie(r.name, r.id);
  });
  if (matches.size() > limit) matches.resize(limit);
  return matches;
}

std::vector<PaperId> CorpusIndex::find_by_title(std::string_view title) const {
  std::vector<PaperId> ids;
  for (const auto& [id, paper] : papers_) {
    if (paper.title == title) ids.push_back(id);
  }
  return ids;
}

std::vector<AuthorId> CorpusIndex::find_by_name(std::string_view name) const {
  std::vector<AuthorId> ids;
  for (const auto& [id, author] : author_names_) {
    if (author == name) ids.push_back(id);
  }
  return ids;
}

bool parse_corpus_line(std::string_view line, std::size_t line_number,
                       PaperRecord& out) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kIngestError,
                "line " + std::to_string(line_number) + ": invalid JSON (" +
                    e.what() + ")",
                std::to_string(line_number));
  }
  if (!doc.is_object()) return false;
  out = PaperRecord{};
  out.id = string_field(doc, "id");
  out.title = string_field(doc, "title");
  if (out.id.empty() || out.title.empty()) return false;
  out.year = year_field(doc);
  out.venue = string_field(doc, "venue");
  if (out.venue.empty()) out.venue = string_field(doc, "journalName");
  if (auto authors = doc.find("authors"); authors != doc.end()) {
    if (!authors->is_array()) return false;
    for (const auto& entry : *authors) {
      AuthorRef author;
      if (parse_author(entry, author)) out.authors.push_back(std::move(author));
    }
  }
  if (auto cites = doc.find("outCitations"); cites != doc.end()) {
    if (!cites->is_array()) return false;
    for (const auto& target : *cites) {
      if (target.is_string()) out.out_citations.push_back(target);
    }
  }
  return true;
}

IngestResult ingest_corpus(std::istream& source, const IngestFilter& filter) {
  filter.validate();
  IngestStats stats;
  std::vector<PaperRecord> kept;
  std::set<PaperId> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(source, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++stats.lines_read;
    PaperRecord record;
    if (!parse_corpus_line(line, line_number, record)) {
      ++stats.malformed;
      continue;
    }
    if (!seen.insert(record.id).second) {
      ++stats.duplicates;
      continue;
    }
    if (record.year == 0) {
      ++stats.dropped_missing_year;
      continue;
    }
    if (!filter.admits(record)) {
      ++stats.dropped_by_filter;
      continue;
    }
    if (is_non_paper(record, filter.cleaning)) {
      ++stats.dropped_non_papers;
      continue;
    }
    kept.push_back(std::move(record));
  }
  if (source.bad()) {
    throw Error(ErrorCode::kIngestError,
                "read failure after line " + std::to_string(line_number),
                std::to_string(line_number));
  }
  IngestResult result{CorpusIndex::build(std::move(kept)), stats};
  result.stats.papers = result.index.papers().size();
  result.stats.citations = result.index.citation_edge_count();
  result.stats.citations_dropped = result.index.dangling_citations();
  result.stats.authors = result.index.author_names().size();
  return result;
}

IngestResult ingest_corpus_file(const std::filesystem::path& path,
                                const IngestFilter& filter) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open corpus " + path.string(),
                path.string());
  }
  return ingest_corpus(in, filter);
}

IngestFilter filter_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("filter config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kSchemaViolation, "filter config must be an object");
  }
  IngestFilter filter;
  auto strings = [&](const char* key) {
    std::vector<std::string> out;
    const auto& v = doc[key];
    if (!v.is_array()) {
      throw Error(ErrorCode::kSchemaViolation,
                  std::string("'") + key + "' must be a list of strings");
    }
    for (const auto& item : v) {
      if (!item.is_string()) {
        throw Error(ErrorCode::kSchemaViolation,
                    std::string("'") + key + "' must be a list of strings");
      }
      out.push_back(item.get<std::string>());
    }
    return out;
  };
  auto year = [&](const char* key, int& target) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer()) {
      throw Error(ErrorCode::kSchemaViolation,
                  std::string("'") + key + "' must be an integer");
    }
    target = doc[key].get<int>();
  };
  if (doc.contains("venues")) {
    for (auto& v : strings("venues")) filter.venue_allowlist.insert(std::move(v));
  }
  year("year_min", filter.year_min);
  year("year_max", filter.year_max);
  if (doc.contains("front_matter_patterns")) {
    filter.cleaning.front_matter_patterns = strings("front_matter_patterns");
  }
  filter.validate();
  return filter;
}

IngestFilter load_filter_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open filter config " + path.string(),
                path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return filter_from_json(text.str());
}

void save_snapshot(const CorpusIndex& index, std::ostream& out) {
  json papers = json::array();
  for (const auto& [id, record] : index.papers()) {
    papers.push_back(record_to_json(record));
  }
  json doc = {{"format", "revsel-snapshot"},
              {"version", 1},
              {"papers", std::move(papers)}};
  out << doc.dump() << '\n';
}

CorpusIndex load_snapshot(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("snapshot is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "revsel-snapshot" ||
      !doc.contains("papers") || !doc["papers"].is_array()) {
    throw Error(ErrorCode::kSchemaViolation, "not a corpus snapshot");
  }
  std::vector<PaperRecord> records;
  std::size_t n = 0;
  for (const auto& entry : doc["papers"]) {
    ++n;
    PaperRecord record;
    if (!parse_corpus_line(entry.dump(), n, record)) {
      throw Error(ErrorCode::kSchemaViolation,
                  "snapshot entry " + std::to_string(n) + " is malformed");
    }
    records.push_back(std::move(record));
  }
  return CorpusIndex::build(std::move(records));
}

CorpusIndex load_snapshot_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open snapshot " + path.string(),
                path.string());
  }
  return load_snapshot(in);
}

}  // namespace revsel
