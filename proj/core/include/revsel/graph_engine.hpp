#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "revsel/corpus.hpp"

namespace revsel {

// The user-built paper network. `visible` is always the union of every
// selected paper with its in- and out-citations; seeds are a subset of
// `selected`.
struct PaperNetworkState {
  std::vector<PaperId> seeds;
  std::set<PaperId> selected;
  std::set<PaperId> visible;

  friend bool operator==(const PaperNetworkState&,
                         const PaperNetworkState&) = default;
};

struct RelevanceParams {
  double alpha = 0.7;
  double beta = 0.3;

  // Throws kInvalidArgument unless both weights are non-negative and sum to
  // one within 1e-9.
  void validate() const;

  friend bool operator==(const RelevanceParams&,
                         const RelevanceParams&) = default;
};

// Expiration thresholds are in years; std::nullopt means no limit.
struct Thresholds {
  int min_selected_papers = 1;
  std::optional<int> researcher_expiration_years;
  std::optional<int> conflict_expiration_years;
  int reference_year = 0;

  void validate() const;
  static Thresholds defaults_for(const CorpusIndex& index);

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct CareerEntry {
  int year = 0;
  PaperId paper;

  friend bool operator==(const CareerEntry&, const CareerEntry&) = default;
};

struct ReviewerCandidate {
  AuthorId author_id;
  std::string name;
  double relevance = 0.0;
  std::set<PaperId> selected_paper_ids;
  std::set<PaperId> visible_paper_ids;
  int last_active_year = 0;
  std::vector<CareerEntry> career;  // every paper in the corpus, by year

  friend bool operator==(const ReviewerCandidate&,
                         const ReviewerCandidate&) = default;
};

struct ResearcherEdge {
  AuthorId a;
  AuthorId b;
  int common_total = 0;
  int common_visible = 0;
  bool includes_selected = false;
  int last_common_year = 0;

  friend bool operator==(const ResearcherEdge&,
                         const ResearcherEdge&) = default;
};

struct ResearcherNode {
  AuthorId author_id;
  std::string name;
  // Set for candidates; collaborator stubs carry only id and name.
  std::optional<ReviewerCandidate> candidate;
};

struct ResearcherNetwork {
  std::vector<ResearcherNode> nodes;
  std::vector<ResearcherEdge> edges;
};

struct PaperNode {
  PaperId id;
  int year = 0;
  std::size_t citation_count = 0;
  bool selected = false;
};

struct CitationArc {
  PaperId from;  // citing paper
  PaperId to;    // cited paper

  friend bool operator==(const CitationArc&, const CitationArc&) = default;
};

struct PaperNetworkView {
  std::vector<PaperNode> nodes;
  std::vector<CitationArc> arcs;
};

// Recomputes the visible set from the selected set.
std::set<PaperId> reconstruct_visible(const CorpusIndex& index,
                                      const std::set<PaperId>& selected);

PaperNetworkState init_network(const CorpusIndex& index,
                               std::span<const PaperId> seed_ids);
// Appends new seeds to an existing (possibly empty) network.
PaperNetworkState add_seeds(const PaperNetworkState& state,
                            const CorpusIndex& index,
                            std::span<const PaperId> seed_ids);
PaperNetworkState select_paper(const PaperNetworkState& state,
                               const CorpusIndex& index, const PaperId& paper);
PaperNetworkState deselect_paper(const PaperNetworkState& state,
                                 const CorpusIndex& index,
                                 const PaperId& paper);
PaperNetworkState remove_seed(const PaperNetworkState& state,
                              const CorpusIndex& index, const PaperId& paper);

// Throws kInvalidArgument if the state breaks seeds ⊆ selected ⊆ visible or
// the reconstruction rule, kDanglingId if it references unknown papers.
void validate_state(const PaperNetworkState& state, const CorpusIndex& index);

double relevance_score(const AuthorId& author, const PaperNetworkState& state,
                       const CorpusIndex& index,
                       const RelevanceParams& params);

// expand=false ranks the authors of selected papers; expand=true ranks the
// authors of every visible paper and skips the productivity threshold.
// Sorted by relevance descending, then name, then author id.
std::vector<ReviewerCandidate> candidate_reviewers(
    const PaperNetworkState& state, const CorpusIndex& index,
    const RelevanceParams& params, const Thresholds& thresholds, bool expand);

// Whether a described researcher belongs to the candidate set under the
// given thresholds and mode.
bool is_candidate(const ReviewerCandidate& researcher,
                  const Thresholds& thresholds, bool expand);

// Builds the candidate record for one author regardless of thresholds.
ReviewerCandidate describe_researcher(const AuthorId& author,
                                      const PaperNetworkState& state,
                                      const CorpusIndex& index,
                                      const RelevanceParams& params);

// True when a and b share a paper no older than the conflict expiration.
bool in_conflict(const AuthorId& a, const AuthorId& b,
                 const CorpusIndex& index, const Thresholds& thresholds);

std::set<AuthorId> coauthors(const AuthorId& author, const CorpusIndex& index,
                             const Thresholds& thresholds);

ResearcherNetwork researcher_network(const PaperNetworkState& state,
                                     const CorpusIndex& index,
                                     const RelevanceParams& params,
                                     const Thresholds& thresholds,
                                     bool expand);

// Edge data for one pair, or nullopt when they never co-authored.
std::optional<ResearcherEdge> researcher_edge(const AuthorId& a,
                                              const AuthorId& b,
                                              const PaperNetworkState& state,
                                              const CorpusIndex& index);

PaperNetworkView paper_network_view(const PaperNetworkState& state,
                                    const CorpusIndex& index);

}  // namespace revsel
