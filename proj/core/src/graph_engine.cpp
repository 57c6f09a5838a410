#include "revsel/graph_engine.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "revsel/error.hpp"

namespace revsel {
namespace {

void require_paper(const CorpusIndex& index, const PaperId& id) {
  if (!index.has_paper(id)) {
    throw Error(ErrorCode::kNotFound, "unknown paper '" + id + "'", id);
  }
}

void require_author(const CorpusIndex& index, const AuthorId& id) {
  if (!index.has_author(id)) {
    throw Error(ErrorCode::kNotFound, "unknown author '" + id + "'", id);
  }
}

PaperNetworkState with_selection(std::vector<PaperId> seeds,
                                 std::set<PaperId> selected,
                                 const CorpusIndex& index) {
  PaperNetworkState next;
  next.visible = reconstruct_visible(index, selected);
  next.seeds = std::move(seeds);
  next.selected = std::move(selected);
  return next;
}

bool expired(int last_year, const std::optional<int>& limit,
             int reference_year) {
  return limit.has_value() && reference_year - last_year > *limit;
}

bool ranks_before(const ReviewerCandidate& l, const ReviewerCandidate& r) {
  if (l.relevance != r.relevance) return l.relevance > r.relevance;
  return std::tie(l.name, l.author_id) < std::tie(r.name, r.author_id);
}

}  // namespace

void RelevanceParams::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) ||
      std::abs(alpha + beta - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "relevance weights must be non-negative and sum to 1");
  }
}

void Thresholds::validate() const {
  if (min_selected_papers < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "min_selected_papers must be at least 1");
  }
  if (researcher_expiration_years.value_or(0) < 0 ||
      conflict_expiration_years.value_or(0) < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "expiration thresholds must be non-negative");
  }
}

Thresholds Thresholds::defaults_for(const CorpusIndex& index) {
  Thresholds th;
  th.reference_year = index.max_year();
  return th;
}

std::set<PaperId> reconstruct_visible(const CorpusIndex& index,
                                      const std::set<PaperId>& selected) {
  std::set<PaperId> visible;
  for (const auto& p : selected) {
    visible.insert(p);
    const auto& in = index.in_citations(p);
    const auto& out = index.out_citations(p);
    visible.insert(in.begin(), in.end());
    visible.insert(out.begin(), out.end());
  }
  return visible;
}

PaperNetworkState init_network(const CorpusIndex& index,
                               std::span<const PaperId> seed_ids) {
  if (seed_ids.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one seed is required");
  }
  return add_seeds(PaperNetworkState{}, index, seed_ids);
}

PaperNetworkState add_seeds(const PaperNetworkState& state,
                            const CorpusIndex& index,
                            std::span<const PaperId> seed_ids) {
  for (const auto& id : seed_ids) require_paper(index, id);
  auto seeds = state.seeds;
  auto selected = state.selected;
  for (const auto& id : seed_ids) {
    if (std::find(seeds.begin(), seeds.end(), id) == seeds.end()) {
      seeds.push_back(id);
    }
    selected.insert(id);
  }
  return with_selection(std::move(seeds), std::move(selected), index);
}

PaperNetworkState select_paper(const PaperNetworkState& state,
                               const CorpusIndex& index, const PaperId& paper) {
  require_paper(index, paper);
  if (!state.visible.contains(paper)) {
    throw Error(ErrorCode::kNotVisible,
                "paper '" + paper + "' is not in the network", paper);
  }
  if (state.selected.contains(paper)) return state;
  auto next = state;
  next.selected.insert(paper);
  const auto& in = index.in_citations(paper);
  const auto& out = index.out_citations(paper);
  next.visible.insert(in.begin(), in.end());
  next.visible.insert(out.begin(), out.end());
  return next;
}

PaperNetworkState deselect_paper(const PaperNetworkState& state,
                                 const CorpusIndex& index,
                                 const PaperId& paper) {
  if (!state.selected.contains(paper)) {
    throw Error(ErrorCode::kNotSelected,
                "paper '" + paper + "' is not selected", paper);
  }
  if (std::find(state.seeds.begin(), state.seeds.end(), paper) !=
      state.seeds.end()) {
    throw Error(ErrorCode::kIsSeed,
                "paper '" + paper + "' is a seed; use remove_seed", paper);
  }
  auto selected = state.selected;
  selected.erase(paper);
  return with_selection(state.seeds, std::move(selected), index);
}

PaperNetworkState remove_seed(const PaperNetworkState& state,
                              const CorpusIndex& index, const PaperId& paper) {
  auto it = std::find(state.seeds.begin(), state.seeds.end(), paper);
  if (it == state.seeds.end()) {
    throw Error(ErrorCode::kNotSeed, "paper '" + paper + "' is not a seed",
                paper);
  }
  auto seeds = state.seeds;
  seeds.erase(seeds.begin() + (it - state.seeds.begin()));
  auto selected = state.selected;
  selected.erase(paper);
  return with_selection(std::move(seeds), std::move(selected), index);
}

void validate_state(const PaperNetworkState& state, const CorpusIndex& index) {
  for (const auto& id : state.selected) {
    if (!index.has_paper(id)) {
      throw Error(ErrorCode::kDanglingId,
                  "selected paper '" + id + "' is not in the corpus", id);
    }
  }
  std::set<PaperId> unique_seeds;
  for (const auto& id : state.seeds) {
    if (!index.has_paper(id)) {
      throw Error(ErrorCode::kDanglingId,
                  "seed paper '" + id + "' is not in the corpus", id);
    }
    if (!state.selected.contains(id) || !unique_seeds.insert(id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "seed '" + id + "' is duplicated or not selected", id);
    }
  }
  if (state.visible != reconstruct_visible(index, state.selected)) {
    throw Error(ErrorCode::kInvalidArgument,
                "visible set does not match the selected papers");
  }
}

ReviewerCandidate describe_researcher(const AuthorId& author,
                                      const PaperNetworkState& state,
                                      const CorpusIndex& index,
                                      const RelevanceParams& params) {
  require_author(index, author);
  ReviewerCandidate c;
  c.author_id = author;
  c.name = index.author_name(author);
  c.last_active_year = index.last_active_year(author);
  for (const auto& p : index.author_papers(author)) {
    c.career.push_back({index.paper(p).year, p});
    if (state.visible.contains(p)) c.visible_paper_ids.insert(p);
    if (state.selected.contains(p)) c.selected_paper_ids.insert(p);
  }
  std::sort(c.career.begin(), c.career.end(), [](const auto& l, const auto& r) {
    return std::tie(l.year, l.paper) < std::tie(r.year, r.paper);
  });
  const auto selected = static_cast<double>(c.selected_paper_ids.size());
  const auto unselected = static_cast<double>(c.visible_paper_ids.size() -
                                              c.selected_paper_ids.size());
  c.relevance = params.alpha * selected + params.beta * unselected;
  return c;
}

double relevance_score(const AuthorId& author, const PaperNetworkState& state,
                       const CorpusIndex& index,
                       const RelevanceParams& params) {
  require_author(index, author);
  std::size_t selected = 0;
  std::size_t unselected = 0;
  for (const auto& p : index.author_papers(author)) {
    if (state.selected.contains(p)) {
      ++selected;
    } else if (state.visible.contains(p)) {
      ++unselected;
    }
  }
  return params.alpha * static_cast<double>(selected) +
         params.beta * static_cast<double>(unselected);
}

std::vector<ReviewerCandidate> candidate_reviewers(
    const PaperNetworkState& state, const CorpusIndex& index,
    const RelevanceParams& params, const Thresholds& thresholds, bool expand) {
  std::set<AuthorId> base;
  for (const auto& p : expand ? state.visible : state.selected) {
    for (const auto& author : index.paper(p).authors) base.insert(author.id);
  }
  std::vector<ReviewerCandidate> result;
  for (const auto& author : base) {
    auto c = describe_researcher(author, state, index, params);
    if (is_candidate(c, thresholds, expand)) result.push_back(std::move(c));
  }
  std::sort(result.begin(), result.end(), ranks_before);
  return result;
}

bool is_candidate(const ReviewerCandidate& researcher,
                  const Thresholds& thresholds, bool expand) {
  if (expand) {
    if (researcher.visible_paper_ids.empty()) return false;
  } else if (researcher.selected_paper_ids.empty() ||
             researcher.selected_paper_ids.size() <
                 static_cast<std::size_t>(thresholds.min_selected_papers)) {
    return false;
  }
  return !expired(researcher.last_active_year,
                  thresholds.researcher_expiration_years,
                  thresholds.reference_year);
}

bool in_conflict(const AuthorId& a, const AuthorId& b,
                 const CorpusIndex& index, const Thresholds& thresholds) {
  if (a == b) return false;
  const auto* edge = index.coauthor_edge(a, b);
  return edge != nullptr &&
         !expired(edge->last_year, thresholds.conflict_expiration_years,
                  thresholds.reference_year);
}

std::set<AuthorId> coauthors(const AuthorId& author, const CorpusIndex& index,
                             const Thresholds& thresholds) {
  require_author(index, author);
  std::set<AuthorId> result;
  for (const auto& other : index.all_coauthors(author)) {
    if (in_conflict(author, other, index, thresholds)) result.insert(other);
  }
  return result;
}

std::optional<ResearcherEdge> researcher_edge(const AuthorId& a,
                                              const AuthorId& b,
                                              const PaperNetworkState& state,
                                              const CorpusIndex& index) {
  const auto* shared = index.coauthor_edge(a, b);
  if (shared == nullptr) return std::nullopt;
  ResearcherEdge edge;
  edge.a = std::min(a, b);
  edge.b = std::max(a, b);
  edge.common_total = static_cast<int>(shared->papers.size());
  edge.last_common_year = shared->last_year;
  for (const auto& p : shared->papers) {
    if (state.visible.contains(p)) ++edge.common_visible;
    if (state.selected.contains(p)) edge.includes_selected = true;
  }
  return edge;
}

ResearcherNetwork researcher_network(const PaperNetworkState& state,
                                     const CorpusIndex& index,
                                     const RelevanceParams& params,
                                     const Thresholds& thresholds,
                                     bool expand) {
  ResearcherNetwork net;
  auto candidates =
      candidate_reviewers(state, index, params, thresholds, expand);
  std::set<AuthorId> included;
  for (const auto& c : candidates) included.insert(c.author_id);
  std::set<AuthorId> stubs;
  for (const auto& c : candidates) {
    for (const auto& other : coauthors(c.author_id, index, thresholds)) {
      if (!included.contains(other)) stubs.insert(other);
    }
  }
  for (auto& c : candidates) {
    net.nodes.push_back({c.author_id, c.name, std::move(c)});
  }
  std::vector<ResearcherNode> stub_nodes;
  for (const auto& id : stubs) {
    stub_nodes.push_back({id, index.author_name(id), std::nullopt});
  }
  std::sort(stub_nodes.begin(), stub_nodes.end(),
            [](const auto& l, const auto& r) {
              return std::tie(l.name, l.author_id) <
                     std::tie(r.name, r.author_id);
            });
  for (auto& node : stub_nodes) net.nodes.push_back(std::move(node));
  included.insert(stubs.begin(), stubs.end());

  for (const auto& a : included) {
    for (const auto& b : index.all_coauthors(a)) {
      if (!(a < b) || !included.contains(b)) continue;
      if (!in_conflict(a, b, index, thresholds)) continue;
      net.edges.push_back(*researcher_edge(a, b, state, index));
    }
  }
  return net;
}

PaperNetworkView paper_network_view(const PaperNetworkState& state,
                                    const CorpusIndex& index) {
  PaperNetworkView view;
  for (const auto& id : state.visible) {
    view.nodes.push_back({id, index.paper(id).year, index.citation_count(id),
                          state.selected.contains(id)});
    for (const auto& target : index.out_citations(id)) {
      if (state.visible.contains(target)) view.arcs.push_back({id, target});
    }
  }
  return view;
}

}  // namespace revsel
