// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <unistd.h>

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "oracle.hpp"
#include "revsel/api_service.hpp"
#include "revsel/export.hpp"
#include "revsel/session_io.hpp"

namespace {

using namespace revsel;
namespace fs = std::filesystem;
namespace oracle = revsel::testing;

// Collects the first few failure messages of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (messages_.size() < 3) messages_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    std::ostringstream out;
    out << failures_ << " failure(s)";
    for (const auto& m : messages_) out << "; " << m;
    return out.str();
  }

 private:
  int failures_ = 0;
  std::vector<std::string> messages_;
};

std::optional<ErrorCode> error_of(const std::function<void()>& f,
                                  std::string* subject = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (subject) *subject = e.subject();
    return e.code();
  }
  return std::nullopt;
}

std::string seed_tag(int seed) { return "seed " + std::to_string(seed); }

bool is_seed(const PaperNetworkState& s, const PaperId& p) {
  return std::find(s.seeds.begin(), s.seeds.end(), p) != s.seeds.end();
}

// Formula exactness.
void formula_exactness(Check& check) {
  for (int seed = 1; seed <= 200; ++seed) {
    std::mt19937_64 rng(seed);
    auto records = oracle::random_corpus(rng);
    auto index = oracle::index_of(records);
    for (int k = 0; k < 5; ++k) {
      auto state = oracle::random_state(rng, index);
      std::uniform_real_distribution<double> w(0.0, 1.0);
      const double alpha = k == 0 ? 0.7 : w(rng);
      const RelevanceParams params{alpha, 1.0 - alpha};
      for (const auto& [author, _] : index.author_names()) {
        const double got = relevance_score(author, state, index, params);
        const double want = oracle::oracle_relevance(records, state.selected, state.visible,
                                                     author, params.alpha, params.beta);
        check.expect(std::abs(got - want) <= 1e-12,
                     seed_tag(seed) + " author " + author + " score mismatch");
      }
    }
  }
  auto index = oracle::load_fixture().index;
  auto state = select_paper(init_network(index, std::vector<PaperId>{"pc-maps-2004"}),
                            index, "qms-2010");
  check.expect(state.visible.contains("reeb-2011") && !state.selected.contains("reeb-2011"),
               "worked case setup");
  check.expect(relevance_score("a01", state, index, {}) == 1.7,
               "worked case 0.7*2 + 0.3*1 != 1.7");
}

// Candidate-set soundness with thresholds disabled.
void candidate_soundness(Check& check) {
  for (int seed = 1; seed <= 200; ++seed) {
    std::mt19937_64 rng(seed);
    auto records = oracle::random_corpus(rng);
    auto index = oracle::index_of(records);
    Thresholds th = Thresholds::defaults_for(index);
    th.min_selected_papers = 1;
    th.researcher_expiration_years.reset();
    th.conflict_expiration_years.reset();
    for (int k = 0; k < 5; ++k) {
      auto state = oracle::random_state(rng, index);
      std::set<AuthorId> got;
      for (const auto& c : candidate_reviewers(state, index, {}, th, false)) {
        got.insert(c.author_id);
      }
      check.expect(got == oracle::oracle_authors_of(records, state.selected),
                   seed_tag(seed) + " candidate set differs from union of authors");
    }
  }
}

// Reconstruction invariant over random op sequences.
void reconstruction(Check& check) {
  std::mt19937_64 rng(20240601);
  std::vector<std::pair<oracle::Records, CorpusIndex>> corpora;
  for (int i = 0; i < 50; ++i) {
    auto records = oracle::random_corpus(rng);
    auto index = oracle::index_of(records);
    corpora.emplace_back(std::move(records), std::move(index));
  }
  for (int seq = 0; seq < 1000; ++seq) {
    const auto& [records, index] = corpora[seq % corpora.size()];
    auto state = oracle::random_state(rng, index, 2);
    for (int step = 0; step < 20 && !state.visible.empty(); ++step) {
      std::vector<PaperId> visible(state.visible.begin(), state.visible.end());
      const auto p = visible[std::uniform_int_distribution<std::size_t>(
          0, visible.size() - 1)(rng)];
      if (!state.selected.contains(p)) {
        auto next = select_paper(state, index, p);
        check.expect(deselect_paper(next, index, p) == state,
                     "select/deselect round trip failed in sequence " + std::to_string(seq));
        state = std::move(next);
      } else if (!is_seed(state, p)) {
        state = deselect_paper(state, index, p);
      } else {
        state = remove_seed(state, index, p);
      }
      check.expect(state.visible == oracle::oracle_visible(records, state.selected),
                   "visible differs from reconstruction in sequence " + std::to_string(seq));
    }
  }
}

// Conflict symmetry, expiration monotonicity, and the unlimited case.
void conflict_model(Check& check) {
  for (int seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    auto records = oracle::random_corpus(rng);
    auto index = oracle::index_of(records);
    auto th = Thresholds::defaults_for(index);
    std::vector<AuthorId> authors;
    for (const auto& [a, _] : index.author_names()) authors.push_back(a);
    std::map<AuthorId, std::set<AuthorId>> previous;
    const std::vector<std::optional<int>> steps{0, 2, 5, 10, 20, std::nullopt};
    for (std::size_t i = 0; i < steps.size(); ++i) {
      th.conflict_expiration_years = steps[i];
      std::map<AuthorId, std::set<AuthorId>> now;
      for (const auto& a : authors) now[a] = coauthors(a, index, th);
      for (const auto& a : authors) {
        for (const auto& b : now[a]) {
          check.expect(now[b].contains(a), seed_tag(seed) + " asymmetric conflict");
        }
        if (i > 0) {
          check.expect(std::includes(now[a].begin(), now[a].end(), previous[a].begin(),
                                     previous[a].end()),
                       seed_tag(seed) + " conflicts shrank as expiration grew");
        }
        if (!steps[i]) {
          std::set<AuthorId> raw;
          for (const auto& b : authors) {
            if (!oracle::oracle_shared_papers(records, a, b).empty()) raw.insert(b);
          }
          check.expect(now[a] == raw, seed_tag(seed) + " unlimited conflicts != co-authorship");
        }
      }
      previous = std::move(now);
    }
  }
}

void check_safe(Check& check, const Session& s, const CorpusIndex& index,
                const std::string& where) {
  const auto& th = s.settings.thresholds;
  for (const auto& r : s.selected_reviewers) {
    check.expect(!s.submitting_authors.contains(r), where + ": reviewer is a submitter");
    for (const auto& a : s.submitting_authors) {
      check.expect(!in_conflict(r, a, index, th), where + ": reviewer conflicts with submitter");
    }
    for (const auto& other : s.selected_reviewers) {
      check.expect(!in_conflict(r, other, index, th), where + ": reviewers conflict");
    }
  }
}

void check_substitutes(Check& check, const Session& s, const CorpusIndex& index,
                       const oracle::Records& records, const std::string& where) {
  for (const auto& r : s.selected_reviewers) {
    auto list = substitutes(s, index, r, 1000);
    std::vector<AuthorId> ids;
    for (const auto& e : list.entries) ids.push_back(e.author_id);
    check.expect(ids == oracle::oracle_substitutes(records, s, r),
                 where + ": substitutes for " + r + " differ from oracle");
    for (const auto& e : list.entries) {
      try {
        check_safe(check, swap_reviewer(s, index, r, e.author_id), index,
                   where + " swap " + r + "->" + e.author_id);
      } catch (const Error& err) {
        check.expect(false, where + ": swap " + r + "->" + e.author_id + " failed: " +
                                err.what());
      }
    }
  }
}

// Substitute safety, on random sessions and on fixture sessions.
void substitute_safety(Check& check) {
  for (int seed = 1; seed <= 150; ++seed) {
    std::mt19937_64 rng(seed);
    auto records = oracle::random_corpus(rng);
    auto index = oracle::index_of(records);
    auto s = oracle::random_session(rng, index, records);
    check_substitutes(check, s, index, records, seed_tag(seed));
  }
  auto index = oracle::load_fixture().index;
  auto records = oracle::kept_records(index);
  auto base = with_network(new_session(index, "fx"), index,
                           init_network(index, std::vector<PaperId>{
                                                   "pc-maps-2004", "polycut-2013",
                                                   "qms-2010", "ssq-2006"}));
  const std::vector<std::pair<std::set<AuthorId>, std::vector<AuthorId>>> cases{
      {{"a12"}, {"a01", "a10"}},
      {{}, {"a02", "a13"}},
      {{"a13"}, {"a02", "a05", "a09"}},
      {{}, {"a03", "a06"}},
  };
  for (const auto& [submitters, reviewers] : cases) {
    auto s = set_submitting_authors(base, index, submitters);
    for (const auto& r : reviewers) s = select_reviewer(s, index, r);
    check_substitutes(check, s, index, records, "fixture");
  }
}

// Ingestion of the checked-in fixture.
void ingestion_fixture(Check& check) {
  auto first = oracle::load_fixture();
  const auto& st = first.stats;
  check.expect(st.papers == 9, "papers = " + std::to_string(st.papers));
  check.expect(st.citations == 11, "citations = " + std::to_string(st.citations));
  check.expect(st.authors == 14, "authors = " + std::to_string(st.authors));
  check.expect(st.dropped_non_papers == 2,
               "non-papers dropped = " + std::to_string(st.dropped_non_papers));
  check.expect(st.dropped_by_filter == 1,
               "out-of-range dropped = " + std::to_string(st.dropped_by_filter));
  check.expect(!first.index.has_paper("ack-2010") && !first.index.has_paper("preface-2012") &&
                   !first.index.has_paper("harmonic-1993"),
               "dropped records still indexed");
  auto second = oracle::load_fixture();
  check.expect(first.index == second.index && first.stats == second.stats,
               "re-ingest is not deep-equal");
}

Session persistence_session(const CorpusIndex& index) {
  auto s = new_session(index, "golden");
  s = with_network(s, index,
                   init_network(index, std::vector<PaperId>{"pc-maps-2004", "polycut-2013",
                                                            "qms-2010"}));
  s = set_submitting_authors(s, index, {"a12"});
  s = select_reviewer(s, index, "a01");
  return select_reviewer(s, index, "a10");
}

// Session persistence and export determinism.
void session_persistence(Check& check) {
  auto index = oracle::load_fixture().index;
  auto s = persistence_session(index);
  check.expect(load_session(save_session(s), index) == s, "fixture round trip");
  for (int seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed);
    auto records = oracle::random_corpus(rng);
    auto idx = oracle::index_of(records);
    auto rs = oracle::random_session(rng, idx, records);
    check.expect(load_session(save_session(rs), idx) == rs, seed_tag(seed) + " round trip");
  }

  auto records = oracle::kept_records(index);
  std::erase_if(records, [](const auto& r) { return r.id == "qms-2010"; });
  auto smaller = oracle::index_of(records);
  std::string subject;
  auto code = error_of([&] { load_session(save_session(s), smaller); }, &subject);
  check.expect(code == ErrorCode::kDanglingId && subject == "qms-2010",
               "dangling paper not reported by id");

  auto doc = export_reviewer_list(s, index);
  check.expect(render_export_json(doc) == oracle::read_file(oracle::golden_path("export.json")),
               "JSON export differs from golden file");
  check.expect(render_export_text(doc) == oracle::read_file(oracle::golden_path("export.txt")),
               "text export differs from golden file");
  auto again = export_reviewer_list(load_session(save_session(s), index), index);
  check.expect(render_export_json(again) == render_export_json(doc) &&
                   render_export_text(again) == render_export_text(doc),
               "export changes after reload");
}

std::pair<int, std::string> http_get(int port, const std::string& path) {
  httplib::Client c("127.0.0.1", port);
  auto res = c.Get(path);
  if (!res) return {-1, {}};
  return {res->status, res->body};
}

int http_post(int port, const std::string& path, const std::string& body = "{}") {
  httplib::Client c("127.0.0.1", port);
  auto res = c.Post(path, body, "application/json");
  return res ? res->status : -1;
}

std::string created_id(const std::string& body) {
  const std::string key = "\"session_id\":\"";
  auto at = body.find(key) + key.size();
  return body.substr(at, body.find('"', at) - at);
}

std::string create_session(int port, const std::string& body) {
  httplib::Client c("127.0.0.1", port);
  auto res = c.Post("/sessions", body, "application/json");
  return res && res->status == 201 ? created_id(res->body) : std::string{};
}

// Per-session linearizability and restart+reload.
void service(Check& check) {
  auto index = std::make_shared<CorpusIndex>(oracle::load_fixture().index);
  const auto dir = fs::temp_directory_path() / ("revsel-accept-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  std::map<std::string, std::pair<int, std::string>> before;
  {
    ApiService api(index, std::make_shared<DirectorySessionStore>(dir),
                   {"127.0.0.1", 0, ""});
    const int port = api.start();
    for (int round = 0; round < 25; ++round) {
      const auto id = create_session(port, R"({"seeds":["polycut-2013"]})");
      const std::vector<std::string> picks{"a08", "a10"};
      std::vector<int> status(2);
      std::barrier start(2);
      std::vector<std::thread> threads;
      for (int i = 0; i < 2; ++i) {
        threads.emplace_back([&, i] {
          start.arrive_and_wait();
          status[i] = http_post(port, "/sessions/" + id + "/reviewers/" + picks[i]);
        });
      }
      for (auto& t : threads) t.join();
      const bool one_winner = (status[0] == 200) != (status[1] == 200);
      check.expect(one_winner && std::min(status[0], status[1]) == 200 &&
                       std::max(status[0], status[1]) == 409,
                   "race round " + std::to_string(round) + " statuses " +
                       std::to_string(status[0]) + "/" + std::to_string(status[1]));
      const auto winner = status[0] == 200 ? picks[0] : picks[1];
      const auto loser = status[0] == 200 ? picks[1] : picks[0];
      auto body = http_get(port, "/sessions/" + id).second;
      check.expect(body.find("\"id\":\"" + winner + "\"") != std::string::npos &&
                       body.find("\"id\":\"" + loser + "\"") == std::string::npos,
                   "final session does not reflect a serial outcome");
    }

    const auto id = create_session(
        port, R"({"seeds":["pc-maps-2004","polycut-2013"],"submitting_authors":["a12"]})");
    http_post(port, "/sessions/" + id + "/selected-papers/qms-2010");
    http_post(port, "/sessions/" + id + "/reviewers/a01");
    for (const auto* suffix : {"", "/candidates", "/roles", "/paper-network",
                               "/researcher-network", "/reviewers/a01/substitutes",
                               "/export?format=json", "/export?format=text"}) {
      const auto path = "/sessions/" + id + suffix;
      before[path] = http_get(port, path);
    }
    before["/sessions"] = http_get(port, "/sessions");
    api.stop();
  }
  {
    ApiService api(index, std::make_shared<DirectorySessionStore>(dir),
                   {"127.0.0.1", 0, ""});
    check.expect(api.load_failures().empty(), "sessions failed to reload");
    const int port = api.start();
    for (const auto& [path, response] : before) {
      check.expect(http_get(port, path) == response, "GET " + path + " changed after restart");
    }
    api.stop();
  }
  fs::remove_all(dir);
}

struct Criterion {
  std::string name;
  std::optional<double> limit_seconds;
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"Formula exactness (200 corpora, |d| <= 1e-12, worked case 1.7)", 10.0,
       formula_exactness},
      {"Candidate-set soundness (thresholds disabled)", 5.0, candidate_soundness},
      {"Reconstruction invariant (1000 op sequences, round trips)", 30.0, reconstruction},
      {"Conflict model (symmetry, monotonicity, unlimited = co-authorship)", std::nullopt,
       conflict_model},
      {"Substitute safety (simulated swaps, oracle equality)", std::nullopt,
       substitute_safety},
      {"Ingestion fixture (9 papers, 11 citations, 14 authors, idempotent)", std::nullopt,
       ingestion_fixture},
      {"Session persistence (round trip, dangling id, golden exports)", std::nullopt,
       session_persistence},
      {"Service (racing ops serialize, restart reproduces GETs)", std::nullopt, service},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = check.ok();
    std::string detail = ok ? "" : check.summary();
    if (c.limit_seconds && secs >= *c.limit_seconds) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("over time limit");
    }
    std::ostringstream time;
    time << std::fixed << std::setprecision(2) << secs << " s";
    if (c.limit_seconds) time << " < " << *c.limit_seconds << " s";
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << " [" << time.str() << "]";
    if (!ok) std::cout << ": " << detail;
    std::cout << "\n";
    failed += ok ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " failed")
            << "\n";
  return failed == 0 ? 0 : 1;
}
