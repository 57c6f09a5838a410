// revsel: ingest a citation corpus, run the headless reviewer finder, or
// serve the HTTP API.
//
// Exit codes: 0 ok, 1 domain error, 2 usage or configuration error.

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "revsel/api_service.hpp"
#include "revsel/corpus.hpp"
#include "revsel/error.hpp"
#include "revsel/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputOptions {
  std::string corpus;
  std::string snapshot;
  std::string filter_config;
  std::vector<std::string> venues;
  std::optional<int> year_min;
  std::optional<int> year_max;
  std::vector<std::string> patterns;
};

void add_input_options(CLI::App* cmd, InputOptions& in, bool allow_snapshot) {
  cmd->add_option("--corpus", in.corpus, "NDJSON corpus file")
      ->envname("REVSEL_CORPUS");
  if (allow_snapshot) {
    cmd->add_option("--snapshot", in.snapshot, "Snapshot written by `ingest`")
        ->envname("REVSEL_SNAPSHOT");
  }
  cmd->add_option("--filter-config", in.filter_config,
                  "JSON file with venues, year range and cleaning patterns");
  cmd->add_option("--venue", in.venues, "Admit only these venues (repeatable)");
  cmd->add_option("--year-min", in.year_min, "Earliest publication year");
  cmd->add_option("--year-max", in.year_max, "Latest publication year");
  cmd->add_option("--front-matter-pattern", in.patterns,
                  "Title pattern marking non-papers (repeatable; replaces defaults)");
}

revsel::IngestFilter make_filter(const InputOptions& in) {
  revsel::IngestFilter filter;
  if (!in.filter_config.empty()) {
    filter = revsel::load_filter_file(in.filter_config);
  }
  if (!in.venues.empty()) {
    filter.venue_allowlist = {in.venues.begin(), in.venues.end()};
  }
  if (in.year_min) filter.year_min = *in.year_min;
  if (in.year_max) filter.year_max = *in.year_max;
  if (!in.patterns.empty()) filter.cleaning.front_matter_patterns = in.patterns;
  try {
    filter.validate();
  } catch (const revsel::Error& e) {
    throw UsageError(e.what());
  }
  return filter;
}

std::shared_ptr<const revsel::CorpusIndex> load_index(const InputOptions& in) {
  if (in.corpus.empty() == in.snapshot.empty()) {
    throw UsageError("exactly one of --corpus or --snapshot is required");
  }
  const std::string& path = in.corpus.empty() ? in.snapshot : in.corpus;
  if (!std::filesystem::exists(path)) {
    throw UsageError("input file not found: " + path);
  }
  if (!in.snapshot.empty()) {
    return std::make_shared<revsel::CorpusIndex>(
        revsel::load_snapshot_file(in.snapshot));
  }
  auto result = revsel::ingest_corpus_file(in.corpus, make_filter(in));
  return std::make_shared<revsel::CorpusIndex>(std::move(result.index));
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw revsel::Error(revsel::ErrorCode::kIoError, "cannot write " + path, path);
  }
}

std::string stats_text(const revsel::IngestStats& s) {
  std::ostringstream out;
  out << s.papers << " papers, " << s.citations << " citations, " << s.authors
      << " authors\n";
  out << "records read:          " << s.lines_read << "\n";
  out << "malformed records:     " << s.malformed << "\n";
  out << "duplicate ids:         " << s.duplicates << "\n";
  out << "missing year:          " << s.dropped_missing_year << "\n";
  out << "outside venue/years:   " << s.dropped_by_filter << "\n";
  out << "non-papers removed:    " << s.dropped_non_papers << "\n";
  out << "citations dropped:     " << s.citations_dropped << "\n";
  return out.str();
}

std::string stats_json(const revsel::IngestStats& s) {
  nlohmann::ordered_json doc = {{"papers", s.papers},
                                {"citations", s.citations},
                                {"authors", s.authors},
                                {"records_read", s.lines_read},
                                {"malformed", s.malformed},
                                {"duplicates", s.duplicates},
                                {"dropped_missing_year", s.dropped_missing_year},
                                {"dropped_by_filter", s.dropped_by_filter},
                                {"dropped_non_papers", s.dropped_non_papers},
                                {"citations_dropped", s.citations_dropped}};
  return doc.dump(2) + "\n";
}

int run_ingest(const InputOptions& in, const std::string& snapshot_out,
               const std::string& format, const std::string& output) {
  if (in.corpus.empty()) throw UsageError("--corpus is required");
  if (!std::filesystem::exists(in.corpus)) {
    throw UsageError("input file not found: " + in.corpus);
  }
  auto result = revsel::ingest_corpus_file(in.corpus, make_filter(in));
  if (!snapshot_out.empty()) {
    std::ofstream out(snapshot_out, std::ios::binary);
    revsel::save_snapshot(result.index, out);
    if (!out) {
      throw revsel::Error(revsel::ErrorCode::kIoError,
                          "cannot write " + snapshot_out, snapshot_out);
    }
  }
  write_output(format == "json" ? stats_json(result.stats)
                                : stats_text(result.stats),
               output);
  return kExitOk;
}

struct FindOptions {
  std::vector<std::string> seeds;
  std::vector<std::string> authors;
  std::size_t k = 3;
  double alpha = 0.7;
  double beta = 0.3;
  int min_selected = 1;
  std::optional<int> researcher_expiration;
  std::optional<int> conflict_expiration;
  std::optional<int> reference_year;
  bool expand = false;
  std::size_t substitute_cap = 5;
};

int run_find(const InputOptions& in, const FindOptions& opt,
             const std::string& format, const std::string& output) {
  auto index = load_index(in);
  revsel::FindRequest request;
  request.seeds = opt.seeds;
  request.submitting_authors = opt.authors;
  request.reviewers_wanted = opt.k;
  auto& s = request.settings;
  s.params = {opt.alpha, opt.beta};
  s.thresholds = revsel::Thresholds::defaults_for(*index);
  s.thresholds.min_selected_papers = opt.min_selected;
  s.thresholds.researcher_expiration_years = opt.researcher_expiration;
  s.thresholds.conflict_expiration_years = opt.conflict_expiration;
  if (opt.reference_year) s.thresholds.reference_year = *opt.reference_year;
  s.flags.expand = opt.expand;
  s.substitute_cap = opt.substitute_cap;
  try {
    s.params.validate();
    s.thresholds.validate();
  } catch (const revsel::Error& e) {
    throw UsageError(e.what());
  }
  auto report = revsel::run_find(*index, request);
  write_output(format == "json" ? revsel::render_find_json(report)
                                : revsel::render_find_text(report),
               output);
  return kExitOk;
}

int run_serve(const InputOptions& in, revsel::ServiceConfig config,
              const std::string& session_dir) {
  auto index = load_index(in);
  std::shared_ptr<revsel::SessionStore> store;
  if (session_dir.empty()) {
    store = std::make_shared<revsel::MemorySessionStore>();
  } else {
    store = std::make_shared<revsel::DirectorySessionStore>(session_dir);
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  revsel::ApiService service(index, store, config);
  for (const auto& failure : service.load_failures()) {
    std::cerr << "warning: session not restored: " << failure << "\n";
  }
  const int port = service.bind();
  std::cout << "listening on http://" << config.host << ":" << port << "\n"
            << std::flush;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.serve();
  // serve() can also return on its own; wake the waiter so it can exit.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reviewer selection over a citation corpus"};
  app.require_subcommand(1);

  InputOptions input;
  std::string format = "text";
  std::string output;

  auto* ingest = app.add_subcommand("ingest", "Parse, clean and index a corpus");
  add_input_options(ingest, input, false);
  std::string snapshot_out;
  ingest->add_option("--snapshot-out", snapshot_out, "Write an index snapshot");
  ingest->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
  ingest->add_option("-o,--output", output, "Stats destination (default stdout)");

  auto* find = app.add_subcommand("find", "Rank and pick reviewers from seed papers");
  add_input_options(find, input, true);
  FindOptions fopt;
  find->add_option("--seed", fopt.seeds, "Seed paper id or exact title")->required();
  find->add_option("--author", fopt.authors,
                   "Submitting author id or exact name (repeatable)");
  find->add_option("-k,--reviewers", fopt.k, "Reviewers to pick greedily");
  find->add_option("--alpha", fopt.alpha, "Weight of selected papers");
  find->add_option("--beta", fopt.beta, "Weight of other visible papers");
  find->add_option("--min-selected", fopt.min_selected, "Productivity threshold");
  find->add_option("--researcher-expiration", fopt.researcher_expiration,
                   "Max years since a researcher's last paper");
  find->add_option("--conflict-expiration", fopt.conflict_expiration,
                   "Max years since a shared paper for it to conflict");
  find->add_option("--reference-year", fopt.reference_year,
                   "Year treated as now (default: latest year in corpus)");
  find->add_flag("--expand", fopt.expand, "Rank authors of all visible papers");
  find->add_option("--substitutes", fopt.substitute_cap, "Substitutes per reviewer");
  find->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
  find->add_option("-o,--output", output, "Output file (default stdout)");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  add_input_options(serve, input, true);
  revsel::ServiceConfig config;
  std::string session_dir = "sessions";
  serve->add_option("--host", config.host)->envname("REVSEL_HOST");
  serve->add_option("--port", config.port, "0 picks an ephemeral port")
      ->envname("REVSEL_PORT");
  serve->add_option("--session-dir", session_dir,
                    "Session directory; empty keeps sessions in memory")
      ->envname("REVSEL_SESSION_DIR");
  serve->add_option("--cors-origin", config.cors_origin)
      ->envname("REVSEL_CORS_ORIGIN");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ingest) return run_ingest(input, snapshot_out, format, output);
    if (*find) return run_find(input, fopt, format, output);
    if (*serve) return run_serve(input, config, session_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const revsel::Error& e) {
    std::cerr << "error [" << revsel::error_code_name(e.code()) << "]: "
              << e.what() << "\n";
    return e.code() == revsel::ErrorCode::kIoError ? kExitUsage : kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
