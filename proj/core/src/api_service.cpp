#include "revsel/api_service.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "revsel/error.hpp"
#include "revsel/export.hpp"
#include "revsel/graph_engine.hpp"
#include "revsel/session_io.hpp"

namespace revsel {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::size_t kDefaultSearchLimit = 20;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
    case ErrorCode::kDanglingId:
      return 404;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kAmbiguous:
      return 400;
    case ErrorCode::kIngestError:
    case ErrorCode::kIoError:
      return 500;
    default:
      return 409;
  }
}

ordered_json settings_json(const SessionSettings& s) {
  auto years = [](const std::optional<int>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  return {{"alpha", s.params.alpha},
          {"beta", s.params.beta},
          {"min_selected_papers", s.thresholds.min_selected_papers},
          {"researcher_expiration_years",
           years(s.thresholds.researcher_expiration_years)},
          {"conflict_expiration_years",
           years(s.thresholds.conflict_expiration_years)},
          {"reference_year", s.thresholds.reference_year},
          {"hide_conflicted", s.flags.hide_conflicted},
          {"expand", s.flags.expand},
          {"substitute_cap", s.substitute_cap}};
}

ordered_json author_ref(const CorpusIndex& index, const AuthorId& id) {
  return {{"id", id},
          {"name", index.author_name(id)},
          {"dblp_url", dblp_author_url(index.author_name(id))}};
}

ordered_json session_json(const Session& s, const CorpusIndex& index) {
  ordered_json submitters = ordered_json::array();
  for (const auto& id : s.submitting_authors) {
    submitters.push_back(author_ref(index, id));
  }
  ordered_json reviewers = ordered_json::array();
  for (const auto& id : s.selected_reviewers) {
    reviewers.push_back(author_ref(index, id));
  }
  return {{"session_id", s.session_id},
          {"seeds", s.network.seeds},
          {"selected_papers", s.network.selected},
          {"visible_papers", s.network.visible},
          {"submitting_authors", std::move(submitters)},
          {"reviewers", std::move(reviewers)},
          {"settings", settings_json(s.settings)}};
}

ordered_json candidate_json(const ReviewerCandidate& c) {
  ordered_json career = ordered_json::array();
  for (const auto& e : c.career) {
    career.push_back({{"year", e.year}, {"paper", e.paper}});
  }
  return {{"author_id", c.author_id},
          {"name", c.name},
          {"relevance", c.relevance},
          {"selected_papers", c.selected_paper_ids},
          {"visible_papers", c.visible_paper_ids},
          {"last_active_year", c.last_active_year},
          {"career", std::move(career)},
          {"dblp_url", dblp_author_url(c.name)}};
}

ordered_json edge_json(const ResearcherEdge& e) {
  return {{"a", e.a},
          {"b", e.b},
          {"common_total", e.common_total},
          {"common_visible", e.common_visible},
          {"includes_selected", e.includes_selected},
          {"last_common_year", e.last_common_year}};
}

ordered_json paper_json(const CorpusIndex& index, const PaperId& id) {
  const auto& p = index.paper(id);
  ordered_json authors = ordered_json::array();
  for (const auto& a : p.authors) authors.push_back({{"id", a.id}, {"name", a.name}});
  return {{"id", p.id},
          {"title", p.title},
          {"year", p.year},
          {"venue", p.venue},
          {"authors", std::move(authors)},
          {"citation_count", index.citation_count(id)},
          {"in_citations", index.in_citations(id)},
          {"out_citations", index.out_citations(id)},
          {"dblp_url", dblp_paper_url(p.title)}};
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    auto body = json::parse(req.body);
    if (!body.is_object()) {
      throw Error(ErrorCode::kSchemaViolation, "request body must be an object");
    }
    return body;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("request body is not JSON: ") + e.what());
  }
}

std::vector<std::string> id_list(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end()) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("missing '") + key + "'");
  }
  if (!it->is_array()) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("'") + key + "' must be an array");
  }
  std::vector<std::string> ids;
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw Error(ErrorCode::kSchemaViolation,
                  std::string("'") + key + "' must hold strings");
    }
    ids.push_back(v.get<std::string>());
  }
  return ids;
}

SessionSettings apply_settings(SessionSettings s, const json& body) {
  auto number = [&](const char* key, auto& target) {
    if (auto it = body.find(key); it != body.end()) {
      if (!it->is_number()) {
        throw Error(ErrorCode::kSchemaViolation,
                    std::string("'") + key + "' must be a number");
      }
      target = it->get<std::decay_t<decltype(target)>>();
    }
  };
  auto years = [&](const char* key, std::optional<int>& target) {
    if (auto it = body.find(key); it != body.end()) {
      if (it->is_null()) {
        target.reset();
      } else if (it->is_number_integer()) {
        target = it->get<int>();
      } else {
        throw Error(ErrorCode::kSchemaViolation,
                    std::string("'") + key + "' must be an integer or null");
      }
    }
  };
  auto flag = [&](const char* key, bool& target) {
    if (auto it = body.find(key); it != body.end()) {
      if (!it->is_boolean()) {
        throw Error(ErrorCode::kSchemaViolation,
                    std::string("'") + key + "' must be a boolean");
      }
      target = it->get<bool>();
    }
  };
  number("alpha", s.params.alpha);
  number("beta", s.params.beta);
  number("min_selected_papers", s.thresholds.min_selected_papers);
  years("researcher_expiration_years", s.thresholds.researcher_expiration_years);
  years("conflict_expiration_years", s.thresholds.conflict_expiration_years);
  number("reference_year", s.thresholds.reference_year);
  flag("hide_conflicted", s.flags.hide_conflicted);
  flag("expand", s.flags.expand);
  if (auto it = body.find("substitute_cap"); it != body.end()) {
    if (!it->is_number_unsigned()) {
      throw Error(ErrorCode::kSchemaViolation,
                  "'substitute_cap' must be a non-negative integer");
    }
    s.substitute_cap = it->get<std::size_t>();
  }
  return s;
}

std::size_t limit_param(const httplib::Request& req) {
  if (!req.has_param("limit")) return kDefaultSearchLimit;
  try {
    long long v = std::stoll(req.get_param_value("limit"));
    if (v < 0) throw std::out_of_range("negative");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "'limit' must be a non-negative integer");
  }
}

}  // namespace

// ---- stores ---------------------------------------------------------------

void MemorySessionStore::put(const std::string& session_id,
                             const std::string& blob) {
  std::lock_guard lock(mutex_);
  blobs_[session_id] = blob;
}

void MemorySessionStore::remove(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  blobs_.erase(session_id);
}

std::map<std::string, std::string> MemorySessionStore::load_all() const {
  std::lock_guard lock(mutex_);
  return blobs_;
}

DirectorySessionStore::DirectorySessionStore(std::filesystem::path dir)
    : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw Error(ErrorCode::kIoError,
                "cannot use session directory " + dir_.string(), dir_.string());
  }
}

void DirectorySessionStore::put(const std::string& session_id,
                                const std::string& blob) {
  const auto target = dir_ / (session_id + ".json");
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << blob;
    if (!out) {
      throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot write " + target.string());
}

void DirectorySessionStore::remove(const std::string& session_id) {
  std::error_code ec;
  std::filesystem::remove(dir_ / (session_id + ".json"), ec);
}

std::map<std::string, std::string> DirectorySessionStore::load_all() const {
  std::map<std::string, std::string> blobs;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") {
      continue;
    }
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    blobs[entry.path().stem().string()] = text.str();
  }
  return blobs;
}

// ---- service ----------------------------------------------------------------

struct ApiService::Impl {
  struct Slot {
    std::mutex mutex;
    Session session;
    bool deleted = false;
  };

  std::shared_ptr<const CorpusIndex> index;
  std::shared_ptr<SessionStore> store;
  ServiceConfig config;
  httplib::Server server;
  std::thread worker;
  int bound_port = -1;
  std::vector<std::string> load_failures;

  std::shared_mutex registry_mutex;
  std::map<std::string, std::shared_ptr<Slot>> sessions;

  std::mutex id_mutex;
  std::mt19937_64 id_rng{std::random_device{}()};

  Impl(std::shared_ptr<const CorpusIndex> idx, std::shared_ptr<SessionStore> st,
       ServiceConfig cfg)
      : index(std::move(idx)), store(std::move(st)), config(std::move(cfg)) {
    for (const auto& [id, blob] : store->load_all()) {
      try {
        auto slot = std::make_shared<Slot>();
        slot->session = load_session(blob, *index);
        if (slot->session.session_id != id) {
          throw Error(ErrorCode::kSchemaViolation, "session id mismatch");
        }
        sessions.emplace(id, std::move(slot));
      } catch (const std::exception& e) {
        load_failures.push_back(id + ": " + e.what());
      }
    }
    routes();
  }

  std::string new_id() {
    std::lock_guard lock(id_mutex);
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << id_rng();
    return out.str();
  }

  std::shared_ptr<Slot> find_slot(const std::string& id) {
    std::shared_lock lock(registry_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) {
      throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'", id);
    }
    return it->second;
  }

  Session snapshot(const std::string& id) {
    auto slot = find_slot(id);
    std::lock_guard lock(slot->mutex);
    if (slot->deleted) {
      throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'", id);
    }
    return slot->session;
  }

  // Applies `op` under the session's lock; the stored session changes only
  // when `op` returns normally and the store accepts the result.
  Session mutate(const std::string& id,
                 const std::function<Session(const Session&)>& op) {
    auto slot = find_slot(id);
    std::lock_guard lock(slot->mutex);
    if (slot->deleted) {
      throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'", id);
    }
    Session next = op(slot->session);
    store->put(id, save_session(next));
    slot->session = next;
    return next;
  }

  void reply(httplib::Response& res, int status, const ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void reply_error(httplib::Response& res, const Error& e) {
    ordered_json details = ordered_json::object();
    if (!e.subject().empty()) details["subject"] = e.subject();
    if (!e.conflicts().empty()) {
      ordered_json pairs = ordered_json::array();
      for (const auto& p : e.conflicts()) {
        ordered_json pair = {{"first", p.first}, {"second", p.second}};
        if (index->has_author(p.first)) {
          pair["first_name"] = index->author_name(p.first);
        }
        if (index->has_author(p.second)) {
          pair["second_name"] = index->author_name(p.second);
        }
        pairs.push_back(std::move(pair));
      }
      details["conflicts"] = std::move(pairs);
    }
    ordered_json body = {{"error",
                          {{"code", error_code_name(e.code())},
                           {"message", e.what()},
                           {"details", std::move(details)}}}};
    reply(res, http_status(e.code()), body);
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  httplib::Server::Handler guarded(Handler handler) {
    return [this, handler = std::move(handler)](const httplib::Request& req,
                                                 httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        reply_error(res, e);
      } catch (const std::exception& e) {
        reply(res, 500,
              {{"error",
                {{"code", "internal"},
                 {"message", e.what()},
                 {"details", ordered_json::object()}}}});
      }
    };
  }

  ordered_json candidates_json(const Session& s) {
    ordered_json out = ordered_json::array();
    for (const auto& c : session_candidates(s, *index)) {
      auto item = candidate_json(c.candidate);
      item["role"] = role_name(c.role);
      item["conflicted"] = c.conflicted;
      out.push_back(std::move(item));
    }
    return {{"candidates", std::move(out)}};
  }

  ordered_json paper_network_json(const Session& s) {
    auto view = paper_network_view(s.network, *index);
    ordered_json nodes = ordered_json::array();
    std::size_t lo = 0, hi = 0;
    bool first = true;
    for (const auto& n : view.nodes) {
      const auto& p = index->paper(n.id);
      std::vector<std::string> authors;
      for (const auto& a : p.authors) authors.push_back(a.id);
      const bool seed = std::find(s.network.seeds.begin(), s.network.seeds.end(),
                                  n.id) != s.network.seeds.end();
      nodes.push_back({{"id", n.id},
                       {"title", p.title},
                       {"year", n.year},
                       {"venue", p.venue},
                       {"citation_count", n.citation_count},
                       {"selected", n.selected},
                       {"seed", seed},
                       {"authors", authors},
                       {"dblp_url", dblp_paper_url(p.title)}});
      lo = first ? n.citation_count : std::min(lo, n.citation_count);
      hi = first ? n.citation_count : std::max(hi, n.citation_count);
      first = false;
    }
    ordered_json arcs = ordered_json::array();
    for (const auto& a : view.arcs) arcs.push_back({{"from", a.from}, {"to", a.to}});
    return {{"nodes", std::move(nodes)},
            {"arcs", std::move(arcs)},
            {"citation_range", {{"min", lo}, {"max", hi}}}};
  }

  ordered_json researcher_network_json(const Session& s) {
    auto net = session_researcher_network(s, *index);
    ordered_json nodes = ordered_json::array();
    for (const auto& n : net.nodes) {
      ordered_json node = {{"author_id", n.node.author_id},
                           {"name", n.node.name},
                           {"role", role_name(n.role)},
                           {"conflicted", is_conflicted(n.role)},
                           {"kind", n.node.candidate ? "candidate" : "collaborator"}};
      if (n.node.candidate) node["relevance"] = n.node.candidate->relevance;
      nodes.push_back(std::move(node));
    }
    ordered_json edges = ordered_json::array();
    for (const auto& e : net.edges) edges.push_back(edge_json(e));
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  }

  void routes() {
    auto& srv = server;
    if (!config.cors_origin.empty()) {
      srv.set_default_headers(
          {{"Access-Control-Allow-Origin", config.cors_origin},
           {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"},
           {"Access-Control-Allow-Headers", "Content-Type"}});
      srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
      });
    }

    srv.Get("/health", guarded([this](const auto&, auto& res) {
      reply(res, 200,
            {{"status", "ok"},
             {"papers", index->papers().size()},
             {"authors", index->author_names().size()},
             {"citations", index->citation_edge_count()}});
    }));

    srv.Get("/papers/search", guarded([this](const auto& req, auto& res) {
      std::optional<Session> s;
      if (req.has_param("session")) s = snapshot(req.get_param_value("session"));
      auto matches = index->search_titles(req.get_param_value("q"),
                                          limit_param(req),
                                          s ? &s->network.visible : nullptr);
      ordered_json out = ordered_json::array();
      for (const auto& m : matches) {
        out.push_back({{"id", m.id},
                       {"title", m.title},
                       {"year", m.year},
                       {"already_in_network", m.already_in_network}});
      }
      reply(res, 200, {{"results", std::move(out)}});
    }));

    srv.Get(R"(/papers/([^/]+))", guarded([this](const auto& req, auto& res) {
      reply(res, 200, paper_json(*index, req.matches[1]));
    }));

    srv.Get("/authors/search", guarded([this](const auto& req, auto& res) {
      ordered_json out = ordered_json::array();
      for (const auto& m : index->search_authors(req.get_param_value("q"),
                                                 limit_param(req))) {
        out.push_back({{"id", m.id},
                       {"name", m.name},
                       {"papers", m.papers},
                       {"last_active_year", m.last_active_year}});
      }
      reply(res, 200, {{"results", std::move(out)}});
    }));

    srv.Get(R"(/authors/([^/]+))", guarded([this](const auto& req, auto& res) {
      const std::string id = req.matches[1];
      auto who = describe_researcher(id, PaperNetworkState{}, *index,
                                     RelevanceParams{});
      auto body = candidate_json(who);
      body.erase("relevance");
      body.erase("selected_papers");
      body.erase("visible_papers");
      reply(res, 200, body);
    }));

    srv.Get("/sessions", guarded([this](const auto&, auto& res) {
      std::shared_lock lock(registry_mutex);
      std::vector<std::string> ids;
      for (const auto& [id, slot] : sessions) ids.push_back(id);
      reply(res, 200, {{"sessions", ids}});
    }));

    srv.Post("/sessions", guarded([this](const auto& req, auto& res) {
      auto body = parse_body(req);
      Session s = new_session(*index, new_id());
      if (auto it = body.find("settings"); it != body.end()) {
        if (!it->is_object()) {
          throw Error(ErrorCode::kSchemaViolation, "'settings' must be an object");
        }
        s = update_settings(s, *index, apply_settings(s.settings, *it));
      }
      if (body.contains("submitting_authors")) {
        auto ids = id_list(body, "submitting_authors");
        s = set_submitting_authors(s, *index, {ids.begin(), ids.end()});
      }
      if (body.contains("seeds")) {
        auto ids = id_list(body, "seeds");
        s = with_network(s, *index, add_seeds(s.network, *index, ids));
      }
      store->put(s.session_id, save_session(s));
      {
        std::unique_lock lock(registry_mutex);
        auto slot = std::make_shared<Slot>();
        slot->session = s;
        sessions.emplace(s.session_id, std::move(slot));
      }
      res.set_header("Location", "/sessions/" + s.session_id);
      reply(res, 201, session_json(s, *index));
    }));

    srv.Get(R"(/sessions/([^/]+))", guarded([this](const auto& req, auto& res) {
      reply(res, 200, session_json(snapshot(req.matches[1]), *index));
    }));

    srv.Delete(R"(/sessions/([^/]+))", guarded([this](const auto& req, auto& res) {
      const std::string id = req.matches[1];
      auto slot = find_slot(id);
      {
        std::lock_guard slot_lock(slot->mutex);
        if (slot->deleted) {
          throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'", id);
        }
        slot->deleted = true;
        store->remove(id);
      }
      std::unique_lock lock(registry_mutex);
      sessions.erase(id);
      res.status = 204;
    }));

    srv.Post(R"(/sessions/([^/]+)/seeds)", guarded([this](const auto& req, auto& res) {
      auto ids = id_list(parse_body(req), "ids");
      auto s = mutate(req.matches[1], [&](const Session& cur) {
        return with_network(cur, *index, add_seeds(cur.network, *index, ids));
      });
      reply(res, 200, session_json(s, *index));
    }));

    srv.Delete(R"(/sessions/([^/]+)/seeds/([^/]+))",
               guarded([this](const auto& req, auto& res) {
                 const std::string pid = req.matches[2];
                 auto s = mutate(req.matches[1], [&](const Session& cur) {
                   return with_network(cur, *index,
                                       remove_seed(cur.network, *index, pid));
                 });
                 reply(res, 200, session_json(s, *index));
               }));

    srv.Post(R"(/sessions/([^/]+)/selected-papers/([^/]+))",
             guarded([this](const auto& req, auto& res) {
               const std::string pid = req.matches[2];
               auto s = mutate(req.matches[1], [&](const Session& cur) {
                 return with_network(cur, *index,
                                     select_paper(cur.network, *index, pid));
               });
               reply(res, 200, session_json(s, *index));
             }));

    srv.Delete(R"(/sessions/([^/]+)/selected-papers/([^/]+))",
               guarded([this](const auto& req, auto& res) {
                 const std::string pid = req.matches[2];
                 auto s = mutate(req.matches[1], [&](const Session& cur) {
                   return with_network(cur, *index,
                                       deselect_paper(cur.network, *index, pid));
                 });
                 reply(res, 200, session_json(s, *index));
               }));

    srv.Put(R"(/sessions/([^/]+)/submitting-authors)",
            guarded([this](const auto& req, auto& res) {
              auto ids = id_list(parse_body(req), "ids");
              auto s = mutate(req.matches[1], [&](const Session& cur) {
                return set_submitting_authors(cur, *index, {ids.begin(), ids.end()});
              });
              reply(res, 200, session_json(s, *index));
            }));

    srv.Put(R"(/sessions/([^/]+)/settings)", guarded([this](const auto& req, auto& res) {
      auto body = parse_body(req);
      auto s = mutate(req.matches[1], [&](const Session& cur) {
        return update_settings(cur, *index, apply_settings(cur.settings, body));
      });
      reply(res, 200, session_json(s, *index));
    }));

    srv.Post(R"(/sessions/([^/]+)/reviewers/([^/]+)/swap)",
             guarded([this](const auto& req, auto& res) {
               auto body = parse_body(req);
               auto it = body.find("substitute");
               if (it == body.end() || !it->is_string()) {
                 throw Error(ErrorCode::kSchemaViolation,
                             "'substitute' must be an author id");
               }
               const std::string rid = req.matches[2];
               const std::string sub = it->template get<std::string>();
               auto s = mutate(req.matches[1], [&](const Session& cur) {
                 return swap_reviewer(cur, *index, rid, sub);
               });
               reply(res, 200, session_json(s, *index));
             }));

    srv.Get(R"(/sessions/([^/]+)/reviewers/([^/]+)/substitutes)",
            guarded([this](const auto& req, auto& res) {
              auto list = substitutes(snapshot(req.matches[1]), *index,
                                      req.matches[2]);
              ordered_json entries = ordered_json::array();
              for (const auto& e : list.entries) {
                entries.push_back({{"author_id", e.author_id},
                                   {"name", e.name},
                                   {"common_papers", e.common_papers_with_reviewer},
                                   {"relevance", e.relevance}});
              }
              reply(res, 200,
                    {{"for_reviewer", list.for_reviewer},
                     {"entries", std::move(entries)}});
            }));

    srv.Post(R"(/sessions/([^/]+)/reviewers/([^/]+))",
             guarded([this](const auto& req, auto& res) {
               const std::string rid = req.matches[2];
               auto s = mutate(req.matches[1], [&](const Session& cur) {
                 return select_reviewer(cur, *index, rid);
               });
               reply(res, 200, session_json(s, *index));
             }));

    srv.Delete(R"(/sessions/([^/]+)/reviewers/([^/]+))",
               guarded([this](const auto& req, auto& res) {
                 const std::string rid = req.matches[2];
                 auto s = mutate(req.matches[1], [&](const Session& cur) {
                   return remove_reviewer(cur, rid);
                 });
                 reply(res, 200, session_json(s, *index));
               }));

    srv.Get(R"(/sessions/([^/]+)/candidates)", guarded([this](const auto& req, auto& res) {
      reply(res, 200, candidates_json(snapshot(req.matches[1])));
    }));

    srv.Get(R"(/sessions/([^/]+)/roles)", guarded([this](const auto& req, auto& res) {
      ordered_json roles = ordered_json::object();
      for (const auto& [id, role] : role_map(snapshot(req.matches[1]), *index)) {
        roles[id] = role_name(role);
      }
      reply(res, 200, {{"roles", std::move(roles)}});
    }));

    srv.Get(R"(/sessions/([^/]+)/paper-network)",
            guarded([this](const auto& req, auto& res) {
              reply(res, 200, paper_network_json(snapshot(req.matches[1])));
            }));

    srv.Get(R"(/sessions/([^/]+)/researcher-network)",
            guarded([this](const auto& req, auto& res) {
              reply(res, 200, researcher_network_json(snapshot(req.matches[1])));
            }));

    srv.Get(R"(/sessions/([^/]+)/export)", guarded([this](const auto& req, auto& res) {
      const std::string format =
          req.has_param("format") ? req.get_param_value("format") : "json";
      if (format != "json" && format != "text") {
        throw Error(ErrorCode::kInvalidArgument,
                    "format must be 'json' or 'text'");
      }
      auto doc = export_reviewer_list(snapshot(req.matches[1]), *index);
      res.status = 200;
      if (format == "json") {
        res.set_content(render_export_json(doc), "application/json");
      } else {
        res.set_content(render_export_text(doc), "text/plain; charset=utf-8");
      }
    }));
  }
};

ApiService::ApiService(std::shared_ptr<const CorpusIndex> index,
                       std::shared_ptr<SessionStore> store,
                       ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(index), std::move(store),
                                   std::move(config))) {}

ApiService::~ApiService() { stop(); }

int ApiService::bind() {
  auto& cfg = impl_->config;
  int port = -1;
  if (cfg.port == 0) {
    port = impl_->server.bind_to_any_port(cfg.host);
  } else if (impl_->server.bind_to_port(cfg.host, cfg.port)) {
    port = cfg.port;
  }
  if (port <= 0) {
    throw Error(ErrorCode::kIoError,
                "cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  }
  impl_->bound_port = port;
  return port;
}

void ApiService::serve() { impl_->server.listen_after_bind(); }

int ApiService::start() {
  const int port = bind();
  impl_->worker = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
  return port;
}

void ApiService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

int ApiService::port() const { return impl_->bound_port; }

const std::vector<std::string>& ApiService::load_failures() const {
  return impl_->load_failures;
}

}  // namespace revsel
