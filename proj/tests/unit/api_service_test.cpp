#include "revsel/api_service.hpp"

#include <gtest/gtest.h>

#include <barrier>
#include <filesystem>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "oracle.hpp"

namespace revsel {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Reply {
  int status = 0;
  json body;
};

class Client {
 public:
  explicit Client(int port) : http_("127.0.0.1", port) {}

  Reply get(const std::string& path) { return wrap(http_.Get(path)); }
  Reply del(const std::string& path) { return wrap(http_.Delete(path)); }
  Reply post(const std::string& path, const json& body = json::object()) {
    return wrap(http_.Post(path, body.dump(), "application/json"));
  }
  Reply put(const std::string& path, const json& body) {
    return wrap(http_.Put(path, body.dump(), "application/json"));
  }
  std::string raw(const std::string& path) {
    auto res = http_.Get(path);
    return res ? std::to_string(res->status) + "\n" + res->body : "no response";
  }

 private:
  static Reply wrap(const httplib::Result& res) {
    if (!res) return {-1, nullptr};
    Reply r{res->status, nullptr};
    if (!res->body.empty()) r.body = json::parse(res->body);
    return r;
  }

  httplib::Client http_;
};

class Service {
 public:
  Service(std::shared_ptr<const CorpusIndex> index, std::shared_ptr<SessionStore> store)
      : api_(std::move(index), std::move(store), ServiceConfig{"127.0.0.1", 0, ""}) {
    port_ = api_.start();
  }
  ~Service() { api_.stop(); }

  Client client() const { return Client(port_); }
  const std::vector<std::string>& load_failures() const { return api_.load_failures(); }

 private:
  ApiService api_;
  int port_ = 0;
};

std::shared_ptr<const CorpusIndex> fixture_index() {
  return std::make_shared<CorpusIndex>(testing::load_fixture().index);
}

std::string create_session(Client& c, const json& body = json::object()) {
  auto r = c.post("/sessions", body);
  EXPECT_EQ(r.status, 201) << r.body.dump();
  return r.body["session_id"].get<std::string>();
}

TEST(Api, Health) {
  Service svc(fixture_index(), std::make_shared<MemorySessionStore>());
  auto c = svc.client();
  auto r = c.get("/health");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["status"], "ok");
  EXPECT_EQ(r.body["papers"], 9);
  EXPECT_EQ(r.body["authors"], 14);
  EXPECT_EQ(r.body["citations"], 11);
}

TEST(Api, CreateThenGetSameSession) {
  Service svc(fixture_index(), std::make_shared<MemorySessionStore>());
  auto c = svc.client();
  auto created = c.post("/sessions", {{"seeds", {"pc-maps-2004", "qms-2010"}},
                                      {"submitting_authors", {"a12"}}});
  ASSERT_EQ(created.status, 201);
  const auto id = created.body["session_id"].get<std::string>();
  auto fetched = c.get("/sessions/" + id);
  EXPECT_EQ(fetched.status, 200);
  EXPECT_EQ(fetched.body, created.body);
  EXPECT_EQ(fetched.body["seeds"], json({"pc-maps-2004", "qms-2010"}));
  EXPECT_EQ(c.get("/sessions").body["sessions"], json({id}));
}

TEST(Api, SessionWorkflow) {
  Service svc(fixture_index(), std::make_shared<MemorySessionStore>());
  auto c = svc.client();
  const auto id = create_session(c, {{"seeds", {"pc-maps-2004"}}});
  const auto base = "/sessions/" + id;

  EXPECT_EQ(c.post(base + "/selected-papers/qms-2010").status, 200);
  auto cands = c.get(base + "/candidates");
  ASSERT_EQ(cands.status, 200);
  EXPECT_EQ(cands.body["candidates"][0]["author_id"], "a01");
  EXPECT_EQ(cands.body["candidates"][0]["relevance"].get<double>(), 1.7);

  auto sel = c.post(base + "/reviewers/a01");
  EXPECT_EQ(sel.status, 200);
  EXPECT_EQ(sel.body["reviewers"][0]["id"], "a01");

  auto roles = c.get(base + "/roles");
  EXPECT_EQ(roles.body["roles"]["a13"], "reviewer_coauthor");

  auto again = c.post(base + "/reviewers/a03");
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(again.body["error"]["code"], "conflict_with_reviewers");
  EXPECT_EQ(again.body["error"]["details"]["conflicts"][0]["second_name"], "Marco Tarini");

  auto subs = c.get(base + "/reviewers/a01/substitutes");
  EXPECT_EQ(subs.status, 200);
  EXPECT_EQ(subs.body["entries"][0]["author_id"], "a03");

  auto swapped = c.post(base + "/reviewers/a01/swap", {{"substitute", "a03"}});
  EXPECT_EQ(swapped.status, 200);
  EXPECT_EQ(swapped.body["reviewers"][0]["id"], "a03");

  auto text = c.raw(base + "/export?format=text");
  EXPECT_NE(text.find("Paolo Cignoni"), std::string::npos);
  EXPECT_EQ(c.get(base + "/export").body["reviewers"][0]["author_id"], "a03");

  auto settings = c.put(base + "/settings", {{"conflict_expiration_years", 5}});
  EXPECT_EQ(settings.status, 200);
  EXPECT_EQ(settings.body["settings"]["conflict_expiration_years"], 5);
  EXPECT_EQ(c.put(base + "/settings", {{"alpha", "x"}}).status, 400);

  auto pn = c.get(base + "/paper-network");
  EXPECT_EQ(pn.status, 200);
  EXPECT_EQ(pn.body["citation_range"]["max"], 5);
  EXPECT_EQ(c.get(base + "/researcher-network").status, 200);

  EXPECT_EQ(c.del(base + "/reviewers/a03").status, 200);
  EXPECT_EQ(c.del(base + "/reviewers/a03").status, 409);
  EXPECT_EQ(c.get(base + "/export").body["error"]["code"], "empty_selection");
  EXPECT_EQ(c.del(base).status, 204);
  EXPECT_EQ(c.get(base).status, 404);
}

TEST(Api, ErrorStatuses) {
  Service svc(fixture_index(), std::make_shared<MemorySessionStore>());
  auto c = svc.client();
  EXPECT_EQ(c.get("/sessions/nope").status, 404);
  EXPECT_EQ(c.get("/papers/nope").status, 404);
  EXPECT_EQ(c.get("/papers/search?q=").status, 400);
  auto hits = c.get("/papers/search?q=polycube&limit=2");
  EXPECT_EQ(hits.status, 200);
  EXPECT_EQ(hits.body["results"].size(), 2u);
  EXPECT_EQ(c.post("/sessions", {{"seeds", "pc-maps-2004"}}).status, 400);
  EXPECT_EQ(c.post("/sessions", {{"seeds", {"nope"}}}).status, 404);
  const auto id = create_session(c, {{"seeds", {"reeb-2011"}}});
  auto r = c.post("/sessions/" + id + "/selected-papers/miq-2009");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(r.body["error"]["code"], "not_visible");
  EXPECT_EQ(r.body["error"]["details"]["subject"], "miq-2009");
}

TEST(Api, ConcurrentConflictingOpsAreSerialized) {
  Service svc(fixture_index(), std::make_shared<MemorySessionStore>());
  auto setup = svc.client();
  for (int round = 0; round < 20; ++round) {
    SCOPED_TRACE(round);
    const auto id = create_session(setup, {{"seeds", {"polycut-2013"}}});
    const std::vector<std::string> picks{"a08", "a10"};
    std::vector<Reply> replies(2);
    std::barrier start(2);
    std::vector<std::thread> threads;
    for (int i = 0; i < 2; ++i) {
      threads.emplace_back([&, i] {
        auto c = svc.client();
        start.arrive_and_wait();
        replies[i] = c.post("/sessions/" + id + "/reviewers/" + picks[i]);
      });
    }
    for (auto& t : threads) t.join();

    int winner = -1;
    for (int i = 0; i < 2; ++i) {
      if (replies[i].status == 200) {
        EXPECT_EQ(winner, -1);
        winner = i;
      } else {
        EXPECT_EQ(replies[i].status, 409);
        EXPECT_EQ(replies[i].body["error"]["code"], "conflict_with_reviewers");
      }
    }
    ASSERT_NE(winner, -1);
    auto final_state = setup.get("/sessions/" + id);
    EXPECT_EQ(final_state.body["reviewers"].size(), 1u);
    EXPECT_EQ(final_state.body["reviewers"][0]["id"], picks[winner]);
  }
}

std::vector<std::string> session_paths(const std::string& id) {
  const auto base = "/sessions/" + id;
  return {base,
          base + "/candidates",
          base + "/roles",
          base + "/paper-network",
          base + "/researcher-network",
          base + "/reviewers/a01/substitutes",
          base + "/export?format=json",
          base + "/export?format=text"};
}

TEST(Api, RestartReloadReproducesResponses) {
  const auto dir = fs::temp_directory_path() / ("revsel-api-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  auto index = fixture_index();
  std::vector<std::string> ids;
  std::map<std::string, std::string> before;
  {
    Service svc(index, std::make_shared<DirectorySessionStore>(dir));
    auto c = svc.client();
    ids.push_back(create_session(c, {{"seeds", {"pc-maps-2004", "polycut-2013"}},
                                     {"submitting_authors", {"a12"}}}));
    c.post("/sessions/" + ids[0] + "/selected-papers/qms-2010");
    c.post("/sessions/" + ids[0] + "/reviewers/a01");
    c.put("/sessions/" + ids[0] + "/settings",
          {{"hide_conflicted", true}, {"researcher_expiration_years", 12}});
    ids.push_back(create_session(c, {{"seeds", {"reeb-2011"}}}));
    c.post("/sessions/" + ids[1] + "/reviewers/a01");
    ids.push_back(create_session(c));
    for (const auto& id : ids) {
      for (const auto& p : session_paths(id)) before[p] = c.raw(p);
    }
    before["/sessions"] = c.raw("/sessions");
  }
  {
    Service svc(index, std::make_shared<DirectorySessionStore>(dir));
    EXPECT_TRUE(svc.load_failures().empty());
    auto c = svc.client();
    for (const auto& [path, body] : before) EXPECT_EQ(c.raw(path), body) << path;
  }
  fs::remove_all(dir);
}

TEST(Api, SnapshotIndexServesSameResponses) {
  auto fresh = fixture_index();
  std::stringstream buf;
  save_snapshot(*fresh, buf);
  auto loaded = std::make_shared<CorpusIndex>(load_snapshot(buf));

  Service a(fresh, std::make_shared<MemorySessionStore>());
  Service b(loaded, std::make_shared<MemorySessionStore>());
  auto ca = a.client();
  auto cb = b.client();
  for (const std::string path :
       {"/health", "/papers/search?q=quad", "/papers/pc-maps-2004", "/authors/a01",
        "/authors/search?q=marco"}) {
    EXPECT_EQ(ca.raw(path), cb.raw(path)) << path;
  }
  json body = {{"seeds", {"pc-maps-2004", "qms-2010"}}};
  auto ia = create_session(ca, body);
  auto ib = create_session(cb, body);
  for (const auto* suffix : {"/candidates", "/roles", "/paper-network",
                             "/researcher-network"}) {
    EXPECT_EQ(ca.raw("/sessions/" + ia + suffix), cb.raw("/sessions/" + ib + suffix))
        << suffix;
  }
}

TEST(Stores, DirectoryStoreRoundTrip) {
  const auto dir = fs::temp_directory_path() / ("revsel-store-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  DirectorySessionStore store(dir);
  store.put("abc", "{\"x\":1}");
  store.put("def", "{}");
  store.put("abc", "{\"x\":2}");
  store.remove("def");
  EXPECT_EQ(store.load_all(), (std::map<std::string, std::string>{{"abc", "{\"x\":2}"}}));
  fs::remove_all(dir);

  MemorySessionStore mem;
  mem.put("a", "1");
  mem.remove("a");
  EXPECT_TRUE(mem.load_all().empty());
}

}  // namespace
}  // namespace revsel
