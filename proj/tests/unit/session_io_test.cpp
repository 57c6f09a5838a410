#include "revsel/session_io.hpp"

#include <gtest/gtest.h>

#include <random>

#include "json.hpp"
#include "oracle.hpp"

namespace revsel {
namespace {

using testing::code_of;
using nlohmann::json;

class SessionIo : public ::testing::Test {
 protected:
  void SetUp() override { index = testing::load_fixture().index; }

  Session demo() const {
    auto s = new_session(index, "demo");
    s = with_network(s, index,
                     init_network(index, std::vector<PaperId>{"pc-maps-2004", "polycut-2013"}));
    s = with_network(s, index, select_paper(s.network, index, "qms-2010"));
    s = set_submitting_authors(s, index, {"a12"});
    auto settings = s.settings;
    settings.thresholds.conflict_expiration_years = 12;
    settings.flags.hide_conflicted = true;
    settings.substitute_cap = 3;
    s = update_settings(s, index, settings);
    s = select_reviewer(s, index, "a01");
    s = select_reviewer(s, index, "a10");
    return s;
  }

  CorpusIndex index;
};

TEST_F(SessionIo, RoundTripPreservesSession) {
  auto s = demo();
  auto blob = save_session(s);
  EXPECT_EQ(load_session(blob, index), s);
  EXPECT_EQ(save_session(load_session(blob, index)), blob);

  auto plain = new_session(index, "empty");
  EXPECT_EQ(load_session(save_session(plain), index), plain);
}

TEST_F(SessionIo, UnlimitedThresholdsAreNull) {
  auto s = new_session(index, "x");
  auto doc = json::parse(save_session(s));
  EXPECT_TRUE(doc["thresholds"]["conflict_expiration_years"].is_null());
  EXPECT_TRUE(doc["thresholds"]["researcher_expiration_years"].is_null());
  EXPECT_EQ(doc["schema_version"], kSessionSchemaVersion);
}

TEST_F(SessionIo, MissingPaperIsDanglingId) {
  auto records = testing::kept_records(index);
  std::erase_if(records, [](const auto& r) { return r.id == "qms-2010"; });
  auto smaller = testing::index_of(records);
  try {
    load_session(save_session(demo()), smaller);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDanglingId);
    EXPECT_EQ(e.subject(), "qms-2010");
    EXPECT_NE(std::string(e.what()).find("qms-2010"), std::string::npos);
  }
}

TEST_F(SessionIo, MissingAuthorIsDanglingId) {
  auto doc = json::parse(save_session(demo()));
  doc["reviewers"].push_back("ghost");
  try {
    load_session(doc.dump(), index);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDanglingId);
    EXPECT_EQ(e.subject(), "ghost");
  }
}

TEST_F(SessionIo, UnknownFieldsAreIgnored) {
  auto s = demo();
  auto doc = json::parse(save_session(s));
  doc["client_layout"] = {{"zoom", 2}};
  doc["thresholds"]["future_knob"] = true;
  doc["params"]["gamma"] = 0.5;
  EXPECT_EQ(load_session(doc.dump(), index), s);
}

TEST_F(SessionIo, SchemaViolations) {
  auto good = json::parse(save_session(demo()));
  auto broken = [&](auto mutate) {
    auto doc = good;
    mutate(doc);
    return code_of([&] { load_session(doc.dump(), index); });
  };
  EXPECT_EQ(code_of([&] { load_session("not json", index); }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(broken([](json& d) { d["schema_version"] = 99; }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(broken([](json& d) { d.erase("seeds"); }), ErrorCode::kSchemaViolation);
  EXPECT_EQ(broken([](json& d) { d["reviewers"] = "a01"; }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(broken([](json& d) { d["params"]["alpha"] = "high"; }),
            ErrorCode::kSchemaViolation);
}

TEST_F(SessionIo, UnsafeSelectionIsRejected) {
  auto doc = json::parse(save_session(demo()));
  doc["reviewers"].push_back("a08");  // co-author of the submitter a12
  EXPECT_EQ(code_of([&] { load_session(doc.dump(), index); }),
            ErrorCode::kSelectionConflict);
}

TEST(SessionIoRandom, RoundTrip) {
  for (int seed = 1; seed <= 40; ++seed) {
    SCOPED_TRACE(seed);
    std::mt19937_64 rng(seed);
    auto records = testing::random_corpus(rng);
    auto index = testing::index_of(records);
    auto s = new_session(index, "r" + std::to_string(seed));
    s = with_network(s, index, testing::random_state(rng, index));
    for (const auto& c : candidate_reviewers(s.network, index, s.settings.params,
                                             s.settings.thresholds, false)) {
      if (role_of(s, index, c.author_id) == Role::kCandidate) {
        s = select_reviewer(s, index, c.author_id);
      }
    }
    EXPECT_EQ(load_session(save_session(s), index), s);
  }
}

}  // namespace
}  // namespace revsel
