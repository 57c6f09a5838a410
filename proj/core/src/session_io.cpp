#include "revsel/session_io.hpp"

#include "json.hpp"
#include "revsel/error.hpp"

namespace revsel {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, "session: " + what);
}

const json& member(const json& obj, const char* key, json::value_t type) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(std::string("missing '") + key + "'");
  bool ok = it->type() == type ||
            (type == json::value_t::number_integer && it->is_number_integer()) ||
            (type == json::value_t::number_float && it->is_number());
  if (!ok) schema_error(std::string("'") + key + "' has the wrong type");
  return *it;
}

std::vector<std::string> string_list(const json& obj, const char* key) {
  std::vector<std::string> out;
  for (const auto& v : member(obj, key, json::value_t::array)) {
    if (!v.is_string()) schema_error(std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::optional<int> optional_years(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) {
    schema_error(std::string("'") + key + "' must be an integer or null");
  }
  return it->get<int>();
}

ordered_json optional_json(const std::optional<int>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

void require_paper(const CorpusIndex& index, const std::string& id) {
  if (!index.has_paper(id)) {
    throw Error(ErrorCode::kDanglingId,
                "session references paper '" + id + "' missing from the corpus",
                id);
  }
}

void require_author(const CorpusIndex& index, const std::string& id) {
  if (!index.has_author(id)) {
    throw Error(ErrorCode::kDanglingId,
                "session references author '" + id +
                    "' missing from the corpus",
                id);
  }
}

}  // namespace

std::string save_session(const Session& session) {
  const auto& s = session.settings;
  ordered_json doc = {
      {"schema_version", kSessionSchemaVersion},
      {"session_id", session.session_id},
      {"seeds", session.network.seeds},
      {"selected_papers", session.network.selected},
      {"submitting_authors", session.submitting_authors},
      {"reviewers", session.selected_reviewers},
      {"params", {{"alpha", s.params.alpha}, {"beta", s.params.beta}}},
      {"thresholds",
       {{"min_selected_papers", s.thresholds.min_selected_papers},
        {"researcher_expiration_years",
         optional_json(s.thresholds.researcher_expiration_years)},
        {"conflict_expiration_years",
         optional_json(s.thresholds.conflict_expiration_years)},
        {"reference_year", s.thresholds.reference_year}}},
      {"flags",
       {{"hide_conflicted", s.flags.hide_conflicted},
        {"expand", s.flags.expand}}},
      {"substitute_cap", s.substitute_cap},
  };
  return doc.dump(2) + "\n";
}

Session load_session(std::string_view blob, const CorpusIndex& index) {
  json doc;
  try {
    doc = json::parse(blob);
  } catch (const json::parse_error& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("document is not an object");
  const auto& version =
      member(doc, "schema_version", json::value_t::number_integer);
  if (version.get<int>() != kSessionSchemaVersion) {
    schema_error("unsupported schema_version " + version.dump());
  }

  Session session;
  session.session_id =
      member(doc, "session_id", json::value_t::string).get<std::string>();

  const auto& params = member(doc, "params", json::value_t::object);
  auto& settings = session.settings;
  settings.params.alpha =
      member(params, "alpha", json::value_t::number_float).get<double>();
  settings.params.beta =
      member(params, "beta", json::value_t::number_float).get<double>();

  const auto& th = member(doc, "thresholds", json::value_t::object);
  settings.thresholds.min_selected_papers =
      member(th, "min_selected_papers", json::value_t::number_integer)
          .get<int>();
  settings.thresholds.researcher_expiration_years =
      optional_years(th, "researcher_expiration_years");
  settings.thresholds.conflict_expiration_years =
      optional_years(th, "conflict_expiration_years");
  settings.thresholds.reference_year =
      member(th, "reference_year", json::value_t::number_integer).get<int>();

  const auto& flags = member(doc, "flags", json::value_t::object);
  settings.flags.hide_conflicted =
      member(flags, "hide_conflicted", json::value_t::boolean).get<bool>();
  settings.flags.expand =
      member(flags, "expand", json::value_t::boolean).get<bool>();
  if (auto cap = doc.find("substitute_cap"); cap != doc.end()) {
    if (!cap->is_number_unsigned()) schema_error("'substitute_cap' is invalid");
    settings.substitute_cap = cap->get<std::size_t>();
  }
  try {
    settings.params.validate();
    settings.thresholds.validate();
  } catch (const Error& e) {
    schema_error(e.what());
  }

  auto seeds = string_list(doc, "seeds");
  auto selected = string_list(doc, "selected_papers");
  for (const auto& id : seeds) require_paper(index, id);
  for (const auto& id : selected) require_paper(index, id);
  for (const auto& id : string_list(doc, "submitting_authors")) {
    require_author(index, id);
    session.submitting_authors.insert(id);
  }
  for (const auto& id : string_list(doc, "reviewers")) {
    require_author(index, id);
    session.selected_reviewers.push_back(id);
  }

  session.network.seeds = std::move(seeds);
  session.network.selected.insert(selected.begin(), selected.end());
  session.network.visible =
      reconstruct_visible(index, session.network.selected);
  try {
    validate_state(session.network, index);
  } catch (const Error& e) {
    schema_error(e.what());
  }
  // Re-validate selection safety: the corpus may have changed since saving.
  auto reviewers = std::move(session.selected_reviewers);
  session.selected_reviewers.clear();
  for (const auto& r : reviewers) {
    if (std::find(session.selected_reviewers.begin(),
                  session.selected_reviewers.end(),
                  r) != session.selected_reviewers.end()) {
      schema_error("reviewer '" + r + "' listed twice");
    }
    for (const auto& s : session.submitting_authors) {
      if (r == s || in_conflict(r, s, index, settings.thresholds)) {
        throw Error(ErrorCode::kSelectionConflict,
                    "reviewer '" + r + "' conflicts with submitting author '" +
                        s + "'",
                    r, {{r, s}});
      }
    }
    for (const auto& other : session.selected_reviewers) {
      if (in_conflict(r, other, index, settings.thresholds)) {
        throw Error(ErrorCode::kSelectionConflict,
                    "reviewers '" + r + "' and '" + other + "' conflict", r,
                    {{r, other}});
      }
    }
    session.selected_reviewers.push_back(r);
  }
  return session;
}

}  // namespace revsel
