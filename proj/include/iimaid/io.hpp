// Copyright 2026 The iimaid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON game documents (*.maid.json, *.iimaid.json, *.stack.json) and profile
// files (*.profile.json).
//
// Probabilities and utility values are decimal strings. Serialisation is
// canonical: sorted object keys, sorted arrays, two-space indent, and the
// shortest decimal that parses back to the same double.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "iimaid/error.hpp"
#include "iimaid/ii_maid.hpp"
#include "iimaid/maid.hpp"
#include "json.hpp"

namespace iimaid::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

enum class DocumentKind { kMaid, kIiMaid, kDepthStack };

inline std::string_view kind_name(DocumentKind k) {
  switch (k) {
    case DocumentKind::kMaid: return "maid";
    case DocumentKind::kIiMaid: return "ii-maid";
    case DocumentKind::kDepthStack: return "depth-stack";
  }
  return "?";
}

struct GameDocument {
  DocumentKind kind = DocumentKind::kMaid;
  Maid maid;    // kMaid
  IiMaid game;  // kIiMaid and kDepthStack

  // Every document can be read as an II-MAID; a plain MAID is embedded.
  IiMaid as_ii_maid() const { return kind == DocumentKind::kMaid ? embed(maid) : game; }
  std::vector<std::string> agents() const { return kind == DocumentKind::kMaid ? maid.agents() : game.agents(); }

  friend bool operator==(const GameDocument&, const GameDocument&) = default;
};

inline std::string format_decimal(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace internal {

[[noreturn]] inline void fail(const std::string& path, const std::string& what,
                              ErrorCode code = ErrorCode::kSchemaViolation) {
  throw Error(code, (path.empty() ? "/" : path) + ": " + what);
}

inline std::string type_name(const json& j) { return j.type_name(); }

inline void check_keys(const json& j, const std::string& path, const std::set<std::string>& required,
                       const std::set<std::string>& optional = {}) {
  if (!j.is_object()) fail(path, "expected an object, found " + type_name(j));
  for (const auto& [k, v] : j.items()) {
    if (!required.contains(k) && !optional.contains(k)) fail(path + "/" + k, "unknown field");
  }
  for (const auto& k : required) {
    if (!j.contains(k)) fail(path + "/" + k, "missing field");
  }
}

inline const std::string& get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string, found " + type_name(j));
  return j.get_ref<const std::string&>();
}

inline double get_decimal(const json& j, const std::string& path) {
  const auto& s = get_string(j, path);
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) fail(path, "not a decimal string: \"" + s + "\"");
  return v;
}

inline std::vector<std::string> get_strings(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array, found " + type_name(j));
  std::vector<std::string> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(get_string(j[k], path + "/" + std::to_string(k)));
  return out;
}

inline std::vector<double> get_row(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array, found " + type_name(j));
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(get_decimal(j[k], path + "/" + std::to_string(k)));
  return out;
}

inline json row_json(const std::vector<double>& row) {
  json out = json::array();
  for (double v : row) out.push_back(format_decimal(v));
  return out;
}

// Runs `f`, prefixing any library error with the document path.
template <typename F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    const std::string what = e.what();
    const auto name = std::string(error_code_name(e.code())) + ": ";
    throw Error(e.code(), path + ": " + (what.rfind(name, 0) == 0 ? what.substr(name.size()) : what));
  }
}

inline json cpd_json(const Cpd& c) {
  json rows = json::array();
  for (const auto& r : c.rows) rows.push_back(row_json(r));
  return {{"child", c.child}, {"parents", c.parents}, {"rows", rows}};
}

inline Cpd parse_cpd(const json& j, const std::string& path) {
  check_keys(j, path, {"child", "parents", "rows"});
  Cpd c{get_string(j["child"], path + "/child"), get_strings(j["parents"], path + "/parents"), {}};
  const auto& rows = j["rows"];
  if (!rows.is_array()) fail(path + "/rows", "expected an array");
  for (std::size_t k = 0; k < rows.size(); ++k) c.rows.push_back(get_row(rows[k], path + "/rows/" + std::to_string(k)));
  return c;
}

}  // namespace internal

inline json maid_json(const Maid& m) {
  json vars = json::array();
  for (const auto& [name, v] : m.variables()) {
    json jv{{"name", name}, {"kind", kind_name(v.kind)}, {"domain", v.variable.domain}};
    if (v.kind != VariableKind::kChance) jv["owner"] = v.owner;
    if (v.kind == VariableKind::kUtility) jv["utility-values"] = internal::row_json(v.variable.utility_values);
    vars.push_back(std::move(jv));
  }
  json edges = json::array();
  for (const auto& [from, to] : m.edges()) edges.push_back({from, to});
  json cpds = json::array();
  for (const auto& [name, c] : m.cpds()) cpds.push_back(internal::cpd_json(c));
  return {{"name", m.name()}, {"agents", m.agents()}, {"variables", vars}, {"edges", edges}, {"cpds", cpds}};
}

inline Maid parse_maid(const json& j, const std::string& path) {
  using namespace internal;  // NOLINT
  check_keys(j, path, {"name", "agents", "variables", "edges", "cpds"});
  const std::string name = get_string(j["name"], path + "/name");
  const auto agents = get_strings(j["agents"], path + "/agents");

  std::vector<MaidVariable> vars;
  std::map<std::string, std::size_t> index;
  const auto& jv = j["variables"];
  if (!jv.is_array()) fail(path + "/variables", "expected an array");
  for (std::size_t k = 0; k < jv.size(); ++k) {
    const std::string p = path + "/variables/" + std::to_string(k);
    const auto& v = jv[k];
    if (!v.is_object() || !v.contains("kind")) fail(p, "expected an object with a kind");
    const auto& kind = get_string(v["kind"], p + "/kind");
    MaidVariable mv;
    if (kind == "chance") {
      check_keys(v, p, {"name", "kind", "domain"});
      mv.kind = VariableKind::kChance;
    } else if (kind == "decision") {
      check_keys(v, p, {"name", "kind", "domain", "owner"});
      mv.kind = VariableKind::kDecision;
    } else if (kind == "utility") {
      check_keys(v, p, {"name", "kind", "domain", "owner", "utility-values"});
      mv.kind = VariableKind::kUtility;
      mv.variable.utility_values = get_row(v["utility-values"], p + "/utility-values");
    } else {
      fail(p + "/kind", "unknown kind \"" + kind + "\"");
    }
    mv.variable.name = get_string(v["name"], p + "/name");
    mv.variable.domain = get_strings(v["domain"], p + "/domain");
    if (v.contains("owner")) mv.owner = get_string(v["owner"], p + "/owner");
    if (!index.emplace(mv.variable.name, vars.size()).second) fail(p + "/name", "duplicate variable " + mv.variable.name);
    vars.push_back(std::move(mv));
  }

  // Edges into decisions are information links; edges into the rest must
  // match the parents of their CPDs.
  std::map<std::string, std::set<std::string>> incoming;
  const auto& je = j["edges"];
  if (!je.is_array()) fail(path + "/edges", "expected an array");
  for (std::size_t k = 0; k < je.size(); ++k) {
    const std::string p = path + "/edges/" + std::to_string(k);
    const auto pair = get_strings(je[k], p);
    if (pair.size() != 2) fail(p, "an edge is a [from, to] pair");
    for (const auto& end : pair) {
      if (!index.contains(end)) fail(p, "unknown variable " + end, ErrorCode::kUnknownReference);
    }
    incoming[pair[1]].insert(pair[0]);
  }
  for (auto& v : vars) {
    if (v.kind == VariableKind::kDecision) {
      const auto& in = incoming[v.variable.name];
      v.observes.assign(in.begin(), in.end());
    }
  }

  std::vector<Cpd> cpds;
  const auto& jc = j["cpds"];
  if (!jc.is_array()) fail(path + "/cpds", "expected an array");
  for (std::size_t k = 0; k < jc.size(); ++k) {
    const std::string p = path + "/cpds/" + std::to_string(k);
    Cpd c = parse_cpd(jc[k], p);
    auto it = index.find(c.child);
    if (it == index.end()) fail(p + "/child", "unknown variable " + c.child, ErrorCode::kUnknownReference);
    if (vars[it->second].kind == VariableKind::kDecision) fail(p, "decisions take rules, not CPDs");
    const std::set<std::string> parents(c.parents.begin(), c.parents.end());
    if (parents != incoming[c.child]) fail(p + "/parents", "parents of " + c.child + " disagree with the edges");
    cpds.push_back(std::move(c));
  }
  return at_path(path, [&] { return Maid(agents, std::move(vars), std::move(cpds), name); });
}

inline json subjective_json(const SubjectiveMaid& s, const std::string& model_name) {
  json beliefs = json::object();
  for (const auto& [agent, row] : s.beliefs) {
    json r = json::object();
    for (const auto& [target, p] : row) r[target] = format_decimal(p);
    beliefs[agent] = r;
  }
  json xi = json::array();
  for (const auto& [d, rule] : s.xi) xi.push_back(internal::cpd_json(rule));
  json out{{"id", s.id}, {"model", model_name}, {"beliefs", beliefs}, {"xi", xi}};
  if (s.depth) out["depth"] = *s.depth;
  return out;
}

inline json document_json(const GameDocument& doc) {
  json out{{"format-version", kFormatVersion}, {"kind", kind_name(doc.kind)}, {"agents", doc.agents()}};
  if (doc.kind == DocumentKind::kMaid) {
    out["maid"] = maid_json(doc.maid);
    return out;
  }
  // Models are shared by name; unnamed or clashing models get the id of the
  // first subjective MAID that uses them.
  std::map<std::string, const Maid*> named;
  json subjective = json::array();
  for (const auto& [id, s] : doc.game.models()) {
    std::string name = s.model.name().empty() ? id + ".model" : s.model.name();
    auto it = named.find(name);
    if (it != named.end() && !(*it->second == s.model)) name = id + ".model";
    named.emplace(name, &s.model);
    subjective.push_back(subjective_json(s, name));
  }
  json maids = json::array();
  for (const auto& [name, m] : named) {
    auto j = maid_json(*m);
    j["name"] = name;
    maids.push_back(std::move(j));
  }
  out["objective-id"] = doc.game.objective();
  out["maids"] = maids;
  out["subjective-maids"] = subjective;
  return out;
}

inline std::string serialize_document(const GameDocument& doc) { return document_json(doc).dump(2) + "\n"; }

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::kSchemaViolation,
                "line " + std::to_string(line) + " column " + std::to_string(col) + ": malformed JSON");
  }
}

inline GameDocument parse_document(const json& j) {
  using namespace internal;  // NOLINT
  if (!j.is_object() || !j.contains("kind")) fail("", "a document is an object with a kind");
  const auto& kind = get_string(j["kind"], "/kind");
  if (!j.contains("format-version") || !j["format-version"].is_number_integer() ||
      j["format-version"].get<int>() != kFormatVersion) {
    fail("/format-version", "expected " + std::to_string(kFormatVersion));
  }
  GameDocument doc;
  if (kind == "maid") {
    check_keys(j, "", {"format-version", "kind", "agents", "maid"});
    doc.kind = DocumentKind::kMaid;
    doc.maid = parse_maid(j["maid"], "/maid");
    if (get_strings(j["agents"], "/agents") != doc.maid.agents()) fail("/agents", "must equal the MAID's agents");
    return doc;
  }
  if (kind == "ii-maid") {
    doc.kind = DocumentKind::kIiMaid;
  } else if (kind == "depth-stack") {
    doc.kind = DocumentKind::kDepthStack;
  } else {
    fail("/kind", "unknown kind \"" + kind + "\"");
  }
  check_keys(j, "", {"format-version", "kind", "agents", "objective-id", "maids", "subjective-maids"});
  const auto agents = get_strings(j["agents"], "/agents");

  std::map<std::string, Maid> maids;
  const auto& jm = j["maids"];
  if (!jm.is_array()) fail("/maids", "expected an array");
  for (std::size_t k = 0; k < jm.size(); ++k) {
    const std::string p = "/maids/" + std::to_string(k);
    Maid m = parse_maid(jm[k], p);
    const std::string name = m.name();
    if (!maids.emplace(name, std::move(m)).second) fail(p + "/name", "duplicate MAID name " + name);
  }

  const auto& js = j["subjective-maids"];
  if (!js.is_array()) fail("/subjective-maids", "expected an array");
  std::set<std::string> ids;
  for (const auto& s : js) {
    if (s.is_object() && s.contains("id") && s["id"].is_string()) ids.insert(s["id"].get<std::string>());
  }
  std::vector<SubjectiveMaid> models;
  for (std::size_t k = 0; k < js.size(); ++k) {
    const std::string p = "/subjective-maids/" + std::to_string(k);
    const auto& s = js[k];
    check_keys(s, p, {"id", "model"}, {"beliefs", "xi", "depth"});
    SubjectiveMaid sm;
    sm.id = get_string(s["id"], p + "/id");
    const auto& model_name = get_string(s["model"], p + "/model");
    auto it = maids.find(model_name);
    if (it == maids.end()) fail(p + "/model", "no MAID named " + model_name, ErrorCode::kUnknownReference);
    sm.model = it->second;
    if (s.contains("beliefs")) {
      const auto& jb = s["beliefs"];
      if (!jb.is_object()) fail(p + "/beliefs", "expected an object");
      for (const auto& [agent, row] : jb.items()) {
        const std::string rp = p + "/beliefs/" + agent;
        if (!row.is_object()) fail(rp, "expected an object");
        BeliefRow r;
        double total = 0.0;
        for (const auto& [target, prob] : row.items()) {
          if (!ids.contains(target)) fail(rp + "/" + target, "no subjective MAID " + target, ErrorCode::kUnknownReference);
          r[target] = get_decimal(prob, rp + "/" + target);
          if (r[target] < 0.0) fail(rp + "/" + target, "negative probability");
          total += r[target];
        }
        if (std::abs(total - 1.0) > kTolerance) fail(rp, "belief row sums to " + format_decimal(total) + ", not 1");
        sm.beliefs[agent] = std::move(r);
      }
    }
    if (s.contains("xi")) {
      const auto& jx = s["xi"];
      if (!jx.is_array()) fail(p + "/xi", "expected an array");
      for (std::size_t r = 0; r < jx.size(); ++r) {
        Cpd rule = parse_cpd(jx[r], p + "/xi/" + std::to_string(r));
        const std::string child = rule.child;
        sm.xi[child] = std::move(rule);
      }
    }
    if (s.contains("depth")) {
      if (!s["depth"].is_number_integer()) fail(p + "/depth", "expected an integer");
      sm.depth = s["depth"].get<int>();
    }
    models.push_back(std::move(sm));
  }
  const std::string objective = get_string(j["objective-id"], "/objective-id");
  if (!ids.contains(objective)) fail("/objective-id", "no subjective MAID " + objective, ErrorCode::kUnknownReference);
  doc.game = at_path("/subjective-maids", [&] { return IiMaid(agents, objective, std::move(models)); });
  return doc;
}

inline GameDocument parse_document(const std::string& text) { return parse_document(parse_json(text)); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline GameDocument load_document(const std::string& path) { return parse_document(read_file(path)); }

// ---- Profiles ---------------------------------------------------------------

inline json profile_json(const IiPolicyProfile& p) {
  json policies = json::array();
  for (const auto& [agent, policy] : p) {
    for (const auto& [key, row] : policy) {
      json obs = json::object();
      for (const auto& [v, o] : key.observation) obs[v] = o;
      policies.push_back({{"agent", key.agent}, {"observation", obs}, {"actions", key.actions},
                          {"row", internal::row_json(row)}});
    }
  }
  return {{"format-version", kFormatVersion}, {"kind", "profile"}, {"policies", policies}};
}

inline std::string serialize_profile(const IiPolicyProfile& p) { return profile_json(p).dump(2) + "\n"; }

inline IiPolicyProfile parse_profile(const json& j) {
  using namespace internal;  // NOLINT
  check_keys(j, "", {"format-version", "kind", "policies"});
  if (get_string(j["kind"], "/kind") != "profile") fail("/kind", "expected \"profile\"");
  if (!j["format-version"].is_number_integer() || j["format-version"].get<int>() != kFormatVersion) {
    fail("/format-version", "expected " + std::to_string(kFormatVersion));
  }
  const auto& jp = j["policies"];
  if (!jp.is_array()) fail("/policies", "expected an array");
  IiPolicyProfile out;
  for (std::size_t k = 0; k < jp.size(); ++k) {
    const std::string p = "/policies/" + std::to_string(k);
    const auto& e = jp[k];
    check_keys(e, p, {"agent", "observation", "actions", "row"});
    InformationSet key{get_string(e["agent"], p + "/agent"), {}, get_strings(e["actions"], p + "/actions")};
    if (!e["observation"].is_object()) fail(p + "/observation", "expected an object");
    for (const auto& [v, o] : e["observation"].items()) key.observation.emplace_back(v, get_string(o, p + "/observation/" + v));
    auto row = get_row(e["row"], p + "/row");
    at_path(p, [&] { IiEvaluator::check_row(key, row); });
    if (!out[key.agent].emplace(key, std::move(row)).second) fail(p, "duplicate information set " + key.to_string());
  }
  return out;
}

inline IiPolicyProfile parse_profile(const std::string& text) { return parse_profile(parse_json(text)); }

inline IiPolicyProfile load_profile(const std::string& path) { return parse_profile(read_file(path)); }

// Decision rules of the objective model: xi where fixed, the profile
// elsewhere. Contexts without a rule must be unreachable and become uniform.
inline PolicyProfile objective_rules(const IiMaid& x, const IiPolicyProfile& p) {
  const auto& s = x.model(x.objective());
  const auto reach = reachable_contexts(s);
  PolicyProfile out = s.xi;
  for (const auto& d : s.model.decisions()) {
    if (out.contains(d)) continue;
    const auto parents = s.model.parent_variables(d);
    out[d] = rule_from(s.model, d, [&](const Assignment& ctx) {
      const auto key = infoset_at(s.model, d, ctx);
      const std::size_t here = context_index(parents, ctx);
      auto a = p.find(key.agent);
      if (a != p.end()) {
        auto it = a->second.find(key);
        if (it != a->second.end()) return it->second;
      }
      if (reach.at(d)[here]) throw Error(ErrorCode::kMissingInfoSetRule, key.to_string());
      return std::vector<double>(key.actions.size(), 1.0 / static_cast<double>(key.actions.size()));
    });
  }
  return out;
}

}  // namespace iimaid::io
