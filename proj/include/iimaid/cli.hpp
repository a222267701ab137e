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

// Command-line front end. Exit codes: 0 success or check passed, 1 check
// failed, 2 error.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iimaid/dot.hpp"
#include "iimaid/efg.hpp"
#include "iimaid/error.hpp"
#include "iimaid/finite_depth.hpp"
#include "iimaid/ii_efg.hpp"
#include "iimaid/ii_maid.hpp"
#include "iimaid/io.hpp"
#include "iimaid/maid.hpp"
#include "iimaid/simulate.hpp"

namespace iimaid::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFalse = 1;
inline constexpr int kExitError = 2;

struct Options {
  std::string command;
  std::string document;
  std::string profile;
  std::string profile_out;
  std::string output = "text";
  std::string view = "maid";
  double tol = kTolerance;
  double cap = kDefaultSearchCap;
  std::uint64_t seed = 0;
  std::size_t n = 100000;
  int depth = -1;  // unset
  bool timings = false;
};

struct Outcome {
  int code = kExitOk;
  json result = json::object();
  std::string text;
};

namespace internal {

inline std::string row_text(const std::vector<double>& row, const std::vector<std::string>& actions) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] == 1.0) return actions[k];
  }
  std::string out = "[";
  for (std::size_t k = 0; k < row.size(); ++k) out += (k ? ", " : "") + io::format_decimal(row[k]);
  return out + "]";
}

inline std::string profile_text(const IiPolicyProfile& p) {
  std::string out;
  for (const auto& [agent, policy] : p) {
    for (const auto& [key, row] : policy) out += "  " + key.to_string() + " -> " + row_text(row, key.actions) + "\n";
  }
  return out;
}

inline json number_map(const std::map<std::string, double>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

inline std::string number_lines(const std::string& title, const std::map<std::string, double>& m) {
  std::string out;
  for (const auto& [k, v] : m) out += title + " " + k + " = " + io::format_decimal(v) + "\n";
  return out;
}

inline const IiPolicyProfile require_profile(const Options& o) {
  if (o.profile.empty()) throw Error(ErrorCode::kBadFlag, o.command + " needs --profile");
  return io::load_profile(o.profile);
}

inline void write_profile(const Options& o, const IiPolicyProfile& p) {
  if (o.profile_out.empty()) return;
  std::ofstream f(o.profile_out, std::ios::binary);
  if (!f) throw Error(ErrorCode::kFileNotFound, o.profile_out);
  f << io::serialize_profile(p);
}

inline json record_json(const RsRecord& r) {
  json values = json::array();
  for (double v : r.values) values.push_back(io::format_decimal(v));
  return {{"step", r.step},
          {"pass", r.pass},
          {"node", r.node},
          {"agent", r.agent},
          {"information-set", r.info.to_string()},
          {"action", r.action_label()},
          {"value", io::format_decimal(r.value())},
          {"values", values},
          {"basis", basis_name(r.basis)},
          {"models", r.models}};
}

}  // namespace internal

// ---- Commands ----------------------------------------------------------------

inline Outcome cmd_validate(const Options&, const io::GameDocument& doc) {
  Outcome out;
  const IiMaid x = doc.as_ii_maid();
  out.result = {{"valid", true}, {"kind", io::kind_name(doc.kind)}, {"agents", doc.agents()},
                {"models", x.models().size()}};
  out.text = "valid " + std::string(io::kind_name(doc.kind)) + " with " + std::to_string(x.models().size()) +
             " model(s)\n";
  if (doc.kind == io::DocumentKind::kDepthStack) {
    const DepthStack stack(doc.game);
    out.result["depth"] = stack.depth();
    out.text += "depth " + std::to_string(stack.depth()) + "\n";
  }
  for (const auto& v : validate_coherence(x)) {
    const std::string msg = v.agent + " at " + v.model + ": compatible mass " + io::format_decimal(v.compatible_mass);
    out.result["coherence-warnings"].push_back(msg);
    out.text += "warning: incoherent beliefs of " + msg + "\n";
  }
  return out;
}

inline Outcome cmd_info_sets(const Options&, const io::GameDocument& doc) {
  Outcome out;
  const IiMaid x = doc.as_ii_maid();
  for (const auto& agent : x.agents()) {
    const auto sets = information_sets(x, agent);
    json list = json::array();
    for (const auto& s : sets) list.push_back(s.to_string());
    out.result[agent] = {{"count", sets.size()}, {"sets", list}};
    out.text += agent + ": " + std::to_string(sets.size()) + "\n";
    for (const auto& s : sets) out.text += "  " + s.to_string() + "\n";
  }
  return out;
}

inline Outcome cmd_eu(const Options& o, const io::GameDocument& doc) {
  Outcome out;
  const IiMaid x = doc.as_ii_maid();
  const auto p = internal::require_profile(o);
  std::map<std::string, double> subjective;
  IiEvaluator eval(x);
  eval.load(p);
  for (const auto& agent : x.agents()) subjective[agent] = eval.value(agent, x.beliefs_of(agent, x.objective()));
  const auto& obj = x.model(x.objective()).model;
  const auto objective = MaidEvaluator(obj, io::objective_rules(x, p)).expected_utilities();
  out.result = {{"subjective", internal::number_map(subjective)}, {"objective", internal::number_map(objective)}};
  out.text = internal::number_lines("subjective", subjective) + internal::number_lines("objective", objective);
  return out;
}

inline Outcome cmd_check_nash(const Options& o, const io::GameDocument& doc) {
  Outcome out;
  const auto p = internal::require_profile(o);
  NashReport r;
  if (doc.kind == io::DocumentKind::kMaid) {
    r = is_nash(doc.maid, io::objective_rules(doc.as_ii_maid(), p), o.tol, o.cap);
  } else {
    r = is_nash_ii(doc.game, p, o.tol, o.cap);
  }
  out.code = r.is_nash ? kExitOk : kExitFalse;
  out.result = {{"is-nash", r.is_nash}, {"values", internal::number_map(r.values)},
                {"regrets", internal::number_map(r.regrets)}, {"tol", o.tol}};
  out.text = std::string(r.is_nash ? "nash" : "not nash") + "\n" + internal::number_lines("value", r.values) +
             internal::number_lines("regret", r.regrets);
  return out;
}

inline Outcome cmd_solve_nash(const Options& o, const io::GameDocument& doc) {
  Outcome out;
  const IiMaid x = doc.as_ii_maid();
  const auto found = find_nash_ii(x, o.cap, 1000, std::max(o.tol, 1e-6));
  out.result["method"] = found.method;
  if (!found.profile) {
    out.code = kExitFalse;
    out.result["found"] = false;
    out.text = "no equilibrium found\n";
    return out;
  }
  const auto r = is_nash_ii(x, *found.profile, std::max(o.tol, 1e-6), o.cap);
  internal::write_profile(o, *found.profile);
  out.result["found"] = true;
  out.result["profile"] = io::profile_json(*found.profile)["policies"];
  out.result["regrets"] = internal::number_map(r.regrets);
  out.text = "equilibrium (" + found.method + ")\n" + internal::profile_text(*found.profile) +
             internal::number_lines("regret", r.regrets);
  return out;
}

inline Outcome cmd_check_consistency(const Options& o, const io::GameDocument& doc) {
  Outcome out;
  const auto r = check_consistency(doc.as_ii_maid(), o.tol);
  json range = json::object();
  for (const auto& [id, lh] : r.range) range[id] = {lh.first, lh.second};
  json starved = json::array();
  for (const auto& t : r.starved_types) starved.push_back({{"agent", t.agent}, {"members", t.members}});
  out.code = r.strongly_consistent ? kExitOk : kExitFalse;
  out.result = {{"prior-feasible", r.prior_feasible}, {"solution", internal::number_map(r.sample)},
                {"range", range}, {"forced-zero", r.forced_zero}, {"unique", r.unique},
                {"strongly-consistent", r.strongly_consistent}, {"starved-types", starved}};
  out.text = std::string("common prior feasible: ") + (r.prior_feasible ? "yes" : "no") + "\n";
  for (const auto& [id, lh] : r.range) {
    out.text += "p(" + id + ") in [" + io::format_decimal(lh.first) + ", " + io::format_decimal(lh.second) + "]\n";
  }
  for (const auto& id : r.forced_zero) out.text += "forced zero: " + id + "\n";
  out.text += std::string("strongly consistent: ") + (r.strongly_consistent ? "yes" : "no") + "\n";
  return out;
}

inline Outcome cmd_solve_rbr(const Options& o, const io::GameDocument& doc) {
  Outcome out;
  const IiMaid x = doc.as_ii_maid();
  DepthStack stack = doc.kind == io::DocumentKind::kDepthStack
                         ? DepthStack(x)
                         : (o.depth < 0 ? throw Error(ErrorCode::kBadFlag, "solve-rbr on a cyclic game needs --depth")
                                        : unroll_to_depth(x, o.depth));
  const auto r = recursive_best_response(stack);
  internal::write_profile(o, r.projected);
  const auto& obj = x.model(x.objective()).model;
  const auto eu = MaidEvaluator(obj, io::objective_rules(x, r.projected)).expected_utilities();
  json trace = json::array();
  for (const auto& rec : r.trace) trace.push_back(internal::record_json(rec));
  out.result = {{"depth", stack.depth()},
                {"profile", io::profile_json(r.projected)["policies"]},
                {"expected-utilities", internal::number_map(eu)},
                {"trace", trace}};
  out.text = "depth " + std::to_string(stack.depth()) + "\n" + internal::profile_text(r.projected) +
             internal::number_lines("EU", eu);
  return out;
}

inline Outcome cmd_convert_efg(const Options&, const io::GameDocument& doc) {
  Outcome out;
  auto describe = [](const Efg& g) {
    json per_agent = json::object();
    for (const auto& a : g.agents) per_agent[a] = g.infosets_of(a).size();
    return json{{"nodes", g.nodes.size()}, {"leaves", g.leaves().size()}, {"information-sets", per_agent}};
  };
  if (doc.kind == io::DocumentKind::kMaid) {
    const auto conv = maid2efg(doc.maid);
    out.result = describe(conv.game);
    out.result["order"] = conv.order;
  } else {
    const auto conv = maid2efgII(doc.game);
    json games = json::object();
    for (std::size_t k = 0; k < conv.trees.size(); ++k) games[conv.game.space.states[k]] = describe(conv.game.games[k]);
    json beliefs = json::object();
    for (const auto& [agent, m] : conv.game.space.beliefs) beliefs[agent] = m;
    out.result = {{"states", conv.game.space.states}, {"interim", conv.game.space.states[conv.game.interim]},
                  {"games", games}, {"beliefs", beliefs}, {"bijective", conv.bijective}};
  }
  out.text = out.result.dump(2) + "\n";
  return out;
}

inline Outcome cmd_verify_equivalence(const Options& o, const io::GameDocument& doc) {
  Outcome out;
  const IiMaid x = doc.as_ii_maid();
  const auto conv = maid2efgII(x);
  std::vector<IiPolicyProfile> profiles;
  if (!o.profile.empty()) {
    profiles.push_back(io::load_profile(o.profile));
  } else {
    const PureIiProfiles space(x);
    if (space.count() > o.cap) throw Error(ErrorCode::kSearchSpaceTooLarge, "pure II profiles");
    space.for_each([&](IiPolicyProfile p) {
      profiles.push_back(std::move(p));
      return true;
    });
  }
  const auto r = verify_equivalence(x, conv, profiles, o.tol);
  out.code = r.holds && conv.bijective ? kExitOk : kExitFalse;
  out.result = {{"holds", r.holds}, {"bijective", conv.bijective}, {"profiles", r.profiles},
                {"max-deviation", r.max_deviation}};
  out.text = std::string(r.holds ? "equivalent" : "not equivalent") + " over " + std::to_string(r.profiles) +
             " profile(s), max deviation " + io::format_decimal(r.max_deviation) + "\n";
  return out;
}

inline Outcome cmd_simulate(const Options& o, const io::GameDocument& doc) {
  Outcome out;
  const IiMaid x = doc.as_ii_maid();
  const auto p = internal::require_profile(o);
  const auto& obj = x.model(x.objective()).model;
  const auto r = simulate(obj, io::objective_rules(x, p), o.n, o.seed);
  out.result = {{"n", r.n}, {"seed", r.seed}, {"within-4-stderr", r.within(4.0)}};
  for (const auto& [agent, e] : r.agents) {
    out.result["agents"][agent] = {{"mean", e.mean}, {"stderr", e.stderr_}, {"exact", e.exact}};
    out.text += agent + ": mean " + io::format_decimal(e.mean) + " stderr " + io::format_decimal(e.stderr_) +
                " exact " + io::format_decimal(e.exact) + "\n";
  }
  return out;
}

inline Outcome cmd_export_dot(const Options& o, const io::GameDocument& doc) {
  Outcome out;
  const IiMaid x = doc.as_ii_maid();
  const auto& obj = x.model(x.objective()).model;
  std::string dot;
  if (o.view == "maid") {
    dot = maid_to_dot(obj);
  } else if (o.view == "efg") {
    dot = efg_to_dot(maid2efg(obj).game);
  } else {
    dot = belief_tree_to_dot(x, o.depth < 0 ? 2 : o.depth);
  }
  out.result = {{"view", o.view}, {"dot", dot}};
  out.text = dot;
  return out;
}

// ---- Dispatch ----------------------------------------------------------------

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using Handler = std::function<Outcome(const Options&, const io::GameDocument&)>;
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"validate", "Parse and validate a game document", cmd_validate},
      {"info-sets", "List information sets per agent", cmd_info_sets},
      {"eu", "Expected utilities under a profile", cmd_eu},
      {"check-nash", "Check a profile for Nash equilibrium", cmd_check_nash},
      {"solve-nash", "Search for an equilibrium", cmd_solve_nash},
      {"check-consistency", "Common-prior consistency of the belief graph", cmd_check_consistency},
      {"solve-rbr", "Recursive best response of a depth stack", cmd_solve_rbr},
      {"convert-efg", "Convert to a game tree and summarise it", cmd_convert_efg},
      {"verify-equivalence", "Compare expected utilities with the converted game", cmd_verify_equivalence},
      {"simulate", "Monte-Carlo rollouts of the objective model", cmd_simulate},
      {"export-dot", "Graphviz export", cmd_export_dot},
  };

  Options o;
  CLI::App app{"Influence diagrams with incomplete information", "iimaid"};
  app.require_subcommand(1);
  std::map<std::string, const Handler*> handlers;
  for (const auto& [name, help, handler] : commands) {
    handlers[name] = &handler;
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("document", o.document, "Game document (.maid.json, .iimaid.json, .stack.json)")->required();
    sub->add_option("--tol", o.tol, "Comparison tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--cap", o.cap, "Cap on enumerated pure profiles")->check(CLI::PositiveNumber);
    sub->add_option("--depth", o.depth, "Unrolling depth for cyclic belief graphs")->check(CLI::NonNegativeNumber);
    sub->add_option("--output", o.output, "Report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--profile", o.profile, "Profile file (.profile.json)");
    sub->add_option("--profile-out", o.profile_out, "Write the computed profile here");
    sub->add_option("--n", o.n, "Number of rollouts")->check(CLI::PositiveNumber);
    sub->add_option("--view", o.view, "export-dot view")->check(CLI::IsMember({"maid", "efg", "beliefs"}));
    sub->add_flag("--timings", o.timings, "Add wall-clock timings to the report");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_code_name(ErrorCode::kBadFlag) << ": " << e.what() << "\n";
    return kExitError;
  }
  for (const auto* sub : app.get_subcommands()) o.command = sub->get_name();

  json report{{"command", o.command}, {"document", o.document}, {"seed", o.seed}};
  report["flags"] = {{"tol", o.tol}, {"cap", o.cap}, {"output", o.output}};
  if (o.depth >= 0) report["flags"]["depth"] = o.depth;
  if (!o.profile.empty()) report["flags"]["profile"] = o.profile;
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    const auto doc = io::load_document(o.document);
    outcome = (*handlers.at(o.command))(o, doc);
  } catch (const Error& e) {
    err << e.what() << "\n";
    if (o.output == "json") {
      report["exit-code"] = kExitError;
      report["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
      out << report.dump(2) << "\n";
    }
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  if (o.output == "json") {
    report["exit-code"] = outcome.code;
    report["result"] = outcome.result;
    if (o.timings) {
      const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
      report["timings"] = {{"total-ms", ms.count()}};
    }
    out << report.dump(2) << "\n";
  } else {
    out << outcome.text;
  }
  return outcome.code;
}

}  // namespace iimaid::cli
