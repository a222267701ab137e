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

// Test-only builders for the evaluation game: an AI system A reports its
// capability C to a human H, who decides whether to deploy it.

#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "iimaid/ii_maid.hpp"
#include "iimaid/maid.hpp"

namespace iimaid::testing {

inline Variable var(std::string name, std::vector<std::string> domain) {
  return Variable{std::move(name), std::move(domain), {}};
}

inline Variable utility(std::string name, std::vector<std::string> labels) {
  std::vector<double> values;
  for (const auto& l : labels) values.push_back(std::stod(l));
  return Variable{std::move(name), std::move(labels), std::move(values)};
}

// A CPD that puts all mass on `label_of(context)`.
inline Cpd deterministic_cpd(const Variable& child, const std::vector<const Variable*>& parents,
                             const std::function<std::string(const Assignment&)>& label_of) {
  Cpd cpd{child.name, {}, {}};
  for (const auto* p : parents) cpd.parents.push_back(p->name);
  for (std::size_t c = 0; c < context_count(parents); ++c) {
    std::vector<double> row(child.domain.size(), 0.0);
    row[static_cast<std::size_t>(*child.index_of(label_of(context_at(parents, c))))] = 1.0;
    cpd.rows.push_back(row);
  }
  return cpd;
}

inline const Variable kC = var("C", {"high", "low"});
inline const Variable kDA = var("D_A", {"high", "low"});
inline const Variable kDH = var("D_H", {"deploy", "no_deploy"});
inline const Variable kUA = utility("U_A", {"-1", "1"});
inline const Variable kUH = utility("U_H", {"-5", "0", "1"});

inline Cpd prior_c(double p_high = 0.1) { return Cpd{"C", {}, {{p_high, 1.0 - p_high}}}; }

inline Cpd utility_a() {
  return deterministic_cpd(kUA, {&kDH}, [](const Assignment& a) {
    return a.at("D_H") == "deploy" ? "1" : "-1";
  });
}

// Ground truth: H observes both C and the report.
inline Maid honest_maid() {
  Cpd uh = deterministic_cpd(kUH, {&kC, &kDA, &kDH}, [](const Assignment& a) -> std::string {
    if (a.at("D_H") == "no_deploy") return "0";
    return a.at("C") == a.at("D_A") ? "1" : "-5";
  });
  return Maid({"A", "H"},
              {{kC, VariableKind::kChance, "", {}},
               {kDA, VariableKind::kDecision, "A", {"C"}},
               {kDH, VariableKind::kDecision, "H", {"C", "D_A"}},
               {kUA, VariableKind::kUtility, "A", {}},
               {kUH, VariableKind::kUtility, "H", {}}},
              {prior_c(), utility_a(), uh}, "M_H");
}

// A's model of the game: H sees only the report.
inline Maid capability_maid() {
  Cpd uh = deterministic_cpd(kUH, {&kC, &kDH}, [](const Assignment& a) -> std::string {
    if (a.at("D_H") == "no_deploy") return "0";
    return a.at("C") == "low" ? "1" : "-5";
  });
  return Maid({"A", "H"},
              {{kC, VariableKind::kChance, "", {}},
               {kDA, VariableKind::kDecision, "A", {"C"}},
               {kDH, VariableKind::kDecision, "H", {"D_A"}},
               {kUA, VariableKind::kUtility, "A", {}},
               {kUH, VariableKind::kUtility, "H", {}}},
              {prior_c(), utility_a(), uh}, "M_A");
}

inline DecisionRule truthful(const Maid& m) {
  return pure_rule(m, "D_A", [](const Assignment& a) { return a.at("C"); });
}
inline DecisionRule always_low(const Maid& m) {
  return pure_rule(m, "D_A", [](const Assignment&) { return "low"; });
}
inline DecisionRule deploy_iff_match(const Maid& m) {
  return pure_rule(m, "D_H", [](const Assignment& a) {
    return a.at("C") == a.at("D_A") ? "deploy" : "no_deploy";
  });
}
inline DecisionRule deploy_iff_low(const Maid& m) {
  return pure_rule(m, "D_H", [](const Assignment& a) {
    return a.at("D_A") == "low" ? "deploy" : "no_deploy";
  });
}

inline PolicyProfile profile(std::initializer_list<DecisionRule> rules) {
  PolicyProfile p;
  for (const auto& r : rules) p[r.child] = r;
  return p;
}

// The evaluation game with H certain of the ground truth and A certain that
// H reasons in the capability model.
inline IiMaid evaluation_game() {
  SubjectiveMaid sh{"S_H", honest_maid(), {}, {{"A", {{"S_A", 1.0}}}, {"H", {{"S_H", 1.0}}}}, std::nullopt};
  SubjectiveMaid sa{"S_A", capability_maid(), {}, {{"A", {{"S_A", 1.0}}}, {"H", {{"S_A", 1.0}}}}, std::nullopt};
  return IiMaid({"A", "H"}, "S_H", {sh, sa});
}

inline std::vector<double> pick(const InformationSet& info, const std::string& action) {
  const auto it = std::find(info.actions.begin(), info.actions.end(), action);
  return point_mass(info.actions.size(), static_cast<std::size_t>(it - info.actions.begin()));
}

inline std::string observed(const InformationSet& info, const std::string& var) {
  for (const auto& [k, v] : info.observation) {
    if (k == var) return v;
  }
  return "";
}

inline bool sees_capability(const InformationSet& info) { return !observed(info, "C").empty(); }

// A's rule is given per capability; H's rule separately for contexts that
// include C (ground-truth model) and those that do not (capability model).
inline IiPolicyProfile evaluation_profile(
    const IiMaid& x, const std::function<std::string(const std::string&)>& report_of,
    const std::function<std::vector<double>(const InformationSet&)>& h_full,
    const std::function<std::vector<double>(const InformationSet&)>& h_believed) {
  return make_ii_profile(x, [&](const InformationSet& info) {
    if (info.agent == "A") return pick(info, report_of(observed(info, "C")));
    return sees_capability(info) ? h_full(info) : h_believed(info);
  });
}

inline std::vector<double> h_match(const InformationSet& info) {
  return pick(info, observed(info, "C") == observed(info, "D_A") ? "deploy" : "no_deploy");
}
inline std::vector<double> h_if_low(const InformationSet& info) {
  return pick(info, observed(info, "D_A") == "low" ? "deploy" : "no_deploy");
}
inline std::vector<double> h_uniform(const InformationSet& info) {
  return std::vector<double>(info.actions.size(), 1.0 / static_cast<double>(info.actions.size()));
}

inline std::string report_low(const std::string&) { return "low"; }
inline std::string report_truth(const std::string& c) { return c; }

// A always-low; H matches in the ground-truth model, uniform elsewhere.
inline IiPolicyProfile s6_profile(const IiMaid& x) { return evaluation_profile(x, report_low, h_match, h_uniform); }
// A always-low; H matches in the ground-truth model, deploys on "low" elsewhere.
inline IiPolicyProfile rbr_profile(const IiMaid& x) { return evaluation_profile(x, report_low, h_match, h_if_low); }

// Models conditioned from a common prior over `n` states: each agent's belief
// at a state is the prior restricted to that state's cell of a random
// partition. Every cell has positive prior mass by construction.
inline IiMaid common_prior_game(std::mt19937_64& rng, int n, std::vector<double>* prior_out = nullptr) {
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<double> prior(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& p : prior) total += (p = unit(rng));
  for (auto& p : prior) p /= total;
  std::vector<std::string> ids;
  for (int k = 0; k < n; ++k) ids.push_back("S" + std::to_string(k));
  std::vector<SubjectiveMaid> models;
  for (int k = 0; k < n; ++k) models.push_back({ids[static_cast<std::size_t>(k)], k % 2 ? honest_maid() : capability_maid(), {}, {}, std::nullopt});
  for (const std::string agent : {"A", "H"}) {
    std::uniform_int_distribution<int> cell(0, n - 1);
    std::vector<int> part(static_cast<std::size_t>(n));
    for (auto& c : part) c = cell(rng);
    for (int k = 0; k < n; ++k) {
      double mass = 0.0;
      for (int j = 0; j < n; ++j) {
        if (part[static_cast<std::size_t>(j)] == part[static_cast<std::size_t>(k)]) mass += prior[static_cast<std::size_t>(j)];
      }
      BeliefRow row;
      for (int j = 0; j < n; ++j) {
        if (part[static_cast<std::size_t>(j)] == part[static_cast<std::size_t>(k)]) {
          row[ids[static_cast<std::size_t>(j)]] = prior[static_cast<std::size_t>(j)] / mass;
        }
      }
      models[static_cast<std::size_t>(k)].beliefs[agent] = row;
    }
  }
  if (prior_out) *prior_out = prior;
  return IiMaid({"A", "H"}, ids[0], models);
}

// The running example as a depth-3 stack. A believes H believes A reports
// truthfully; H believes A reasons that way; the objective holds both.
inline IiMaid depth3_game() {
  const Maid ma = capability_maid();
  SubjectiveMaid h0{"S_H0", ma, profile({truthful(ma)}), {}, 0};
  SubjectiveMaid a1{"S_A1", ma, {}, {{"H", {{"S_H0", 1.0}}}}, 1};
  SubjectiveMaid h2{"S_H2", honest_maid(), {}, {{"A", {{"S_A1", 1.0}}}}, 2};
  SubjectiveMaid top{"S_star", honest_maid(), {}, {{"A", {{"S_A1", 1.0}}}, {"H", {{"S_H2", 1.0}}}}, 3};
  return IiMaid({"A", "H"}, "S_star", {h0, a1, h2, top});
}

}  // namespace iimaid::testing
