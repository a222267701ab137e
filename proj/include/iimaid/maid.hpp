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

// Multi-agent influence diagrams with complete information: decision rules,
// induced networks, expected utilities, best responses and pure Nash search.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iimaid/core_bn.hpp"
#include "iimaid/error.hpp"

namespace iimaid {

// Two values closer than this are treated as a tie by the enumerating solvers,
// which then keep the lexicographically earlier candidate.
inline constexpr double kTieTolerance = 1e-12;

enum class VariableKind { kChance, kDecision, kUtility };

inline std::string_view kind_name(VariableKind kind) {
  switch (kind) {
    case VariableKind::kChance: return "chance";
    case VariableKind::kDecision: return "decision";
    case VariableKind::kUtility: return "utility";
  }
  return "chance";
}

struct MaidVariable {
  Variable variable;
  VariableKind kind = VariableKind::kChance;
  std::string owner;                  // empty for chance variables
  std::vector<std::string> observes;  // information links; decisions only

  friend bool operator==(const MaidVariable&, const MaidVariable&) = default;
};

// A decision rule is a CPD over a decision whose parents are the decision's
// (sorted) information links.
using DecisionRule = Cpd;
// Decision name -> rule.
using PolicyProfile = std::map<std::string, DecisionRule>;

class Maid {
 public:
  Maid() = default;

  Maid(std::vector<std::string> agents, std::vector<MaidVariable> variables, std::vector<Cpd> cpds,
       std::string name = "")
      : name_(std::move(name)) {
    std::sort(agents.begin(), agents.end());
    if (std::adjacent_find(agents.begin(), agents.end()) != agents.end()) {
      throw Error(ErrorCode::kInvalidModel, "duplicate agent");
    }
    agents_ = std::move(agents);
    for (auto& v : variables) {
      const std::string key = v.variable.name;
      if (v.kind == VariableKind::kDecision) {
        std::sort(v.observes.begin(), v.observes.end());
      } else if (!v.observes.empty()) {
        throw Error(ErrorCode::kInvalidModel, key + ": only decisions carry information links");
      }
      if (!variables_.emplace(key, std::move(v)).second) throw Error(ErrorCode::kDuplicateVariable, key);
    }
    for (auto& c : cpds) {
      const std::string key = c.child;
      if (!cpds_.emplace(key, std::move(c)).second) throw Error(ErrorCode::kInvalidModel, "two CPDs for " + key);
    }
    validate();
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& agents() const { return agents_; }
  const std::map<std::string, MaidVariable>& variables() const { return variables_; }
  const std::map<std::string, Cpd>& cpds() const { return cpds_; }

  bool has_agent(const std::string& agent) const {
    return std::binary_search(agents_.begin(), agents_.end(), agent);
  }

  const MaidVariable& variable(const std::string& name) const {
    auto it = variables_.find(name);
    if (it == variables_.end()) throw Error(ErrorCode::kUnknownVariable, name);
    return it->second;
  }

  VariableKind kind(const std::string& name) const { return variable(name).kind; }

  const std::vector<std::string>& parents(const std::string& name) const {
    const auto& v = variable(name);
    if (v.kind == VariableKind::kDecision) return v.observes;
    return cpds_.at(name).parents;
  }

  std::vector<const Variable*> parent_variables(const std::string& name) const {
    std::vector<const Variable*> out;
    for (const auto& p : parents(name)) out.push_back(&variable(p).variable);
    return out;
  }

  std::vector<std::string> decisions() const { return names_of(VariableKind::kDecision, ""); }
  std::vector<std::string> decisions_of(const std::string& agent) const {
    return names_of(VariableKind::kDecision, agent);
  }
  std::vector<std::string> utilities_of(const std::string& agent) const {
    return names_of(VariableKind::kUtility, agent);
  }

  // (parent, child) pairs sorted.
  std::vector<std::pair<std::string, std::string>> edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, v] : variables_) {
      for (const auto& p : parents(name)) out.emplace_back(p, name);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t context_count(const std::string& decision) const {
    return iimaid::context_count(parent_variables(decision));
  }

  Assignment context_at(const std::string& decision, std::size_t index) const {
    return iimaid::context_at(parent_variables(decision), index);
  }

  // The network obtained by parameterising every decision with `rules`.
  // Decisions without a rule are a missing-rule error.
  BayesNet induced_network(const PolicyProfile& rules) const {
    BayesNet net;
    for (const auto& [name, v] : variables_) net.variables.emplace(name, v.variable);
    for (const auto& [name, c] : cpds_) net.cpds.emplace(name, c);
    for (const auto& [name, v] : variables_) {
      if (v.kind != VariableKind::kDecision) continue;
      auto it = rules.find(name);
      if (it == rules.end()) throw Error(ErrorCode::kMissingRule, "no rule for decision " + name);
      check_rule(it->second);
      net.cpds.emplace(name, it->second);
    }
    return net;
  }

  // Throws context-mismatch / row-not-normalized for malformed rules.
  void check_rule(const DecisionRule& rule) const {
    auto it = variables_.find(rule.child);
    if (it == variables_.end() || it->second.kind != VariableKind::kDecision) {
      throw Error(ErrorCode::kContextMismatch, rule.child + " is not a decision");
    }
    if (rule.parents != it->second.observes) {
      throw Error(ErrorCode::kContextMismatch, "rule for " + rule.child + " has wrong parents");
    }
    if (rule.rows.size() != context_count(rule.child)) {
      throw Error(ErrorCode::kContextMismatch, "rule for " + rule.child + " has wrong row count");
    }
    for (const auto& row : rule.rows) {
      if (row.size() != it->second.variable.domain.size()) {
        throw Error(ErrorCode::kContextMismatch, "rule for " + rule.child + " has wrong row width");
      }
      if (!row_is_normalized(row)) throw Error(ErrorCode::kRowNotNormalized, "rule for " + rule.child);
    }
  }

  friend bool operator==(const Maid&, const Maid&) = default;

 private:
  std::vector<std::string> names_of(VariableKind kind, const std::string& agent) const {
    std::vector<std::string> out;
    for (const auto& [name, v] : variables_) {
      if (v.kind == kind && (agent.empty() || v.owner == agent)) out.push_back(name);
    }
    return out;
  }

  void validate() const {
    for (const auto& [name, v] : variables_) {
      const auto size = v.variable.domain.size();
      if (v.kind == VariableKind::kChance) {
        if (!v.owner.empty()) throw Error(ErrorCode::kInvalidModel, name + ": chance variables have no owner");
      } else if (!has_agent(v.owner)) {
        throw Error(ErrorCode::kUnknownAgent, name + " owned by unknown agent '" + v.owner + "'");
      }
      if (v.kind == VariableKind::kUtility) {
        if (!v.variable.is_utility()) throw Error(ErrorCode::kInvalidDomain, name + ": utility without values");
      } else {
        if (v.variable.is_utility()) throw Error(ErrorCode::kInvalidDomain, name + ": values on non-utility");
        if (size < 2) throw Error(ErrorCode::kInvalidDomain, name + ": domain needs at least two outcomes");
      }
      if (v.kind == VariableKind::kDecision) {
        if (cpds_.contains(name)) throw Error(ErrorCode::kInvalidModel, name + ": decisions have no CPD");
      } else if (!cpds_.contains(name)) {
        throw Error(ErrorCode::kMissingCpd, name);
      }
    }
    for (const auto& [name, c] : cpds_) {
      if (!variables_.contains(name)) throw Error(ErrorCode::kUnknownVariable, "CPD for " + name);
    }
    for (const auto& [name, v] : variables_) {
      for (const auto& p : parents(name)) {
        auto it = variables_.find(p);
        if (it == variables_.end()) throw Error(ErrorCode::kDanglingParent, name + " <- " + p);
        if (it->second.kind == VariableKind::kUtility) {
          throw Error(ErrorCode::kInvalidModel, "utility variable " + p + " must be a leaf (child " + name + ")");
        }
      }
    }
    PolicyProfile uniform;
    for (const auto& d : decisions()) {
      const auto n = variable(d).variable.domain.size();
      uniform[d] = Cpd{d, parents(d),
                       std::vector<std::vector<double>>(context_count(d), std::vector<double>(n, 1.0 / n))};
    }
    BayesNet net;
    for (const auto& [name, v] : variables_) net.variables.emplace(name, v.variable);
    for (const auto& [name, c] : cpds_) net.cpds.emplace(name, c);
    for (auto& [name, r] : uniform) net.cpds.emplace(name, r);
    require_valid(net);
  }

  std::string name_;
  std::vector<std::string> agents_;
  std::map<std::string, MaidVariable> variables_;
  std::map<std::string, Cpd> cpds_;
};

// A MAID some of whose decisions are already parameterised.
struct PartialPostPolicyMaid {
  Maid base;
  PolicyProfile xi;

  void validate() const {
    for (const auto& [d, rule] : xi) {
      if (d != rule.child) throw Error(ErrorCode::kContextMismatch, "rule keyed under " + d);
      base.check_rule(rule);
    }
  }

  bool is_assigned(const std::string& decision) const { return xi.contains(decision); }

  // Decisions of `agent` not fixed by xi.
  std::vector<std::string> free_decisions_of(const std::string& agent) const {
    std::vector<std::string> out;
    for (const auto& d : base.decisions_of(agent)) {
      if (!xi.contains(d)) out.push_back(d);
    }
    return out;
  }

  friend bool operator==(const PartialPostPolicyMaid&, const PartialPostPolicyMaid&) = default;
};

inline DecisionRule rule_from(const Maid& m, const std::string& decision,
                              const std::function<std::vector<double>(const Assignment&)>& row_of) {
  if (m.kind(decision) != VariableKind::kDecision) throw Error(ErrorCode::kContextMismatch, decision);
  DecisionRule rule{decision, m.parents(decision), {}};
  const auto n = m.context_count(decision);
  for (std::size_t c = 0; c < n; ++c) rule.rows.push_back(row_of(m.context_at(decision, c)));
  m.check_rule(rule);
  return rule;
}

inline DecisionRule uniform_rule(const Maid& m, const std::string& decision) {
  const auto n = m.variable(decision).variable.domain.size();
  return rule_from(m, decision, [n](const Assignment&) { return std::vector<double>(n, 1.0 / n); });
}

inline DecisionRule pure_rule(const Maid& m, const std::string& decision,
                              const std::function<std::string(const Assignment&)>& action_of) {
  const Variable& v = m.variable(decision).variable;
  return rule_from(m, decision, [&](const Assignment& ctx) {
    std::vector<double> row(v.domain.size(), 0.0);
    const auto action = action_of(ctx);
    auto idx = v.index_of(action);
    if (!idx) throw Error(ErrorCode::kUnknownOutcome, decision + "=" + action);
    row[static_cast<std::size_t>(*idx)] = 1.0;
    return row;
  });
}

inline PolicyProfile uniform_profile(const Maid& m) {
  PolicyProfile p;
  for (const auto& d : m.decisions()) p[d] = uniform_rule(m, d);
  return p;
}

// Index-level evaluator: a compiled network whose decision tables can be
// swapped cheaply. Decisions without a supplied rule start uniform.
class MaidEvaluator {
 public:
  explicit MaidEvaluator(const Maid& m, const PolicyProfile& rules = {}) : maid_(&m) {
    PolicyProfile all = uniform_profile(m);
    for (const auto& [d, r] : rules) {
      if (!all.contains(d)) throw Error(ErrorCode::kContextMismatch, d + " is not a decision");
      all[d] = r;
    }
    net_ = CompiledNet(m.induced_network(all));
    for (const auto& agent : m.agents()) {
      auto& list = utilities_[agent];
      for (const auto& u : m.utilities_of(agent)) list.push_back(net_.index_of(u));
    }
  }

  const CompiledNet& net() const { return net_; }
  CompiledNet& net() { return net_; }

  void set_rule(const DecisionRule& rule) {
    maid_->check_rule(rule);
    std::vector<double> flat;
    for (const auto& row : rule.rows) flat.insert(flat.end(), row.begin(), row.end());
    net_.set_table(net_.index_of(rule.child), std::move(flat));
  }

  // Expected utility of every agent in one enumeration pass.
  std::map<std::string, double> expected_utilities() const {
    std::map<std::string, double> out;
    for (const auto& agent : maid_->agents()) out[agent] = 0.0;
    net_.enumerate([&](const std::vector<int>& a, double p) {
      for (const auto& [agent, us] : utilities_) {
        double total = 0.0;
        for (int u : us) total += net_.node(u).values[static_cast<std::size_t>(a[static_cast<std::size_t>(u)])];
        out[agent] += p * total;
      }
    });
    return out;
  }

  double expected_utility(const std::string& agent) const {
    auto it = utilities_.find(agent);
    if (it == utilities_.end()) throw Error(ErrorCode::kUnknownAgent, agent);
    if (it->second.empty()) return 0.0;
    double eu = 0.0;
    net_.enumerate([&](const std::vector<int>& a, double p) {
      double total = 0.0;
      for (int u : it->second) total += net_.node(u).values[static_cast<std::size_t>(a[static_cast<std::size_t>(u)])];
      eu += p * total;
    });
    return eu;
  }

 private:
  const Maid* maid_;
  CompiledNet net_;
  std::map<std::string, std::vector<int>> utilities_;
};

inline BayesNet induced_network(const Maid& m, const PolicyProfile& p) { return m.induced_network(p); }

inline double expected_utility(const Maid& m, const PolicyProfile& p, const std::string& agent) {
  if (!m.has_agent(agent)) throw Error(ErrorCode::kUnknownAgent, agent);
  for (const auto& d : m.decisions()) {
    if (!p.contains(d)) throw Error(ErrorCode::kMissingRule, "no rule for decision " + d);
  }
  return MaidEvaluator(m, p).expected_utility(agent);
}

// Odometer over mixed radices; the last digit moves fastest, so successive
// values are in lexicographic order. Returns false after the last value.
inline bool next_digits(std::vector<int>& digits, const std::vector<int>& radix) {
  for (std::size_t k = digits.size(); k-- > 0;) {
    if (++digits[k] < radix[k]) return true;
    digits[k] = 0;
  }
  return false;
}

inline double count_of(const std::vector<int>& radix) {
  double n = 1.0;
  for (int r : radix) n *= r;
  return n;
}

// One (decision, context) cell of a pure policy.
struct PolicySlot {
  std::string decision;
  std::size_t context = 0;
  int actions = 0;
};

inline std::vector<PolicySlot> policy_slots(const Maid& m, const std::vector<std::string>& decisions) {
  std::vector<PolicySlot> slots;
  for (const auto& d : decisions) {
    const int n = static_cast<int>(m.variable(d).variable.domain.size());
    for (std::size_t c = 0; c < m.context_count(d); ++c) slots.push_back({d, c, n});
  }
  return slots;
}

inline PolicyProfile pure_policy_from(const Maid& m, const std::vector<PolicySlot>& slots,
                                      const std::vector<int>& digits) {
  PolicyProfile p;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& s = slots[k];
    auto [it, inserted] = p.try_emplace(s.decision);
    if (inserted) {
      it->second = DecisionRule{s.decision, m.parents(s.decision),
                                std::vector<std::vector<double>>(m.context_count(s.decision),
                                                                 std::vector<double>(s.actions, 0.0))};
    }
    it->second.rows[s.context][static_cast<std::size_t>(digits[k])] = 1.0;
  }
  return p;
}

struct BestResponse {
  PolicyProfile policy;  // rules for the responding agent only
  double value = 0.0;
};

// Exhaustive search over the agent's pure policies; the lexicographically
// least maximiser over (decision, context, action) is returned.
inline BestResponse best_response(const Maid& m, const PolicyProfile& others, const std::string& agent,
                                  double cap = kDefaultSearchCap) {
  if (!m.has_agent(agent)) throw Error(ErrorCode::kUnknownAgent, agent);
  PolicyProfile fixed;
  for (const auto& d : m.decisions()) {
    if (m.variable(d).owner == agent) continue;
    auto it = others.find(d);
    if (it == others.end()) throw Error(ErrorCode::kMissingRule, "no rule for decision " + d);
    fixed[d] = it->second;
  }
  const auto slots = policy_slots(m, m.decisions_of(agent));
  std::vector<int> radix;
  for (const auto& s : slots) radix.push_back(s.actions);
  if (count_of(radix) > cap) throw Error(ErrorCode::kSearchSpaceTooLarge, "pure policies for " + agent);

  MaidEvaluator eval(m, fixed);
  std::vector<int> digits(slots.size(), 0);
  std::vector<int> best_digits;
  double best = -std::numeric_limits<double>::infinity();
  do {
    for (std::size_t k = 0; k < slots.size(); ++k) {
      std::vector<double> row(static_cast<std::size_t>(slots[k].actions), 0.0);
      row[static_cast<std::size_t>(digits[k])] = 1.0;
      eval.net().set_row(eval.net().index_of(slots[k].decision), static_cast<int>(slots[k].context), row);
    }
    const double v = eval.expected_utility(agent);
    if (v > best + kTieTolerance) {
      best = v;
      best_digits = digits;
    }
  } while (next_digits(digits, radix));
  return {pure_policy_from(m, slots, best_digits), best};
}

struct NashReport {
  bool is_nash = false;
  std::map<std::string, double> values;
  std::map<std::string, double> regrets;  // best-response value minus achieved value
};

inline NashReport is_nash(const Maid& m, const PolicyProfile& p, double tol = kTolerance,
                          double cap = kDefaultSearchCap) {
  NashReport report;
  report.is_nash = true;
  for (const auto& d : m.decisions()) {
    if (!p.contains(d)) throw Error(ErrorCode::kMissingRule, "no rule for decision " + d);
  }
  const auto values = MaidEvaluator(m, p).expected_utilities();
  for (const auto& agent : m.agents()) {
    const double br = best_response(m, p, agent, cap).value;
    report.values[agent] = values.at(agent);
    report.regrets[agent] = br - values.at(agent);
    if (br > values.at(agent) + tol) report.is_nash = false;
  }
  return report;
}

// All pure Nash equilibria, in lexicographic order of (agent, decision,
// context, action).
inline std::vector<PolicyProfile> find_pure_nash(const Maid& m, double cap = kDefaultSearchCap) {
  std::vector<std::string> ordered;
  for (const auto& agent : m.agents()) {
    for (const auto& d : m.decisions_of(agent)) ordered.push_back(d);
  }
  const auto slots = policy_slots(m, ordered);
  std::vector<int> radix;
  for (const auto& s : slots) radix.push_back(s.actions);
  if (count_of(radix) > cap) throw Error(ErrorCode::kSearchSpaceTooLarge, "pure profiles");
  std::vector<PolicyProfile> out;
  std::vector<int> digits(slots.size(), 0);
  do {
    auto profile = pure_policy_from(m, slots, digits);
    if (is_nash(m, profile, kTolerance, cap).is_nash) out.push_back(std::move(profile));
  } while (next_digits(digits, radix));
  return out;
}

struct PerfectRecall {
  bool holds = false;
  std::vector<std::string> ordering;  // witness when `holds`
};

// Any valid ordering must strictly grow the parent sets, so sorting by parent
// count and checking neighbours is enough.
inline PerfectRecall has_perfect_recall(const Maid& m, const std::string& agent) {
  auto ds = m.decisions_of(agent);
  std::stable_sort(ds.begin(), ds.end(), [&](const auto& a, const auto& b) {
    return m.parents(a).size() < m.parents(b).size();
  });
  for (std::size_t k = 1; k < ds.size(); ++k) {
    std::set<std::string> earlier(m.parents(ds[k - 1]).begin(), m.parents(ds[k - 1]).end());
    earlier.insert(ds[k - 1]);
    const auto& later = m.parents(ds[k]);
    std::set<std::string> later_set(later.begin(), later.end());
    if (!std::includes(later_set.begin(), later_set.end(), earlier.begin(), earlier.end())) return {false, {}};
  }
  return {true, ds};
}

}  // namespace iimaid
