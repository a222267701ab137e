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

// MAIDs with incomplete information: a finite (possibly cyclic) graph of
// subjective MAIDs linked by per-agent beliefs, with one objective model.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iimaid/error.hpp"
#include "iimaid/lp.hpp"
#include "iimaid/maid.hpp"

namespace iimaid {

// Model id -> probability.
using BeliefRow = std::map<std::string, double>;

struct SubjectiveMaid {
  std::string id;
  Maid model;
  // Decisions already fixed to a rule; empty except in finite-depth stacks.
  PolicyProfile xi;
  // Agent -> distribution over model ids. Agents without an entry hold no
  // beliefs here.
  std::map<std::string, BeliefRow> beliefs;
  // Depth asserted by a stack document, checked by classify_depth.
  std::optional<int> depth;

  PartialPostPolicyMaid post_policy() const { return {model, xi}; }

  friend bool operator==(const SubjectiveMaid&, const SubjectiveMaid&) = default;
};

inline bool rows_equal(const BeliefRow& a, const BeliefRow& b, double tol = kTolerance) {
  auto get = [](const BeliefRow& r, const std::string& k) {
    auto it = r.find(k);
    return it == r.end() ? 0.0 : it->second;
  };
  for (const auto& [k, v] : a) {
    if (std::abs(v - get(b, k)) > tol) return false;
  }
  for (const auto& [k, v] : b) {
    if (std::abs(v - get(a, k)) > tol) return false;
  }
  return true;
}

class IiMaid {
 public:
  IiMaid() = default;

  IiMaid(std::vector<std::string> agents, std::string objective, std::vector<SubjectiveMaid> models)
      : objective_(std::move(objective)) {
    std::sort(agents.begin(), agents.end());
    if (std::adjacent_find(agents.begin(), agents.end()) != agents.end()) {
      throw Error(ErrorCode::kInvalidModel, "duplicate agent");
    }
    agents_ = std::move(agents);
    if (models.empty()) throw Error(ErrorCode::kInvalidModel, "an II-MAID needs at least one subjective MAID");
    for (auto& s : models) {
      const std::string id = s.id;
      if (!models_.emplace(id, std::move(s)).second) throw Error(ErrorCode::kInvalidModel, "duplicate model id " + id);
    }
    if (!models_.contains(objective_)) throw Error(ErrorCode::kUnknownReference, "objective " + objective_);
    for (const auto& [id, s] : models_) {
      for (const auto& a : s.model.agents()) {
        if (!std::binary_search(agents_.begin(), agents_.end(), a)) {
          throw Error(ErrorCode::kUnknownAgent, "model " + id + " uses agent " + a);
        }
      }
      PartialPostPolicyMaid{s.model, s.xi}.validate();
      for (const auto& [agent, row] : s.beliefs) {
        if (!std::binary_search(agents_.begin(), agents_.end(), agent)) {
          throw Error(ErrorCode::kUnknownAgent, "beliefs of " + agent + " in " + id);
        }
        std::vector<double> values;
        for (const auto& [target, p] : row) {
          if (!models_.contains(target)) throw Error(ErrorCode::kUnknownReference, id + ": belief in " + target);
          values.push_back(p);
        }
        if (!row_is_normalized(values)) throw Error(ErrorCode::kRowNotNormalized, "beliefs of " + agent + " in " + id);
      }
    }
  }

  const std::vector<std::string>& agents() const { return agents_; }
  const std::string& objective() const { return objective_; }
  const std::map<std::string, SubjectiveMaid>& models() const { return models_; }

  const SubjectiveMaid& model(const std::string& id) const {
    auto it = models_.find(id);
    if (it == models_.end()) throw Error(ErrorCode::kUnknownReference, id);
    return it->second;
  }

  bool has_agent(const std::string& agent) const {
    return std::binary_search(agents_.begin(), agents_.end(), agent);
  }

  // Agent's beliefs at `at`. An agent holding no beliefs there is treated as
  // certain of `at` itself.
  BeliefRow beliefs_of(const std::string& agent, const std::string& at) const {
    const auto& s = model(at);
    auto it = s.beliefs.find(agent);
    if (it == s.beliefs.end()) return {{at, 1.0}};
    BeliefRow out;
    for (const auto& [k, p] : it->second) {
      if (p > 0.0) out[k] = p;
    }
    return out;
  }

  friend bool operator==(const IiMaid&, const IiMaid&) = default;

 private:
  std::vector<std::string> agents_;
  std::string objective_;
  std::map<std::string, SubjectiveMaid> models_;
};

// A MAID believed with certainty by everyone.
inline IiMaid embed(const Maid& m, const std::string& id = "S") {
  SubjectiveMaid s{id, m, {}, {}, std::nullopt};
  for (const auto& a : m.agents()) s.beliefs[a] = {{id, 1.0}};
  return IiMaid(m.agents(), id, {s});
}

struct CoherenceViolation {
  std::string agent;
  std::string model;
  double compatible_mass = 0.0;
};

// Checks P_i^S({S' : P_i^{S'} = P_i^S}) = 1 for every agent with beliefs at S.
inline std::vector<CoherenceViolation> validate_coherence(const IiMaid& x) {
  std::vector<CoherenceViolation> out;
  for (const auto& [id, s] : x.models()) {
    for (const auto& [agent, row] : s.beliefs) {
      double mass = 0.0;
      for (const auto& [target, p] : row) {
        const auto& other = x.model(target).beliefs;
        auto it = other.find(agent);
        if (it != other.end() && rows_equal(it->second, row)) mass += p;
      }
      if (mass < 1.0 - kTolerance) out.push_back({agent, id, mass});
    }
  }
  return out;
}

struct BeliefType {
  std::string agent;
  std::vector<std::string> members;  // models sharing this agent's belief row
};

// Partition of the models by each agent's belief row.
inline std::vector<BeliefType> belief_types(const IiMaid& x) {
  std::vector<BeliefType> out;
  for (const auto& agent : x.agents()) {
    std::vector<std::pair<BeliefRow, std::vector<std::string>>> classes;
    for (const auto& [id, s] : x.models()) {
      const BeliefRow row = x.beliefs_of(agent, id);
      auto it = std::find_if(classes.begin(), classes.end(), [&](const auto& c) { return rows_equal(c.first, row); });
      if (it == classes.end()) {
        classes.push_back({row, {id}});
      } else {
        it->second.push_back(id);
      }
    }
    for (auto& [row, members] : classes) out.push_back({agent, std::move(members)});
  }
  return out;
}

struct ConsistencyReport {
  bool prior_feasible = false;
  // A solution in the relative interior of what the per-model maxima span.
  std::map<std::string, double> sample;
  // Least and greatest p(S) over all solutions.
  std::map<std::string, std::pair<double, double>> range;
  std::vector<std::string> forced_zero;
  bool unique = false;
  bool strongly_consistent = false;
  // Types that no solution can give positive mass.
  std::vector<BeliefType> starved_types;
};

// Solves p(S') = sum_S P_i^S(S') p(S) for every agent and S' over the simplex.
inline ConsistencyReport check_consistency(const IiMaid& x, double tol = kTolerance) {
  std::vector<std::string> ids;
  for (const auto& [id, s] : x.models()) ids.push_back(id);
  const std::size_t n = ids.size();
  std::map<std::string, std::size_t> pos;
  for (std::size_t k = 0; k < n; ++k) pos[ids[k]] = k;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (const auto& agent : x.agents()) {
    for (std::size_t target = 0; target < n; ++target) {
      std::vector<double> row(n, 0.0);
      row[target] -= 1.0;
      for (std::size_t from = 0; from < n; ++from) {
        const auto beliefs = x.beliefs_of(agent, ids[from]);
        auto it = beliefs.find(ids[target]);
        if (it != beliefs.end()) row[from] += it->second;
      }
      A.push_back(row);
      b.push_back(0.0);
    }
  }
  A.emplace_back(n, 1.0);
  b.push_back(1.0);

  ConsistencyReport out;
  auto solve = [&](const std::vector<double>& c) { return lp_maximize(A, b, c); };
  std::vector<std::vector<double>> maximisers;
  out.unique = true;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> c(n, 0.0);
    c[k] = 1.0;
    const auto hi = solve(c);
    if (!hi.feasible) return out;
    out.prior_feasible = true;
    c[k] = -1.0;
    const auto lo = solve(c);
    out.range[ids[k]] = {-lo.value, hi.value};
    if (hi.value <= tol) out.forced_zero.push_back(ids[k]);
    if (hi.value + lo.value > tol) out.unique = false;
    maximisers.push_back(hi.x);
  }
  for (std::size_t k = 0; k < n; ++k) {
    double v = 0.0;
    for (const auto& m : maximisers) v += m[k];
    out.sample[ids[k]] = v / static_cast<double>(maximisers.size());
  }
  // The solution set is convex, so averaging one witness per type gives a
  // single solution positive on every type whenever each type has a witness.
  out.strongly_consistent = true;
  for (const auto& type : belief_types(x)) {
    std::vector<double> c(n, 0.0);
    for (const auto& id : type.members) c[pos[id]] = 1.0;
    if (solve(c).value <= tol) {
      out.strongly_consistent = false;
      out.starved_types.push_back(type);
    }
  }
  return out;
}

// Canonical key of a decision context: what was observed and what can be done.
struct InformationSet {
  std::string agent;
  std::vector<std::pair<std::string, std::string>> observation;  // sorted by variable
  std::vector<std::string> actions;                              // sorted

  auto operator<=>(const InformationSet&) const = default;

  std::string to_string() const {
    std::string s = agent + ":(";
    for (std::size_t k = 0; k < observation.size(); ++k) {
      s += (k ? "," : "") + observation[k].first + "=" + observation[k].second;
    }
    s += "){";
    for (std::size_t k = 0; k < actions.size(); ++k) s += (k ? "," : "") + actions[k];
    return s + "}";
  }
};

inline InformationSet infoset_at(const Maid& m, const std::string& decision, const Assignment& context) {
  const auto& v = m.variable(decision);
  InformationSet out{v.owner, {}, v.variable.domain};
  for (const auto& p : m.parents(decision)) out.observation.emplace_back(p, context.at(p));
  return out;
}

// Agent -> information set -> distribution over its actions.
using IiPolicy = std::map<InformationSet, std::vector<double>>;
using IiPolicyProfile = std::map<std::string, IiPolicy>;

// Positive-probability decision contexts of one subjective MAID, with its
// fixed rules in place and every free decision uniform.
inline std::map<std::string, std::vector<bool>> reachable_contexts(const SubjectiveMaid& s) {
  MaidEvaluator eval(s.model, s.xi);
  const auto& net = eval.net();
  std::map<std::string, std::vector<bool>> out;
  std::vector<std::pair<int, std::vector<bool>*>> nodes;
  for (const auto& d : s.model.decisions()) {
    auto& flags = out[d];
    flags.assign(s.model.context_count(d), false);
    nodes.emplace_back(net.index_of(d), &flags);
  }
  net.enumerate([&](const std::vector<int>& a, double) {
    for (auto& [node, flags] : nodes) (*flags)[static_cast<std::size_t>(net.context_of(node, a))] = true;
  });
  return out;
}

inline std::set<InformationSet> information_sets(const IiMaid& x, const std::string& agent) {
  std::set<InformationSet> out;
  for (const auto& [id, s] : x.models()) {
    const auto reach = reachable_contexts(s);
    for (const auto& d : s.model.decisions_of(agent)) {
      const auto& flags = reach.at(d);
      for (std::size_t c = 0; c < flags.size(); ++c) {
        if (flags[c]) out.insert(infoset_at(s.model, d, s.model.context_at(d, c)));
      }
    }
  }
  return out;
}

// Structural test: some decision of the agent observes exactly these parents,
// admits these outcomes and offers these actions.
inline bool is_encounterable(const InformationSet& info, const Maid& m) {
  for (const auto& d : m.decisions_of(info.agent)) {
    const auto& v = m.variable(d);
    if (v.variable.domain != info.actions) continue;
    const auto& parents = m.parents(d);
    if (parents.size() != info.observation.size()) continue;
    bool match = true;
    for (std::size_t k = 0; k < parents.size() && match; ++k) {
      match = parents[k] == info.observation[k].first &&
              m.variable(parents[k]).variable.index_of(info.observation[k].second).has_value();
    }
    if (match) return true;
  }
  return false;
}

inline bool is_encounterable(const InformationSet& info, const SubjectiveMaid& s) {
  return is_encounterable(info, s.model);
}

// Compiled form of an II-MAID: one evaluator per model, and for every
// information set the table cells it controls.
class IiEvaluator {
 public:
  struct Slot {
    std::size_t model = 0;
    int node = 0;
    int context = 0;
    InformationSet key;
    bool reachable = false;
  };

  explicit IiEvaluator(const IiMaid& x) : x_(&x) {
    for (const auto& [id, s] : x.models()) {
      const std::size_t mi = ids_.size();
      ids_.push_back(id);
      evals_.emplace_back(s.model, s.xi);
      const auto reach = reachable_contexts(s);
      for (const auto& d : s.model.decisions()) {
        if (s.xi.contains(d)) continue;
        const int node = evals_.back().net().index_of(d);
        for (std::size_t c = 0; c < s.model.context_count(d); ++c) {
          Slot slot{mi, node, static_cast<int>(c), infoset_at(s.model, d, s.model.context_at(d, c)), reach.at(d)[c]};
          index_[slot.key].push_back(slots_.size());
          slots_.push_back(std::move(slot));
        }
      }
    }
  }

  const std::vector<Slot>& slots() const { return slots_; }
  const std::vector<std::string>& ids() const { return ids_; }

  // Writes every free decision table. Rules are required at reachable
  // contexts of every agent other than `except`; the rest default to uniform.
  void load(const IiPolicyProfile& p, const std::optional<std::string>& except = std::nullopt) {
    for (const auto& slot : slots_) {
      const auto& agent = slot.key.agent;
      const std::vector<double>* row = nullptr;
      auto a = p.find(agent);
      if (a != p.end()) {
        auto it = a->second.find(slot.key);
        if (it != a->second.end()) row = &it->second;
      }
      if (row) {
        check_row(slot.key, *row);
        write(slot, *row);
      } else if (slot.reachable && agent != except) {
        throw Error(ErrorCode::kMissingInfoSetRule, slot.key.to_string() + " in " + ids_[slot.model]);
      } else {
        const auto n = slot.key.actions.size();
        write(slot, std::vector<double>(n, 1.0 / static_cast<double>(n)));
      }
    }
  }

  void set_rule(const InformationSet& key, const std::vector<double>& row) {
    auto it = index_.find(key);
    if (it == index_.end()) return;
    for (std::size_t s : it->second) write(slots_[s], row);
  }

  // Sum over models of weight times the agent's expected utility there.
  double value(const std::string& agent, const BeliefRow& weights) const {
    double v = 0.0;
    for (const auto& [id, w] : weights) {
      if (w <= 0.0) continue;
      const auto mi = static_cast<std::size_t>(std::lower_bound(ids_.begin(), ids_.end(), id) - ids_.begin());
      if (!x_->model(id).model.has_agent(agent)) continue;
      v += w * evals_[mi].expected_utility(agent);
    }
    return v;
  }

  double model_value(const std::string& id, const std::string& agent) const { return value(agent, {{id, 1.0}}); }

  static void check_row(const InformationSet& key, const std::vector<double>& row) {
    if (row.size() != key.actions.size()) throw Error(ErrorCode::kContextMismatch, "row width at " + key.to_string());
    if (!row_is_normalized(row)) throw Error(ErrorCode::kRowNotNormalized, key.to_string());
  }

 private:
  void write(const Slot& slot, const std::vector<double>& row) {
    evals_[slot.model].net().set_row(slot.node, slot.context, row);
  }

  const IiMaid* x_;
  std::vector<std::string> ids_;
  std::vector<MaidEvaluator> evals_;
  std::vector<Slot> slots_;
  std::map<InformationSet, std::vector<std::size_t>> index_;
};

inline double subjective_expected_utility(const IiMaid& x, const std::string& agent, const std::string& at,
                                          const IiPolicyProfile& p) {
  if (!x.has_agent(agent)) throw Error(ErrorCode::kUnknownAgent, agent);
  IiEvaluator eval(x);
  eval.load(p);
  return eval.value(agent, x.beliefs_of(agent, at));
}

inline std::vector<double> point_mass(std::size_t size, std::size_t k) {
  std::vector<double> row(size, 0.0);
  row[k] = 1.0;
  return row;
}

struct IiBestResponse {
  IiPolicy policy;
  double value = 0.0;
};

// Pure enumeration over the agent's information sets that carry weight under
// its beliefs at the objective model; every other information set gets the
// least action.
inline IiBestResponse best_response_ii(const IiMaid& x, const std::string& agent, const IiPolicyProfile& others,
                                       double cap = kDefaultSearchCap) {
  if (!x.has_agent(agent)) throw Error(ErrorCode::kUnknownAgent, agent);
  IiEvaluator eval(x);
  eval.load(others, agent);
  const auto weights = x.beliefs_of(agent, x.objective());
  std::set<InformationSet> relevant;
  for (const auto& slot : eval.slots()) {
    if (slot.key.agent != agent || !slot.reachable) continue;
    if (weights.contains(eval.ids()[slot.model])) relevant.insert(slot.key);
  }
  const std::vector<InformationSet> keys(relevant.begin(), relevant.end());
  std::vector<int> radix;
  for (const auto& k : keys) radix.push_back(static_cast<int>(k.actions.size()));
  if (count_of(radix) > cap) throw Error(ErrorCode::kSearchSpaceTooLarge, "pure policies for " + agent);
  std::vector<int> digits(keys.size(), 0), best_digits(keys.size(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      eval.set_rule(keys[k], point_mass(keys[k].actions.size(), static_cast<std::size_t>(digits[k])));
    }
    const double v = eval.value(agent, weights);
    if (v > best + kTieTolerance) {
      best = v;
      best_digits = digits;
    }
  } while (next_digits(digits, radix));
  IiBestResponse out;
  out.value = best;
  for (const auto& info : information_sets(x, agent)) out.policy[info] = point_mass(info.actions.size(), 0);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    out.policy[keys[k]] = point_mass(keys[k].actions.size(), static_cast<std::size_t>(best_digits[k]));
  }
  return out;
}

// Nash condition stated at the objective model: every agent's subjective
// value is within tol of its subjective best response.
inline NashReport is_nash_ii(const IiMaid& x, const IiPolicyProfile& p, double tol = kTolerance,
                             double cap = kDefaultSearchCap) {
  NashReport out;
  out.is_nash = true;
  IiEvaluator eval(x);
  eval.load(p);
  for (const auto& agent : x.agents()) {
    const double v = eval.value(agent, x.beliefs_of(agent, x.objective()));
    const double br = best_response_ii(x, agent, p, cap).value;
    out.values[agent] = v;
    out.regrets[agent] = br - v;
    if (br > v + tol) out.is_nash = false;
  }
  return out;
}

inline IiPolicyProfile make_ii_profile(const IiMaid& x,
                                       const std::function<std::vector<double>(const InformationSet&)>& row_of) {
  IiPolicyProfile out;
  for (const auto& agent : x.agents()) {
    for (const auto& info : information_sets(x, agent)) out[agent][info] = row_of(info);
  }
  return out;
}

inline IiPolicyProfile uniform_ii_profile(const IiMaid& x) {
  return make_ii_profile(x, [](const InformationSet& info) {
    return std::vector<double>(info.actions.size(), 1.0 / static_cast<double>(info.actions.size()));
  });
}

// The II profile that plays `p` wherever the MAID's decisions are met.
inline IiPolicyProfile to_ii_profile(const Maid& m, const PolicyProfile& p) {
  IiPolicyProfile out;
  for (const auto& [d, rule] : p) {
    m.check_rule(rule);
    for (std::size_t c = 0; c < rule.rows.size(); ++c) {
      auto info = infoset_at(m, d, m.context_at(d, c));
      out[info.agent][info] = rule.rows[c];
    }
  }
  return out;
}

struct FindNashResult {
  std::optional<IiPolicyProfile> profile;
  std::string method;  // "exhaustive", "iterated-best-response" or "none"
  int iterations = 0;
};

// Every pure II profile, as digits over (agent, information set) in sorted
// order; the last information set varies fastest.
class PureIiProfiles {
 public:
  explicit PureIiProfiles(const IiMaid& x) : agents_(x.agents()) {
    for (const auto& agent : x.agents()) {
      for (const auto& info : information_sets(x, agent)) keys_.push_back(info);
    }
    for (const auto& k : keys_) radix_.push_back(static_cast<int>(k.actions.size()));
  }

  double count() const { return count_of(radix_); }
  const std::vector<InformationSet>& keys() const { return keys_; }
  const std::vector<int>& radix() const { return radix_; }

  IiPolicyProfile build(const std::vector<int>& digits) const {
    IiPolicyProfile p;
    for (const auto& agent : agents_) p[agent];
    for (std::size_t k = 0; k < keys_.size(); ++k) {
      p[keys_[k].agent][keys_[k]] = point_mass(keys_[k].actions.size(), static_cast<std::size_t>(digits[k]));
    }
    return p;
  }

  // Calls f(profile) for each pure profile; stops early when f returns false.
  template <class F>
  void for_each(F&& f) const {
    std::vector<int> digits(keys_.size(), 0);
    do {
      if (!f(build(digits))) return;
    } while (next_digits(digits, radix_));
  }

 private:
  std::vector<std::string> agents_;
  std::vector<InformationSet> keys_;
  std::vector<int> radix_;
};

inline FindNashResult find_nash_ii(const IiMaid& x, double cap = kDefaultSearchCap, int max_iterations = 1000,
                                   double tol = 1e-6) {
  const PureIiProfiles space(x);
  if (space.count() > cap) throw Error(ErrorCode::kSearchSpaceTooLarge, "pure II profiles");
  FindNashResult found{std::nullopt, "none", 0};
  space.for_each([&](IiPolicyProfile p) {
    if (!is_nash_ii(x, p, tol, cap).is_nash) return true;
    found = {std::move(p), "exhaustive", 0};
    return false;
  });
  if (found.profile) return found;

  IiPolicyProfile p = uniform_ii_profile(x);
  for (int it = 1; it <= max_iterations; ++it) {
    IiPolicyProfile next = p;
    for (const auto& agent : x.agents()) next[agent] = best_response_ii(x, agent, next, cap).policy;
    if (next == p) break;
    p = std::move(next);
    if (is_nash_ii(x, p, tol, cap).is_nash) return {p, "iterated-best-response", it};
  }
  if (is_nash_ii(x, p, tol, cap).is_nash) return {p, "iterated-best-response", max_iterations};
  return {std::nullopt, "none", max_iterations};
}

inline bool has_perfect_recall_ii(const IiMaid& x) {
  for (const auto& [id, s] : x.models()) {
    for (const auto& agent : s.model.agents()) {
      if (!has_perfect_recall(s.model, agent).holds) return false;
    }
  }
  return true;
}

}  // namespace iimaid
