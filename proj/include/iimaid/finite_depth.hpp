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

// Finite-depth belief stacks and the recursive best-response solution.
//
// A stack is an II-MAID whose positive belief references form a DAG. Each
// node is "for" at most one agent (its owner): the agent with undecided
// decisions and no beliefs there. A depth-0 node has no beliefs at all, so
// it is a single-agent decision problem for its owner.

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
#include "iimaid/ii_maid.hpp"
#include "iimaid/maid.hpp"

namespace iimaid {

struct DepthClassification {
  std::map<std::string, int> depth;
  std::map<std::string, std::optional<std::string>> owner;
  int k = 0;  // depth of the objective
};

namespace internal {

inline bool has_free_decisions(const SubjectiveMaid& s, const std::string& agent) {
  return s.model.has_agent(agent) && !s.post_policy().free_decisions_of(agent).empty();
}

inline std::vector<std::string> positive_targets(const BeliefRow& row) {
  std::vector<std::string> out;
  for (const auto& [id, p] : row) {
    if (p > 0.0) out.push_back(id);
  }
  return out;
}

}  // namespace internal

inline DepthClassification classify_depth(const IiMaid& x) {
  DepthClassification out;
  for (const auto& [id, s] : x.models()) {
    std::optional<std::string> owner;
    for (const auto& agent : s.model.agents()) {
      const bool free = internal::has_free_decisions(s, agent);
      const bool believes = s.beliefs.contains(agent);
      if (believes && !free) {
        throw Error(ErrorCode::kDepthContractViolation, id + ": " + agent + " is post-policy but holds beliefs");
      }
      if (free && !believes) {
        if (owner) {
          throw Error(ErrorCode::kDepthContractViolation,
                      id + ": both " + *owner + " and " + agent + " decide without beliefs");
        }
        owner = agent;
      }
    }
    for (const auto& [agent, row] : s.beliefs) {
      if (!s.model.has_agent(agent)) {
        throw Error(ErrorCode::kDepthContractViolation, id + ": beliefs for " + agent + ", who is not in the model");
      }
    }
    out.owner[id] = owner;
  }

  // Depth by memoised DFS; grey nodes on the stack reveal a cycle.
  std::map<std::string, int> colour;
  std::function<int(const std::string&)> visit = [&](const std::string& id) -> int {
    auto& c = colour[id];
    if (c == 1) throw Error(ErrorCode::kCyclicBeliefs, "belief cycle through " + id);
    if (c == 2) return out.depth.at(id);
    c = 1;
    const auto& s = x.model(id);
    int d = 0;
    for (const auto& [agent, row] : s.beliefs) {
      for (const auto& t : internal::positive_targets(row)) {
        const auto& target_owner = out.owner.at(t);
        if (target_owner && *target_owner != agent) {
          throw Error(ErrorCode::kDepthContractViolation,
                      id + ": " + agent + " believes in " + t + ", a model for " + *target_owner);
        }
        d = std::max(d, visit(t) + 1);
      }
    }
    colour[id] = 2;
    out.depth[id] = d;
    return d;
  };
  for (const auto& [id, s] : x.models()) visit(id);

  for (const auto& [id, s] : x.models()) {
    if (!s.depth) continue;
    if (*s.depth != out.depth.at(id)) {
      throw Error(ErrorCode::kDepthContractViolation, id + " declares depth " + std::to_string(*s.depth) +
                                                          " but has depth " + std::to_string(out.depth.at(id)));
    }
    for (const auto& [agent, row] : s.beliefs) {
      for (const auto& t : internal::positive_targets(row)) {
        const auto& target = x.model(t);
        if (target.depth && *target.depth >= *s.depth) {
          throw Error(ErrorCode::kDepthContractViolation, id + " believes in " + t + " of equal or greater depth");
        }
      }
    }
  }
  out.k = out.depth.at(x.objective());
  return out;
}

// A validated finite-depth II-MAID. Perfect recall is required of every
// agent in every node.
class DepthStack {
 public:
  explicit DepthStack(IiMaid game) : game_(std::move(game)), info_(classify_depth(game_)) {
    if (!has_perfect_recall_ii(game_)) {
      throw Error(ErrorCode::kPerfectRecallViolation, "stacks require perfect recall in every node");
    }
  }

  const IiMaid& game() const { return game_; }
  const DepthClassification& classification() const { return info_; }
  int depth() const { return info_.k; }
  int depth_of(const std::string& id) const {
    auto it = info_.depth.find(id);
    if (it == info_.depth.end()) throw Error(ErrorCode::kUnknownReference, id);
    return it->second;
  }
  const std::optional<std::string>& owner_of(const std::string& id) const { return info_.owner.at(id); }

  friend bool operator==(const DepthStack& a, const DepthStack& b) { return a.game_ == b.game_; }

 private:
  IiMaid game_;
  DepthClassification info_;
};

// Information sets of `agent` at positive-probability contexts of its free
// decisions in `s`.
inline std::set<InformationSet> encounterable_sets(const SubjectiveMaid& s, const std::string& agent) {
  std::set<InformationSet> out;
  if (!s.model.has_agent(agent)) return out;
  const auto free = s.post_policy().free_decisions_of(agent);
  if (free.empty()) return out;
  const auto reach = reachable_contexts(s);
  for (const auto& d : free) {
    const auto& flags = reach.at(d);
    for (std::size_t c = 0; c < flags.size(); ++c) {
      if (flags[c]) out.insert(infoset_at(s.model, d, s.model.context_at(d, c)));
    }
  }
  return out;
}

struct OpenMindedViolation {
  std::string node;
  std::string agent;
  InformationSet info;
};

struct OpenMindedness {
  bool holds = true;
  std::vector<OpenMindedViolation> violations;
};

inline OpenMindedness is_open_minded(const DepthStack& stack) {
  const IiMaid& x = stack.game();
  std::map<std::pair<std::string, std::string>, std::set<InformationSet>> cache;
  auto sets = [&](const std::string& id, const std::string& agent) -> const std::set<InformationSet>& {
    auto key = std::make_pair(id, agent);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, encounterable_sets(x.model(id), agent)).first;
    return it->second;
  };
  OpenMindedness out;
  for (const auto& [id, s] : x.models()) {
    for (const auto& [agent, row] : s.beliefs) {
      const auto targets = internal::positive_targets(row);
      for (const auto& info : sets(id, agent)) {
        const bool covered = std::any_of(targets.begin(), targets.end(),
                                         [&](const std::string& t) { return sets(t, agent).contains(info); });
        if (!covered) out.violations.push_back({id, agent, info});
      }
    }
  }
  out.holds = out.violations.empty();
  return out;
}

// How a rule written by the final decision assignment was chosen.
enum class RsBasis {
  kBelief,   // expected utility over believed models where the context has positive probability
  kRelaxed,  // no such model: the other agents' fixed rules are replaced by uniform ones
  kDefault,  // context impossible even then, or absent from every believed model
};

inline std::string_view basis_name(RsBasis b) {
  switch (b) {
    case RsBasis::kBelief: return "belief";
    case RsBasis::kRelaxed: return "relaxed";
    case RsBasis::kDefault: return "default";
  }
  return "?";
}

struct RsRecord {
  int step = 0;  // reduce_stack application, from 1; 0 when called directly
  int pass = 0;  // final decision assignment pass within BR_1, from 1
  std::string node;
  std::string agent;
  InformationSet info;
  std::size_t action = 0;
  std::vector<double> values;  // belief-weighted expected utility per action
  RsBasis basis = RsBasis::kBelief;
  std::vector<std::string> models;  // models whose expectations entered `values`

  double value() const { return values.empty() ? 0.0 : values[action]; }
  const std::string& action_label() const { return info.actions[action]; }
};

// Depth-1 best response of `agent` at `node`: repeated final decision
// assignment over private copies of the believed depth-0 models.
class DepthOneSolver {
 public:
  DepthOneSolver(const DepthStack& stack, std::string node, std::string agent)
      : node_(std::move(node)), agent_(std::move(agent)) {
    const IiMaid& x = stack.game();
    const auto& s = x.model(node_);
    auto it = s.beliefs.find(agent_);
    if (it == s.beliefs.end()) throw Error(ErrorCode::kNotDepthOne, agent_ + " holds no beliefs at " + node_);
    for (const auto& t : internal::positive_targets(it->second)) {
      if (stack.depth_of(t) != 0) {
        throw Error(ErrorCode::kNotDepthOne, agent_ + " at " + node_ + " believes in " + t + " of depth " +
                                                 std::to_string(stack.depth_of(t)));
      }
      Model m{t, it->second.at(t), x.model(t), {}};
      for (const auto& d : m.copy.post_policy().free_decisions_of(agent_)) {
        Site site{d, {}, {}};
        const auto n = m.copy.model.context_count(d);
        for (std::size_t c = 0; c < n; ++c) site.keys.push_back(infoset_at(m.copy.model, d, m.copy.model.context_at(d, c)));
        site.rows.assign(n, std::nullopt);
        m.sites.push_back(std::move(site));
      }
      models_.push_back(std::move(m));
    }
  }

  bool done() const {
    for (const auto& m : models_) {
      for (const auto& site : m.sites) {
        if (!site_done(site)) return false;
      }
    }
    return true;
  }

  // Unassigned information sets after which the agent takes no further
  // undecided decision in any believed model.
  std::set<InformationSet> structural_finals() const {
    std::set<InformationSet> blocked, candidates;
    for (const auto& m : models_) {
      for (const auto& site : m.sites) {
        if (site_done(site)) continue;
        const bool later = has_later(m, site);
        for (std::size_t c = 0; c < site.keys.size(); ++c) {
          if (later) {
            blocked.insert(site.keys[c]);
          } else if (!site.rows[c]) {
            candidates.insert(site.keys[c]);
          }
        }
      }
    }
    std::set<InformationSet> out;
    for (const auto& k : candidates) {
      if (!blocked.contains(k)) out.insert(k);
    }
    return out;
  }

  // One application of the final decision assignment operator.
  void assign_final() {
    const auto finals = structural_finals();
    if (finals.empty()) {
      if (done()) return;
      throw Error(ErrorCode::kPerfectRecallViolation,
                  agent_ + " at " + node_ + ": undecided decisions remain but no information set is final");
    }
    ++pass_;
    std::vector<Tables> exact(models_.size()), relaxed(models_.size());
    for (std::size_t mi = 0; mi < models_.size(); ++mi) exact[mi] = tables(mi, false);
    std::vector<bool> relaxed_ready(models_.size(), false);

    for (const auto& key : finals) {
      RsRecord rec{0, pass_, node_, agent_, key, 0, std::vector<double>(key.actions.size(), 0.0), RsBasis::kDefault, {}};
      for (const bool relax : {false, true}) {
        for (std::size_t mi = 0; mi < models_.size(); ++mi) {
          if (relax && !relaxed_ready[mi]) {
            relaxed[mi] = tables(mi, true);
            relaxed_ready[mi] = true;
          }
          const auto& t = relax ? relaxed[mi] : exact[mi];
          bool used = false;
          for (std::size_t si = 0; si < models_[mi].sites.size(); ++si) {
            const auto& site = models_[mi].sites[si];
            for (std::size_t c = 0; c < site.keys.size(); ++c) {
              if (site.keys[c] != key || site.rows[c]) continue;
              const auto& joint = t.joint[si][c];
              double mass = 0.0;
              for (double p : joint) mass += p;
              if (mass <= 0.0) continue;
              for (std::size_t a = 0; a < joint.size(); ++a) {
                rec.values[a] += models_[mi].weight * t.util[si][c][a] / joint[a];
              }
              used = true;
            }
          }
          if (used) rec.models.push_back(models_[mi].id);
        }
        if (!rec.models.empty()) {
          rec.basis = relax ? RsBasis::kRelaxed : RsBasis::kBelief;
          break;
        }
      }
      for (std::size_t a = 1; a < rec.values.size(); ++a) {
        if (rec.values[a] > rec.values[rec.action] + kTieTolerance) rec.action = a;
      }
      policy_[key] = point_mass(key.actions.size(), rec.action);
      trace_.push_back(std::move(rec));
    }

    for (auto& m : models_) {
      for (auto& site : m.sites) {
        for (std::size_t c = 0; c < site.keys.size(); ++c) {
          if (!site.rows[c] && finals.contains(site.keys[c])) site.rows[c] = policy_.at(site.keys[c]);
        }
        if (site_done(site) && !m.copy.xi.contains(site.decision)) {
          DecisionRule rule{site.decision, m.copy.model.parents(site.decision), {}};
          for (const auto& r : site.rows) rule.rows.push_back(*r);
          m.copy.xi[site.decision] = std::move(rule);
        }
      }
    }
  }

  void solve() {
    while (!done()) assign_final();
  }

  const IiPolicy& policy() const { return policy_; }
  const std::vector<RsRecord>& trace() const { return trace_; }

  // Believed models with every fully assigned decision written into xi.
  std::vector<SubjectiveMaid> models() const {
    std::vector<SubjectiveMaid> out;
    for (const auto& m : models_) out.push_back(m.copy);
    return out;
  }

 private:
  struct Site {
    std::string decision;
    std::vector<InformationSet> keys;  // per context
    std::vector<std::optional<std::vector<double>>> rows;
  };
  struct Model {
    std::string id;
    double weight = 0.0;
    SubjectiveMaid copy;
    std::vector<Site> sites;
  };
  // [site][context][action]: probability of (context, action) with the site
  // uniform at undecided contexts, and that times the agent's utility.
  struct Tables {
    std::vector<std::vector<std::vector<double>>> joint, util;
  };

  static bool site_done(const Site& s) {
    return std::all_of(s.rows.begin(), s.rows.end(), [](const auto& r) { return r.has_value(); });
  }

  bool has_later(const Model& m, const Site& site) const {
    for (const auto& other : m.sites) {
      if (&other == &site || site_done(other)) continue;
      const auto& pa = m.copy.model.parents(other.decision);
      if (std::find(pa.begin(), pa.end(), site.decision) != pa.end()) return true;
    }
    return false;
  }

  Tables tables(std::size_t mi, bool relax) const {
    const Model& m = models_[mi];
    PolicyProfile fixed;
    if (!relax) fixed = m.copy.xi;
    for (const auto& [d, rule] : m.copy.xi) {
      if (m.copy.model.variable(d).owner == agent_) fixed[d] = rule;
    }
    MaidEvaluator eval(m.copy.model, fixed);
    auto& net = eval.net();
    std::vector<int> nodes;
    for (const auto& site : m.sites) {
      const int node = net.index_of(site.decision);
      nodes.push_back(node);
      for (std::size_t c = 0; c < site.rows.size(); ++c) {
        if (site.rows[c]) net.set_row(node, static_cast<int>(c), *site.rows[c]);
      }
    }
    std::vector<int> utils;
    for (const auto& u : m.copy.model.utilities_of(agent_)) utils.push_back(net.index_of(u));
    Tables t;
    for (const auto& site : m.sites) {
      std::vector<std::vector<double>> zero(site.keys.size(), std::vector<double>(site.keys[0].actions.size(), 0.0));
      t.joint.push_back(zero);
      t.util.push_back(zero);
    }
    net.enumerate([&](const std::vector<int>& a, double p) {
      double u = 0.0;
      for (int k : utils) u += net.node(k).values[static_cast<std::size_t>(a[static_cast<std::size_t>(k)])];
      for (std::size_t si = 0; si < nodes.size(); ++si) {
        const auto c = static_cast<std::size_t>(net.context_of(nodes[si], a));
        const auto act = static_cast<std::size_t>(a[static_cast<std::size_t>(nodes[si])]);
        t.joint[si][c][act] += p;
        t.util[si][c][act] += p * u;
      }
    });
    return t;
  }

  std::string node_;
  std::string agent_;
  std::vector<Model> models_;
  IiPolicy policy_;
  std::vector<RsRecord> trace_;
  int pass_ = 0;
};

// Final information sets of `agent` at `node` that some believed model can
// encounter. `node` must hold beliefs for `agent` over depth-0 models only.
inline std::set<InformationSet> final_information_sets(const DepthStack& stack, const std::string& node,
                                                       const std::string& agent) {
  DepthOneSolver solver(stack, node, agent);
  std::set<InformationSet> reachable;
  const auto& row = stack.game().model(node).beliefs.at(agent);
  for (const auto& t : internal::positive_targets(row)) {
    const auto sets = encounterable_sets(stack.game().model(t), agent);
    reachable.insert(sets.begin(), sets.end());
  }
  std::set<InformationSet> out;
  for (const auto& k : solver.structural_finals()) {
    if (reachable.contains(k)) out.insert(k);
  }
  return out;
}

struct FinalAssignment {
  DepthStack stack;
  std::vector<RsRecord> records;
};

// One pass of the final decision assignment, written into the believed
// depth-0 models themselves. Only decisions whose every context was assigned
// can be stored as rules.
inline FinalAssignment final_decision_assignment(const DepthStack& stack, const std::string& node,
                                                 const std::string& agent) {
  const auto open = is_open_minded(stack);
  if (!open.holds) {
    const auto& v = open.violations.front();
    throw Error(ErrorCode::kNotOpenMinded, v.node + ": " + v.info.to_string());
  }
  DepthOneSolver solver(stack, node, agent);
  solver.assign_final();
  std::vector<SubjectiveMaid> models;
  std::map<std::string, SubjectiveMaid> updated;
  for (auto& m : solver.models()) updated.emplace(m.id, std::move(m));
  for (const auto& [id, s] : stack.game().models()) {
    auto it = updated.find(id);
    models.push_back(it == updated.end() ? s : it->second);
  }
  return {DepthStack(IiMaid(stack.game().agents(), stack.game().objective(), std::move(models))),
          solver.trace()};
}

struct Br1Result {
  IiPolicy policy;
  std::vector<RsRecord> trace;
};

inline Br1Result br1(const DepthStack& stack, const std::string& node, const std::string& agent) {
  const auto open = is_open_minded(stack);
  if (!open.holds) {
    const auto& v = open.violations.front();
    throw Error(ErrorCode::kNotOpenMinded, v.node + ": " + v.info.to_string());
  }
  DepthOneSolver solver(stack, node, agent);
  solver.solve();
  return {solver.policy(), solver.trace()};
}

struct ReduceResult {
  DepthStack stack;
  std::vector<RsRecord> trace;
};

// Replaces every belief that points only at depth-0 models by the believer's
// depth-1 best response, written into that node's xi. Every node of depth
// d >= 1 ends at depth d - 1.
//
// Open-mindedness is a property of the input. Rules fixed by earlier
// reductions can make a context impossible in a believed model but not in
// the believer's own, so later stages skip the check and rely on the
// relaxed fallback for such contexts.
inline ReduceResult reduce_stack(const DepthStack& stack, int step = 1, bool check_open_minded = true) {
  if (stack.depth() < 1) throw Error(ErrorCode::kDepthContractViolation, "a depth-0 stack cannot be reduced");
  const auto open = check_open_minded ? is_open_minded(stack) : OpenMindedness{};
  if (!open.holds) {
    const auto& v = open.violations.front();
    throw Error(ErrorCode::kNotOpenMinded, v.node + ": " + v.agent + " cannot encounter " + v.info.to_string());
  }
  const IiMaid& x = stack.game();
  std::vector<RsRecord> trace;
  std::vector<SubjectiveMaid> models;
  for (const auto& [id, s] : x.models()) {
    SubjectiveMaid next = s;
    for (const auto& [agent, row] : s.beliefs) {
      const auto targets = internal::positive_targets(row);
      const bool shallow = std::all_of(targets.begin(), targets.end(),
                                       [&](const std::string& t) { return stack.depth_of(t) == 0; });
      if (!shallow) continue;
      DepthOneSolver solver(stack, id, agent);
      solver.solve();
      for (auto rec : solver.trace()) {
        rec.step = step;
        trace.push_back(std::move(rec));
      }
      const auto& policy = solver.policy();
      for (const auto& d : s.post_policy().free_decisions_of(agent)) {
        DecisionRule rule{d, s.model.parents(d), {}};
        for (std::size_t c = 0; c < s.model.context_count(d); ++c) {
          const auto key = infoset_at(s.model, d, s.model.context_at(d, c));
          auto it = policy.find(key);
          if (it != policy.end()) {
            rule.rows.push_back(it->second);
            continue;
          }
          rule.rows.push_back(point_mass(key.actions.size(), 0));
          trace.push_back({step, 0, id, agent, key, 0, std::vector<double>(key.actions.size(), 0.0),
                           RsBasis::kDefault, {}});
        }
        next.xi[d] = std::move(rule);
      }
      next.beliefs.erase(agent);
    }
    if (next.depth && *next.depth > 0) --*next.depth;
    models.push_back(std::move(next));
  }
  return {DepthStack(IiMaid(x.agents(), x.objective(), std::move(models))), std::move(trace)};
}

// Rules of a node's xi keyed by information set.
inline IiPolicyProfile xi_profile(const SubjectiveMaid& s) {
  IiPolicyProfile out;
  for (const auto& [d, rule] : s.xi) {
    const auto& owner = s.model.variable(d).owner;
    for (std::size_t c = 0; c < rule.rows.size(); ++c) {
      out[owner][infoset_at(s.model, d, s.model.context_at(d, c))] = rule.rows[c];
    }
  }
  return out;
}

struct RbrResult {
  IiPolicyProfile profile;    // the objective's xi after k reductions
  IiPolicyProfile projected;  // every information set of the input stack
  std::vector<RsRecord> trace;
  std::vector<DepthStack> stages;  // stages[0] is the input, stages[k] fully reduced
};

// Projection: the objective's rule where it has one, otherwise the first
// node (by id) that fixed the set, otherwise the lexicographically least
// action.
inline RbrResult recursive_best_response(const DepthStack& stack) {
  RbrResult out;
  out.stages.push_back(stack);
  const int k = stack.depth();
  for (int step = 1; step <= k; ++step) {
    auto r = reduce_stack(out.stages.back(), step, step == 1);
    out.trace.insert(out.trace.end(), r.trace.begin(), r.trace.end());
    out.stages.push_back(std::move(r.stack));
  }
  const IiMaid& last = out.stages.back().game();
  out.profile = xi_profile(last.model(last.objective()));
  out.projected = out.profile;
  for (const auto& [id, s] : last.models()) {
    for (const auto& [agent, rules] : xi_profile(s)) {
      for (const auto& [key, row] : rules) out.projected[agent].emplace(key, row);
    }
  }
  for (const auto& agent : stack.game().agents()) {
    for (const auto& key : information_sets(stack.game(), agent)) {
      out.projected[agent].emplace(key, point_mass(key.actions.size(), 0));
    }
  }
  return out;
}

// Bounded unrolling of a general II-MAID into a depth-k stack. The root is
// the objective; an agent's belief at level l < k points at that agent's
// copies of the believed models at level l + 1. At level k every agent other
// than the owner is fixed to uniform rules. Node ids are "<model>/<agent>/<level>".
inline DepthStack unroll_to_depth(const IiMaid& x, int k) {
  if (k < 0) throw Error(ErrorCode::kDepthContractViolation, "negative depth");
  std::map<std::string, SubjectiveMaid> nodes;
  auto name = [](const std::string& id, const std::string& agent, int level) {
    return id + "/" + agent + "/" + std::to_string(level);
  };
  std::function<std::string(const std::string&, const std::optional<std::string>&, int)> build =
      [&](const std::string& id, const std::optional<std::string>& owner, int level) -> std::string {
    const std::string node_id = owner ? name(id, *owner, level) : id;
    if (nodes.contains(node_id)) return node_id;
    const auto& src = x.model(id);
    SubjectiveMaid s{node_id, src.model, src.xi, {}, std::nullopt};
    nodes.emplace(node_id, s);
    for (const auto& agent : s.model.agents()) {
      if (owner && agent == *owner) continue;
      if (!internal::has_free_decisions(s, agent)) continue;
      if (level == k) {
        for (const auto& d : s.post_policy().free_decisions_of(agent)) s.xi[d] = uniform_rule(s.model, d);
        continue;
      }
      BeliefRow row;
      for (const auto& [t, p] : x.beliefs_of(agent, id)) row[build(t, agent, level + 1)] += p;
      s.beliefs[agent] = std::move(row);
    }
    nodes[node_id] = std::move(s);
    return node_id;
  };
  build(x.objective(), std::nullopt, 0);
  std::vector<SubjectiveMaid> models;
  for (auto& [id, s] : nodes) models.push_back(std::move(s));
  return DepthStack(IiMaid(x.agents(), x.objective(), std::move(models)));
}

}  // namespace iimaid
