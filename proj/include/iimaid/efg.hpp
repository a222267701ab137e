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

// Extensive-form games and the conversion from a MAID to a game tree.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iimaid/error.hpp"
#include "iimaid/maid.hpp"

namespace iimaid {

enum class EfgNodeKind { kChance, kDecision, kLeaf };

struct EfgNode {
  EfgNodeKind kind = EfgNodeKind::kLeaf;
  int parent = -1;
  std::string player;    // decision nodes
  std::string variable;  // variable expanded here, when built from a MAID
  std::vector<int> children;
  std::vector<std::string> actions;  // edge labels, parallel to children
  std::vector<double> chance_probs;  // chance nodes, parallel to children
  int infoset = -1;                  // decision nodes
  std::vector<double> payoffs;       // leaves, indexed like Efg::agents
};

struct InfoSet {
  std::string agent;
  std::vector<int> nodes;
  std::vector<std::string> actions;
};

// Node 0 is the root.
struct Efg {
  std::vector<std::string> agents;  // sorted
  std::vector<EfgNode> nodes;
  std::vector<InfoSet> infosets;

  int agent_index(const std::string& agent) const {
    auto it = std::lower_bound(agents.begin(), agents.end(), agent);
    if (it == agents.end() || *it != agent) throw Error(ErrorCode::kUnknownAgent, agent);
    return static_cast<int>(it - agents.begin());
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (nodes[v].kind == EfgNodeKind::kLeaf) out.push_back(static_cast<int>(v));
    }
    return out;
  }

  std::vector<int> infosets_of(const std::string& agent) const {
    std::vector<int> out;
    for (std::size_t k = 0; k < infosets.size(); ++k) {
      if (infosets[k].agent == agent) out.push_back(static_cast<int>(k));
    }
    return out;
  }

  // (variable, label) pairs along the path from the root to `node`.
  std::vector<std::pair<std::string, std::string>> history(int node) const {
    std::vector<std::pair<std::string, std::string>> out;
    for (int v = node; nodes[static_cast<std::size_t>(v)].parent >= 0; v = nodes[static_cast<std::size_t>(v)].parent) {
      const auto& p = nodes[static_cast<std::size_t>(nodes[static_cast<std::size_t>(v)].parent)];
      const auto pos = std::find(p.children.begin(), p.children.end(), v) - p.children.begin();
      out.emplace_back(p.variable, p.actions[static_cast<std::size_t>(pos)]);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  void validate() const {
    if (nodes.empty()) throw Error(ErrorCode::kInvalidModel, "game tree has no root");
    if (!std::is_sorted(agents.begin(), agents.end())) throw Error(ErrorCode::kInvalidModel, "agents must be sorted");
    if (nodes[0].parent != -1) throw Error(ErrorCode::kInvalidModel, "root has a parent");
    std::vector<int> seen(nodes.size(), 0);
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      const auto& n = nodes[v];
      const std::string where = "node " + std::to_string(v);
      if (n.actions.size() != n.children.size()) throw Error(ErrorCode::kInvalidModel, where + ": unlabelled edge");
      std::set<std::string> labels(n.actions.begin(), n.actions.end());
      if (labels.size() != n.actions.size()) throw Error(ErrorCode::kInvalidModel, where + ": repeated edge label");
      for (int c : n.children) {
        if (c <= 0 || static_cast<std::size_t>(c) >= nodes.size() || nodes[static_cast<std::size_t>(c)].parent != static_cast<int>(v)) {
          throw Error(ErrorCode::kInvalidModel, where + ": child does not point back");
        }
        if (++seen[static_cast<std::size_t>(c)] > 1) throw Error(ErrorCode::kInvalidModel, "node reached twice");
      }
      switch (n.kind) {
        case EfgNodeKind::kLeaf:
          if (!n.children.empty()) throw Error(ErrorCode::kInvalidModel, where + ": leaf with children");
          if (n.payoffs.size() != agents.size()) throw Error(ErrorCode::kInvalidModel, where + ": payoff width");
          break;
        case EfgNodeKind::kChance:
          if (n.children.empty()) throw Error(ErrorCode::kInvalidModel, where + ": chance node without children");
          if (n.chance_probs.size() != n.children.size() || !row_is_normalized(n.chance_probs)) {
            throw Error(ErrorCode::kRowNotNormalized, where);
          }
          break;
        case EfgNodeKind::kDecision: {
          if (n.children.empty()) throw Error(ErrorCode::kInvalidModel, where + ": decision without actions");
          if (n.infoset < 0 || static_cast<std::size_t>(n.infoset) >= infosets.size()) {
            throw Error(ErrorCode::kInvalidModel, where + ": no information set");
          }
          const auto& set = infosets[static_cast<std::size_t>(n.infoset)];
          if (set.agent != n.player) throw Error(ErrorCode::kInvalidModel, where + ": information set of another agent");
          if (set.actions != n.actions) throw Error(ErrorCode::kInvalidModel, where + ": action set differs from its information set");
          if (std::find(set.nodes.begin(), set.nodes.end(), static_cast<int>(v)) == set.nodes.end()) {
            throw Error(ErrorCode::kInvalidModel, where + ": missing from its information set");
          }
          agent_index(n.player);
          break;
        }
      }
    }
    for (std::size_t v = 1; v < nodes.size(); ++v) {
      if (seen[v] != 1) throw Error(ErrorCode::kInvalidModel, "node " + std::to_string(v) + " unreachable");
    }
    for (std::size_t k = 0; k < infosets.size(); ++k) {
      if (infosets[k].nodes.empty()) throw Error(ErrorCode::kInvalidModel, "empty information set");
      for (int v : infosets[k].nodes) {
        if (nodes[static_cast<std::size_t>(v)].infoset != static_cast<int>(k)) {
          throw Error(ErrorCode::kInvalidModel, "information set lists a foreign node");
        }
      }
    }
  }
};

// One distribution per information set, indexed like Efg::infosets.
using Strategy = std::vector<std::vector<double>>;

inline Strategy uniform_strategy(const Efg& g) {
  Strategy s;
  for (const auto& set : g.infosets) {
    s.emplace_back(set.actions.size(), 1.0 / static_cast<double>(set.actions.size()));
  }
  return s;
}

// Reach probability of every leaf under `s`.
inline std::vector<std::pair<int, double>> leaf_probabilities(const Efg& g, const Strategy& s) {
  if (s.size() != g.infosets.size()) throw Error(ErrorCode::kMissingInfoSetRule, "strategy does not cover every information set");
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].size() != g.infosets[k].actions.size()) {
      throw Error(ErrorCode::kMissingInfoSetRule, "no rule for information set " + std::to_string(k));
    }
  }
  std::vector<std::pair<int, double>> out;
  std::vector<std::pair<int, double>> stack{{0, 1.0}};
  while (!stack.empty()) {
    auto [v, p] = stack.back();
    stack.pop_back();
    const auto& n = g.nodes[static_cast<std::size_t>(v)];
    if (n.kind == EfgNodeKind::kLeaf) {
      out.emplace_back(v, p);
      continue;
    }
    for (std::size_t k = n.children.size(); k-- > 0;) {
      const double q = n.kind == EfgNodeKind::kChance ? n.chance_probs[k] : s[static_cast<std::size_t>(n.infoset)][k];
      if (q > 0.0) stack.emplace_back(n.children[k], p * q);
    }
  }
  return out;
}

inline std::vector<double> efg_expected_utilities(const Efg& g, const Strategy& s) {
  std::vector<double> eu(g.agents.size(), 0.0);
  for (const auto& [leaf, p] : leaf_probabilities(g, s)) {
    const auto& payoffs = g.nodes[static_cast<std::size_t>(leaf)].payoffs;
    for (std::size_t i = 0; i < eu.size(); ++i) eu[i] += p * payoffs[i];
  }
  return eu;
}

inline double efg_expected_utility(const Efg& g, const Strategy& s, const std::string& agent) {
  return efg_expected_utilities(g, s)[static_cast<std::size_t>(g.agent_index(agent))];
}

struct ObservationItem {
  int position = 0;
  std::string variable;
  std::string symbol;

  auto operator<=>(const ObservationItem&) const = default;
};

// Positions at which all member histories of an information set agree.
using Observation = std::vector<ObservationItem>;

inline Observation observation_of(const Efg& g, int infoset) {
  const auto& members = g.infosets.at(static_cast<std::size_t>(infoset)).nodes;
  std::vector<std::vector<std::pair<std::string, std::string>>> histories;
  std::size_t shortest = std::numeric_limits<std::size_t>::max();
  for (int v : members) {
    histories.push_back(g.history(v));
    shortest = std::min(shortest, histories.back().size());
  }
  Observation out;
  for (std::size_t pos = 0; pos < shortest; ++pos) {
    bool agree = true;
    for (const auto& h : histories) agree = agree && h[pos] == histories.front()[pos];
    if (agree) out.push_back({static_cast<int>(pos), histories.front()[pos].first, histories.front()[pos].second});
  }
  return out;
}

// True iff every pair of nodes in one of the agent's information sets has the
// same sequence of (own information set, own action) pairs on its path.
inline bool has_perfect_recall_efg(const Efg& g, const std::string& agent) {
  auto own_sequence = [&](int node) {
    std::vector<std::pair<int, std::string>> seq;
    for (int v = node; g.nodes[static_cast<std::size_t>(v)].parent >= 0;) {
      const int p = g.nodes[static_cast<std::size_t>(v)].parent;
      const auto& pn = g.nodes[static_cast<std::size_t>(p)];
      if (pn.kind == EfgNodeKind::kDecision && pn.player == agent) {
        const auto pos = std::find(pn.children.begin(), pn.children.end(), v) - pn.children.begin();
        seq.emplace_back(pn.infoset, pn.actions[static_cast<std::size_t>(pos)]);
      }
      v = p;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  };
  for (int k : g.infosets_of(agent)) {
    const auto& members = g.infosets[static_cast<std::size_t>(k)].nodes;
    const auto first = own_sequence(members.front());
    for (std::size_t m = 1; m < members.size(); ++m) {
      if (own_sequence(members[m]) != first) return false;
    }
  }
  return true;
}

// Game tree together with the path instantiation of every node and, for every
// information set, the decision and parent context it stands for.
struct EfgConversion {
  Efg game;
  std::vector<Assignment> mu;
  struct Context {
    std::string decision;
    Assignment parents;
  };
  std::vector<Context> infoset_context;
  std::vector<std::string> order;
};

// Canonical expansion order: name-stable topological order without utilities.
inline std::vector<std::string> canonical_order(const Maid& m) {
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& [name, v] : m.variables()) parents[name] = m.parents(name);
  std::vector<std::string> out;
  for (const auto& name : topological_order(parents)) {
    if (m.kind(name) != VariableKind::kUtility) out.push_back(name);
  }
  return out;
}

inline EfgConversion maid2efg(const Maid& m, std::optional<std::vector<std::string>> order = std::nullopt) {
  EfgConversion out;
  out.order = order ? *order : canonical_order(m);
  {
    std::set<std::string> placed;
    for (const auto& name : out.order) {
      auto it = m.variables().find(name);
      if (it == m.variables().end()) throw Error(ErrorCode::kNonTopologicalOrder, "unknown variable " + name);
      if (it->second.kind == VariableKind::kUtility) {
        throw Error(ErrorCode::kNonTopologicalOrder, "utility variable " + name + " in order");
      }
      for (const auto& p : m.parents(name)) {
        if (!placed.contains(p)) throw Error(ErrorCode::kNonTopologicalOrder, name + " before its parent " + p);
      }
      if (!placed.insert(name).second) throw Error(ErrorCode::kNonTopologicalOrder, "repeated variable " + name);
    }
    for (const auto& [name, v] : m.variables()) {
      if (v.kind != VariableKind::kUtility && !placed.contains(name)) {
        throw Error(ErrorCode::kNonTopologicalOrder, "order omits " + name);
      }
    }
  }
  Efg& g = out.game;
  g.agents = m.agents();
  std::map<std::pair<std::string, std::size_t>, int> infoset_of;

  auto row_of = [&](const std::string& name, const Assignment& mu) -> const std::vector<double>& {
    const Cpd& cpd = m.cpds().at(name);
    return cpd.rows[context_index(m.parent_variables(name), mu)];
  };
  auto leaf_payoffs = [&](const Assignment& mu) {
    std::vector<double> payoffs;
    for (const auto& agent : g.agents) {
      double total = 0.0;
      for (const auto& u : m.utilities_of(agent)) {
        const auto& values = m.variable(u).variable.utility_values;
        const auto& row = row_of(u, mu);
        for (std::size_t k = 0; k < row.size(); ++k) total += row[k] * values[k];
      }
      payoffs.push_back(total);
    }
    return payoffs;
  };

  // Explicit stack of (node, depth); children are pushed in reverse so nodes
  // are numbered in depth-first, least-label-first order.
  g.nodes.push_back(EfgNode{});
  out.mu.push_back({});
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [v, depth] = stack.back();
    stack.pop_back();
    const Assignment mu = out.mu[static_cast<std::size_t>(v)];
    if (depth == out.order.size()) {
      g.nodes[static_cast<std::size_t>(v)].kind = EfgNodeKind::kLeaf;
      g.nodes[static_cast<std::size_t>(v)].payoffs = leaf_payoffs(mu);
      continue;
    }
    const std::string& name = out.order[depth];
    const auto& mv = m.variable(name);
    const auto& domain = mv.variable.domain;
    std::vector<std::pair<std::string, double>> branches;
    if (mv.kind == VariableKind::kChance) {
      const auto& row = row_of(name, mu);
      for (std::size_t k = 0; k < domain.size(); ++k) {
        if (row[k] > 0.0) branches.emplace_back(domain[k], row[k]);
      }
    } else {
      for (const auto& d : domain) branches.emplace_back(d, 0.0);
    }
    {
      EfgNode& node = g.nodes[static_cast<std::size_t>(v)];
      node.variable = name;
      if (mv.kind == VariableKind::kChance) {
        node.kind = EfgNodeKind::kChance;
      } else {
        node.kind = EfgNodeKind::kDecision;
        node.player = mv.owner;
        const auto ctx = context_index(m.parent_variables(name), mu);
        auto [it, inserted] = infoset_of.try_emplace({name, ctx}, static_cast<int>(g.infosets.size()));
        if (inserted) {
          g.infosets.push_back(InfoSet{mv.owner, {}, domain});
          Assignment pa;
          for (const auto& p : m.parents(name)) pa[p] = mu.at(p);
          out.infoset_context.push_back({name, pa});
        }
        node.infoset = it->second;
        g.infosets[static_cast<std::size_t>(it->second)].nodes.push_back(v);
      }
    }
    std::vector<int> created;
    for (const auto& [label, p] : branches) {
      const int child = static_cast<int>(g.nodes.size());
      EfgNode c;
      c.parent = v;
      g.nodes.push_back(std::move(c));
      Assignment child_mu = mu;
      child_mu[name] = label;
      out.mu.push_back(std::move(child_mu));
      EfgNode& node = g.nodes[static_cast<std::size_t>(v)];
      node.children.push_back(child);
      node.actions.push_back(label);
      if (mv.kind == VariableKind::kChance) node.chance_probs.push_back(p);
      created.push_back(child);
    }
    for (auto it = created.rbegin(); it != created.rend(); ++it) stack.emplace_back(*it, depth + 1);
  }
  // Node numbering above is breadth-mixed; renumber in depth-first preorder
  // so that sibling subtrees are contiguous.
  std::vector<int> preorder;
  std::vector<int> walk{0};
  while (!walk.empty()) {
    const int v = walk.back();
    walk.pop_back();
    preorder.push_back(v);
    const auto& ch = g.nodes[static_cast<std::size_t>(v)].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) walk.push_back(*it);
  }
  std::vector<int> rank(g.nodes.size());
  for (std::size_t k = 0; k < preorder.size(); ++k) rank[static_cast<std::size_t>(preorder[k])] = static_cast<int>(k);
  std::vector<EfgNode> nodes(g.nodes.size());
  std::vector<Assignment> mus(g.nodes.size());
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    EfgNode n = std::move(g.nodes[v]);
    if (n.parent >= 0) n.parent = rank[static_cast<std::size_t>(n.parent)];
    for (int& c : n.children) c = rank[static_cast<std::size_t>(c)];
    nodes[static_cast<std::size_t>(rank[v])] = std::move(n);
    mus[static_cast<std::size_t>(rank[v])] = std::move(out.mu[v]);
  }
  g.nodes = std::move(nodes);
  out.mu = std::move(mus);
  for (auto& set : g.infosets) {
    for (int& v : set.nodes) v = rank[static_cast<std::size_t>(v)];
    std::sort(set.nodes.begin(), set.nodes.end());
  }
  g.validate();
  return out;
}

// Copies every decision rule row into the matching information set.
inline Strategy strategy_from_policy(const Maid& m, const EfgConversion& conv, const PolicyProfile& p) {
  Strategy s;
  for (const auto& ctx : conv.infoset_context) {
    auto it = p.find(ctx.decision);
    if (it == p.end()) throw Error(ErrorCode::kContextMismatch, "no rule for decision " + ctx.decision);
    m.check_rule(it->second);
    s.push_back(it->second.rows[context_index(m.parent_variables(ctx.decision), ctx.parents)]);
  }
  return s;
}

}  // namespace iimaid
