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

// Games in extensive form with incomplete information: a finite belief space
// whose states pick game trees, meta-information sets, interim utilities and
// the conversion from II-MAIDs.

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iimaid/efg.hpp"
#include "iimaid/error.hpp"
#include "iimaid/ii_maid.hpp"

namespace iimaid {

struct BeliefSpace {
  std::vector<std::string> states;
  std::vector<std::size_t> game;  // state -> index into IiEfg::games
  // agent -> [state][state'] = b_i(state' | state)
  std::map<std::string, std::vector<std::vector<double>>> beliefs;
};

struct IiEfg {
  std::vector<std::string> agents;  // sorted
  std::vector<Efg> games;
  BeliefSpace space;
  std::size_t interim = 0;  // the designated state

  std::size_t state_index(const std::string& id) const {
    auto it = std::find(space.states.begin(), space.states.end(), id);
    if (it == space.states.end()) throw Error(ErrorCode::kUnknownReference, "state " + id);
    return static_cast<std::size_t>(it - space.states.begin());
  }

  void validate() const {
    const auto n = space.states.size();
    if (n == 0) throw Error(ErrorCode::kInvalidModel, "empty belief space");
    if (interim >= n) throw Error(ErrorCode::kUnknownReference, "interim state");
    if (space.game.size() != n) throw Error(ErrorCode::kInvalidModel, "every state needs a game");
    for (auto g : space.game) {
      if (g >= games.size()) throw Error(ErrorCode::kUnknownReference, "game index");
    }
    for (const auto& g : games) {
      g.validate();
      for (const auto& a : g.agents) {
        if (!std::binary_search(agents.begin(), agents.end(), a)) throw Error(ErrorCode::kUnknownAgent, a);
      }
    }
    for (const auto& agent : agents) {
      auto it = space.beliefs.find(agent);
      if (it == space.beliefs.end() || it->second.size() != n) {
        throw Error(ErrorCode::kInvalidModel, "belief matrix of " + agent);
      }
      for (const auto& row : it->second) {
        if (row.size() != n || !row_is_normalized(row)) throw Error(ErrorCode::kRowNotNormalized, "beliefs of " + agent);
      }
    }
  }
};

inline bool rows_equal(const std::vector<double>& a, const std::vector<double>& b, double tol = kTolerance) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > tol) return false;
  }
  return true;
}

// b_i({w' : b_i(w') = b_i(w)} | w) = 1 for every agent and state.
inline bool is_coherent(const IiEfg& g) {
  for (const auto& [agent, b] : g.space.beliefs) {
    for (std::size_t w = 0; w < b.size(); ++w) {
      double mass = 0.0;
      for (std::size_t v = 0; v < b.size(); ++v) {
        if (rows_equal(b[v], b[w])) mass += b[w][v];
      }
      if (mass < 1.0 - kTolerance) return false;
    }
  }
  return true;
}

// Equivalence class of an agent's information sets across the trees: same
// actions and same positional observation.
struct BfKey {
  std::vector<std::string> actions;
  Observation observation;

  auto operator<=>(const BfKey&) const = default;
};

struct MetaInformationSet {
  std::string agent;
  int bf_class = 0;
  int type = 0;
  BfKey key;
};

// Derived indexing shared by every computation on one IiEfg.
struct MetaStructure {
  // agent -> state -> type id (types numbered by first appearance)
  std::map<std::string, std::vector<int>> type_of;
  std::map<std::string, int> type_count;
  // agent -> class id -> key
  std::map<std::string, std::vector<BfKey>> classes;
  // [game][infoset] -> class id within the owning agent
  std::vector<std::vector<int>> class_of;

  explicit MetaStructure(const IiEfg& g) {
    for (const auto& agent : g.agents) {
      const auto& b = g.space.beliefs.at(agent);
      std::vector<std::size_t> reps;
      auto& types = type_of[agent];
      for (std::size_t w = 0; w < b.size(); ++w) {
        int t = -1;
        for (std::size_t r = 0; r < reps.size() && t < 0; ++r) {
          if (rows_equal(b[reps[r]], b[w])) t = static_cast<int>(r);
        }
        if (t < 0) {
          t = static_cast<int>(reps.size());
          reps.push_back(w);
        }
        types.push_back(t);
      }
      type_count[agent] = static_cast<int>(reps.size());
      classes[agent];
    }
    std::map<std::string, std::map<BfKey, int>> ids;
    for (const auto& game : g.games) {
      auto& row = class_of.emplace_back();
      for (std::size_t k = 0; k < game.infosets.size(); ++k) {
        const auto& agent = game.infosets[k].agent;
        BfKey key{game.infosets[k].actions, observation_of(game, static_cast<int>(k))};
        auto [it, inserted] = ids[agent].try_emplace(key, static_cast<int>(classes[agent].size()));
        if (inserted) classes[agent].push_back(key);
        row.push_back(it->second);
      }
    }
  }
};

inline std::vector<MetaInformationSet> meta_information_sets(const IiEfg& g, const std::string& agent,
                                                             std::optional<int> only_type = std::nullopt) {
  const MetaStructure ms(g);
  if (!ms.classes.contains(agent)) throw Error(ErrorCode::kUnknownAgent, agent);
  std::vector<MetaInformationSet> out;
  for (int t = 0; t < ms.type_count.at(agent); ++t) {
    if (only_type && *only_type != t) continue;
    const auto& keys = ms.classes.at(agent);
    for (std::size_t c = 0; c < keys.size(); ++c) out.push_back({agent, static_cast<int>(c), t, keys[c]});
  }
  return out;
}

// Behaviour strategy keyed by (agent, type, class), so strategies cannot
// differ between states where an agent has the same type.
struct IiStrategy {
  std::map<std::string, std::vector<std::vector<std::vector<double>>>> rows;  // agent -> type -> class -> row

  static IiStrategy uniform(const MetaStructure& ms) {
    IiStrategy s;
    for (const auto& [agent, keys] : ms.classes) {
      auto& per_type = s.rows[agent];
      per_type.resize(static_cast<std::size_t>(ms.type_count.at(agent)));
      for (auto& classes : per_type) {
        for (const auto& k : keys) {
          classes.emplace_back(k.actions.size(), 1.0 / static_cast<double>(k.actions.size()));
        }
      }
    }
    return s;
  }

  friend bool operator==(const IiStrategy&, const IiStrategy&) = default;
};

// The per-tree strategy induced at state w.
inline Strategy strategy_at(const IiEfg& g, const MetaStructure& ms, const IiStrategy& s, std::size_t w) {
  const auto gi = g.space.game[w];
  const Efg& game = g.games[gi];
  Strategy out;
  for (std::size_t k = 0; k < game.infosets.size(); ++k) {
    const auto& agent = game.infosets[k].agent;
    auto it = s.rows.find(agent);
    if (it == s.rows.end()) throw Error(ErrorCode::kMissingInfoSetRule, "no strategy for " + agent);
    const auto t = static_cast<std::size_t>(ms.type_of.at(agent)[w]);
    const auto c = static_cast<std::size_t>(ms.class_of[gi][k]);
    if (t >= it->second.size() || c >= it->second[t].size()) {
      throw Error(ErrorCode::kMissingInfoSetRule, "no rule for a meta-information set of " + agent);
    }
    out.push_back(it->second[t][c]);
  }
  return out;
}

// gamma_i(s | w) = sum_w' b_i(w' | w) U_i^{game(w')}(s^{w'}). With `restricted`
// the sum runs only over states where the agent has its type at w.
inline double interim_utility(const IiEfg& g, const MetaStructure& ms, const IiStrategy& s, const std::string& agent,
                              std::size_t w, bool restricted = false) {
  const auto& b = g.space.beliefs.at(agent);
  const auto& types = ms.type_of.at(agent);
  double total = 0.0;
  for (std::size_t v = 0; v < b[w].size(); ++v) {
    const double p = b[w][v];
    if (p <= 0.0) continue;
    if (restricted && types[v] != types[w]) continue;
    const Efg& game = g.games[g.space.game[v]];
    if (!std::binary_search(game.agents.begin(), game.agents.end(), agent)) continue;
    total += p * efg_expected_utility(game, strategy_at(g, ms, s, v), agent);
  }
  return total;
}

inline double interim_utility(const IiEfg& g, const IiStrategy& s, const std::string& agent, std::size_t w,
                              bool restricted = false) {
  return interim_utility(g, MetaStructure(g), s, agent, w, restricted);
}

// Pure deviations of each agent over the classes met in trees it believes
// possible, at its type in state w.
inline NashReport is_interim_nash(const IiEfg& g, const IiStrategy& s, std::size_t w, double tol = kTolerance,
                                  double cap = kDefaultSearchCap) {
  const MetaStructure ms(g);
  NashReport out;
  out.is_nash = true;
  for (const auto& agent : g.agents) {
    const double v = interim_utility(g, ms, s, agent, w);
    const auto t = static_cast<std::size_t>(ms.type_of.at(agent)[w]);
    std::set<int> relevant;
    const auto& b = g.space.beliefs.at(agent)[w];
    for (std::size_t u = 0; u < b.size(); ++u) {
      if (b[u] <= 0.0) continue;
      const auto gi = g.space.game[u];
      for (std::size_t k = 0; k < g.games[gi].infosets.size(); ++k) {
        if (g.games[gi].infosets[k].agent == agent) relevant.insert(ms.class_of[gi][k]);
      }
    }
    const std::vector<int> classes(relevant.begin(), relevant.end());
    std::vector<int> radix;
    for (int c : classes) radix.push_back(static_cast<int>(ms.classes.at(agent)[static_cast<std::size_t>(c)].actions.size()));
    if (count_of(radix) > cap) throw Error(ErrorCode::kSearchSpaceTooLarge, "deviations of " + agent);
    IiStrategy dev = s;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> digits(classes.size(), 0);
    do {
      for (std::size_t k = 0; k < classes.size(); ++k) {
        dev.rows[agent][t][static_cast<std::size_t>(classes[k])] =
            point_mass(static_cast<std::size_t>(radix[k]), static_cast<std::size_t>(digits[k]));
      }
      best = std::max(best, interim_utility(g, ms, dev, agent, w));
    } while (next_digits(digits, radix));
    out.values[agent] = v;
    out.regrets[agent] = best - v;
    if (best > v + tol) out.is_nash = false;
  }
  return out;
}

inline bool is_bayesian_equilibrium(const IiEfg& g, const IiStrategy& s, double tol = kTolerance) {
  for (std::size_t w = 0; w < g.space.states.size(); ++w) {
    if (!is_interim_nash(g, s, w, tol).is_nash) return false;
  }
  return true;
}

// Result of converting an II-MAID: the game, the per-model tree conversions
// and, per agent, the information set -> class correspondence.
struct IiEfgConversion {
  IiEfg game;
  std::vector<EfgConversion> trees;  // parallel to game.games
  std::map<std::string, std::map<InformationSet, int>> correspondence;
  bool bijective = true;
};

inline IiEfgConversion maid2efgII(const IiMaid& x) {
  IiEfgConversion out;
  IiEfg& g = out.game;
  g.agents = x.agents();
  for (const auto& [id, s] : x.models()) {
    if (!s.xi.empty()) throw Error(ErrorCode::kInvalidModel, "conversion needs models without fixed rules: " + id);
    g.space.states.push_back(id);
    g.space.game.push_back(out.trees.size());
    out.trees.push_back(maid2efg(s.model));
    g.games.push_back(out.trees.back().game);
  }
  const auto n = g.space.states.size();
  for (const auto& agent : g.agents) {
    auto& b = g.space.beliefs[agent];
    b.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t w = 0; w < n; ++w) {
      for (const auto& [target, p] : x.beliefs_of(agent, g.space.states[w])) b[w][g.state_index(target)] = p;
    }
  }
  g.interim = g.state_index(x.objective());
  g.validate();

  const MetaStructure ms(g);
  for (const auto& agent : g.agents) out.correspondence[agent];
  for (std::size_t gi = 0; gi < out.trees.size(); ++gi) {
    const auto& model = x.model(g.space.states[gi]).model;
    const auto& conv = out.trees[gi];
    for (std::size_t k = 0; k < conv.infoset_context.size(); ++k) {
      const auto& ctx = conv.infoset_context[k];
      const auto key = infoset_at(model, ctx.decision, ctx.parents);
      const int cls = ms.class_of[gi][k];
      auto [it, inserted] = out.correspondence[key.agent].try_emplace(key, cls);
      if (!inserted && it->second != cls) out.bijective = false;
    }
  }
  for (const auto& [agent, corr] : out.correspondence) {
    std::set<int> image;
    for (const auto& [key, cls] : corr) image.insert(cls);
    if (image.size() != corr.size() || image.size() != ms.classes.at(agent).size()) out.bijective = false;
  }
  return out;
}

// Copies each information-set rule to its class, identically for every type.
inline IiStrategy map_policy(const IiEfgConversion& conv, const IiPolicyProfile& p) {
  const MetaStructure ms(conv.game);
  IiStrategy s = IiStrategy::uniform(ms);
  for (const auto& [agent, corr] : conv.correspondence) {
    auto pa = p.find(agent);
    for (const auto& [key, cls] : corr) {
      if (pa == p.end() || !pa->second.contains(key)) {
        throw Error(ErrorCode::kMissingInfoSetRule, key.to_string());
      }
      const auto& row = pa->second.at(key);
      IiEvaluator::check_row(key, row);
      for (auto& per_type : s.rows[agent]) per_type[static_cast<std::size_t>(cls)] = row;
    }
  }
  return s;
}

struct EquivalenceReport {
  bool holds = true;
  double max_deviation = 0.0;
  std::size_t profiles = 0;
};

// |U^i(pi) - gamma_i(f(pi) | w*)| for every profile and agent.
inline EquivalenceReport verify_equivalence(const IiMaid& x, const IiEfgConversion& conv,
                                            const std::vector<IiPolicyProfile>& profiles, double tol = kTolerance) {
  EquivalenceReport out;
  const MetaStructure ms(conv.game);
  IiEvaluator eval(x);
  for (const auto& p : profiles) {
    eval.load(p);
    const IiStrategy s = map_policy(conv, p);
    for (const auto& agent : x.agents()) {
      const double lhs = eval.value(agent, x.beliefs_of(agent, x.objective()));
      const double rhs = interim_utility(conv.game, ms, s, agent, conv.game.interim);
      out.max_deviation = std::max(out.max_deviation, std::abs(lhs - rhs));
    }
    ++out.profiles;
  }
  out.holds = out.max_deviation <= tol;
  return out;
}

}  // namespace iimaid
