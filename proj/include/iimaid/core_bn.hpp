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

// Discrete Bayesian networks: variables, conditional probability tables,
// exact inference by enumeration and ancestral sampling.
//
// Domains are kept in strictly increasing lexicographic order, so the index of
// an outcome is also its rank. Every iteration in this library (outcomes,
// parent contexts, variables) follows that order, which makes tie-breaking
// reproducible.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iimaid/error.hpp"

namespace iimaid {

using Assignment = std::map<std::string, std::string>;

struct Variable {
  std::string name;
  std::vector<std::string> domain;
  // Real value per outcome; non-empty only for utility variables.
  std::vector<double> utility_values;

  bool is_utility() const { return !utility_values.empty(); }

  std::optional<int> index_of(const std::string& outcome) const {
    auto it = std::lower_bound(domain.begin(), domain.end(), outcome);
    if (it == domain.end() || *it != outcome) return std::nullopt;
    return static_cast<int>(it - domain.begin());
  }

  friend bool operator==(const Variable&, const Variable&) = default;
};

// Conditional probability table. Rows are indexed by the parent context in
// mixed-radix order over `parents` (first parent varies slowest); each row is
// a distribution over the child's domain.
struct Cpd {
  std::string child;
  std::vector<std::string> parents;
  std::vector<std::vector<double>> rows;

  friend bool operator==(const Cpd&, const Cpd&) = default;
};

struct BayesNet {
  std::map<std::string, Variable> variables;
  std::map<std::string, Cpd> cpds;

  const Variable& variable(const std::string& name) const {
    auto it = variables.find(name);
    if (it == variables.end()) throw Error(ErrorCode::kUnknownVariable, name);
    return it->second;
  }

  friend bool operator==(const BayesNet&, const BayesNet&) = default;
};

struct ValidationError {
  ErrorCode code;
  std::string where;
  std::string message;
};

// Number of parent contexts, i.e. |dom(parents)|.
inline std::size_t context_count(const std::vector<const Variable*>& parents) {
  std::size_t n = 1;
  for (const Variable* p : parents) n *= p->domain.size();
  return n;
}

// The context with the given mixed-radix index.
inline Assignment context_at(const std::vector<const Variable*>& parents, std::size_t index) {
  Assignment ctx;
  for (auto it = parents.rbegin(); it != parents.rend(); ++it) {
    const auto size = (*it)->domain.size();
    ctx[(*it)->name] = (*it)->domain[index % size];
    index /= size;
  }
  return ctx;
}

// Mixed-radix index of a context; throws if an outcome is missing or unknown.
inline std::size_t context_index(const std::vector<const Variable*>& parents, const Assignment& ctx) {
  std::size_t index = 0;
  for (const Variable* p : parents) {
    auto it = ctx.find(p->name);
    if (it == ctx.end()) throw Error(ErrorCode::kPartialAssignment, "context lacks " + p->name);
    auto value = p->index_of(it->second);
    if (!value) throw Error(ErrorCode::kUnknownOutcome, p->name + "=" + it->second);
    index = index * p->domain.size() + static_cast<std::size_t>(*value);
  }
  return index;
}

inline std::vector<const Variable*> parent_variables(const BayesNet& net, const Cpd& cpd) {
  std::vector<const Variable*> out;
  out.reserve(cpd.parents.size());
  for (const auto& p : cpd.parents) out.push_back(&net.variable(p));
  return out;
}

inline bool row_is_normalized(const std::vector<double>& row, double tol = kTolerance) {
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= -tol && v <= 1.0 + tol)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

inline bool domain_is_canonical(const std::vector<std::string>& domain) {
  for (std::size_t i = 1; i < domain.size(); ++i) {
    if (!(domain[i - 1] < domain[i])) return false;
  }
  return true;
}

// Kahn's algorithm over a child -> parents map, ties broken by name.
inline std::vector<std::string> topological_order(
    const std::map<std::string, std::vector<std::string>>& parents) {
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& [child, ps] : parents) {
    indegree.try_emplace(child, 0);
    for (const auto& p : ps) {
      if (!parents.contains(p)) throw Error(ErrorCode::kDanglingParent, child + " <- " + p);
      indegree[child] += 1;
      children[p].push_back(child);
    }
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [name, d] : indegree) {
    if (d == 0) ready.push(name);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string next = ready.top();
    ready.pop();
    order.push_back(next);
    for (const auto& c : children[next]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != parents.size()) {
    std::string members;
    for (const auto& [name, d] : indegree) {
      if (d > 0) members += (members.empty() ? "" : ", ") + name;
    }
    throw Error(ErrorCode::kCycleDetected, "cycle among {" + members + "}");
  }
  return order;
}

inline std::vector<std::string> topological_order(const BayesNet& net) {
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& [name, v] : net.variables) {
    auto it = net.cpds.find(name);
    parents[name] = it == net.cpds.end() ? std::vector<std::string>{} : it->second.parents;
  }
  return topological_order(parents);
}

inline std::vector<ValidationError> validate_net(const BayesNet& net) {
  std::vector<ValidationError> errors;
  auto add = [&](ErrorCode code, std::string where, std::string message) {
    errors.push_back({code, std::move(where), std::move(message)});
  };
  for (const auto& [name, v] : net.variables) {
    if (v.name != name) add(ErrorCode::kInvalidModel, name, "variable keyed under a different name");
    if (v.domain.empty()) add(ErrorCode::kInvalidDomain, name, "empty domain");
    if (!domain_is_canonical(v.domain)) {
      add(ErrorCode::kInvalidDomain, name, "domain must be unique and lexicographically sorted");
    }
    if (v.is_utility() && v.utility_values.size() != v.domain.size()) {
      add(ErrorCode::kInvalidDomain, name, "utility values do not match domain");
    }
    if (!net.cpds.contains(name)) add(ErrorCode::kMissingCpd, name, "no CPD");
  }
  bool structural_ok = true;
  for (const auto& [name, cpd] : net.cpds) {
    if (!net.variables.contains(name) || cpd.child != name) {
      add(ErrorCode::kUnknownVariable, name, "CPD for unknown variable");
      structural_ok = false;
      continue;
    }
    std::set<std::string> seen;
    for (const auto& p : cpd.parents) {
      if (!net.variables.contains(p)) {
        add(ErrorCode::kDanglingParent, name, "unknown parent " + p);
        structural_ok = false;
      }
      if (!seen.insert(p).second) {
        add(ErrorCode::kInvalidModel, name, "duplicate parent " + p);
        structural_ok = false;
      }
    }
  }
  if (!structural_ok) return errors;
  for (const auto& [name, cpd] : net.cpds) {
    const auto& child = net.variables.at(name);
    const auto expected_rows = context_count(parent_variables(net, cpd));
    if (cpd.rows.size() != expected_rows) {
      add(ErrorCode::kInvalidModel, name,
          "expected " + std::to_string(expected_rows) + " rows, got " + std::to_string(cpd.rows.size()));
      continue;
    }
    for (std::size_t r = 0; r < cpd.rows.size(); ++r) {
      const auto& row = cpd.rows[r];
      const std::string where = name + "[row " + std::to_string(r) + "]";
      if (row.size() != child.domain.size()) {
        add(ErrorCode::kInvalidModel, where, "row width does not match domain");
      } else if (!row_is_normalized(row)) {
        add(ErrorCode::kRowNotNormalized, where, "row must lie in [0,1] and sum to 1");
      }
    }
  }
  try {
    topological_order(net);
  } catch (const Error& e) {
    add(e.code(), "net", e.what());
  }
  return errors;
}

inline void require_valid(const BayesNet& net) {
  auto errors = validate_net(net);
  if (!errors.empty()) throw Error(errors.front().code, errors.front().where + ": " + errors.front().message);
}

// Index-based form of a network used by every enumeration in the library.
// Variables are stored in topological order.
class CompiledNet {
 public:
  struct Node {
    std::string name;
    int size = 0;
    std::vector<int> parents;
    std::vector<int> strides;
    std::vector<double> table;  // row-major: context * size + outcome
    std::vector<double> values;
  };

  CompiledNet() = default;

  explicit CompiledNet(const BayesNet& net) {
    require_valid(net);
    const auto order = topological_order(net);
    for (std::size_t i = 0; i < order.size(); ++i) index_[order[i]] = static_cast<int>(i);
    nodes_.reserve(order.size());
    for (const auto& name : order) {
      const Variable& v = net.variables.at(name);
      const Cpd& cpd = net.cpds.at(name);
      Node node;
      node.name = name;
      node.size = static_cast<int>(v.domain.size());
      node.values = v.utility_values;
      int stride = 1;
      node.parents.resize(cpd.parents.size());
      node.strides.resize(cpd.parents.size());
      for (std::size_t k = cpd.parents.size(); k-- > 0;) {
        node.parents[k] = index_.at(cpd.parents[k]);
        node.strides[k] = stride;
        stride *= static_cast<int>(net.variables.at(cpd.parents[k]).domain.size());
      }
      node.table.reserve(cpd.rows.size() * v.domain.size());
      for (const auto& row : cpd.rows) node.table.insert(node.table.end(), row.begin(), row.end());
      nodes_.push_back(std::move(node));
    }
  }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorCode::kUnknownVariable, name);
    return it->second;
  }
  bool contains(const std::string& name) const { return index_.contains(name); }

  int context_of(int v, const std::vector<int>& assignment) const {
    const Node& n = nodes_[static_cast<std::size_t>(v)];
    int row = 0;
    for (std::size_t k = 0; k < n.parents.size(); ++k) {
      row += assignment[static_cast<std::size_t>(n.parents[k])] * n.strides[k];
    }
    return row;
  }

  double probability(int v, int context, int outcome) const {
    const Node& n = nodes_[static_cast<std::size_t>(v)];
    return n.table[static_cast<std::size_t>(context * n.size + outcome)];
  }

  // Replaces the full table of one variable (rows concatenated).
  void set_table(int v, std::vector<double> table) { nodes_[static_cast<std::size_t>(v)].table = std::move(table); }

  void set_row(int v, int context, const std::vector<double>& row) {
    Node& n = nodes_[static_cast<std::size_t>(v)];
    std::copy(row.begin(), row.end(), n.table.begin() + context * n.size);
  }

  // Calls f(assignment, probability) for every full assignment with positive
  // probability that agrees with `evidence` (entries of -1 are free).
  template <class F>
  void enumerate(const std::vector<int>& evidence, F&& f) const {
    std::vector<int> assignment(nodes_.size(), 0);
    enumerate_from(0, 1.0, evidence, assignment, f);
  }

  template <class F>
  void enumerate(F&& f) const {
    enumerate(std::vector<int>(nodes_.size(), -1), std::forward<F>(f));
  }

  std::vector<int> sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<int> assignment(nodes_.size(), 0);
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      const Node& n = nodes_[v];
      const int ctx = context_of(static_cast<int>(v), assignment);
      const double u = unit(rng);
      double acc = 0.0;
      int pick = -1;
      for (int o = 0; o < n.size; ++o) {
        const double p = n.table[static_cast<std::size_t>(ctx * n.size + o)];
        if (p <= 0.0) continue;
        acc += p;
        pick = o;
        if (u < acc) break;
      }
      assignment[v] = pick;
    }
    return assignment;
  }

 private:
  template <class F>
  void enumerate_from(std::size_t v, double prob, const std::vector<int>& evidence,
                      std::vector<int>& assignment, F& f) const {
    if (v == nodes_.size()) {
      f(static_cast<const std::vector<int>&>(assignment), prob);
      return;
    }
    const Node& n = nodes_[v];
    const int ctx = context_of(static_cast<int>(v), assignment);
    const int lo = evidence[v] >= 0 ? evidence[v] : 0;
    const int hi = evidence[v] >= 0 ? evidence[v] + 1 : n.size;
    for (int o = lo; o < hi; ++o) {
      const double p = n.table[static_cast<std::size_t>(ctx * n.size + o)];
      if (p <= 0.0) continue;
      assignment[v] = o;
      enumerate_from(v + 1, prob * p, evidence, assignment, f);
    }
  }

  std::vector<Node> nodes_;
  std::map<std::string, int> index_;
};

inline std::vector<int> to_indices(const BayesNet& net, const CompiledNet& compiled, const Assignment& a,
                                   bool require_full) {
  std::vector<int> out(compiled.size(), -1);
  for (const auto& [name, value] : a) {
    const Variable& v = net.variable(name);
    auto idx = v.index_of(value);
    if (!idx) throw Error(ErrorCode::kUnknownOutcome, name + "=" + value);
    out[static_cast<std::size_t>(compiled.index_of(name))] = *idx;
  }
  if (require_full) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i] < 0) throw Error(ErrorCode::kPartialAssignment, "missing " + compiled.node(static_cast<int>(i)).name);
    }
  }
  return out;
}

// Chain-rule product of CPD entries for a full assignment.
inline double joint_probability(const BayesNet& net, const Assignment& a) {
  CompiledNet compiled(net);
  const auto idx = to_indices(net, compiled, a, /*require_full=*/true);
  double p = 1.0;
  for (std::size_t v = 0; v < compiled.size(); ++v) {
    p *= compiled.probability(static_cast<int>(v), compiled.context_of(static_cast<int>(v), idx), idx[v]);
  }
  return p;
}

// Joint distribution over `variables`; cells keyed by outcome tuples in the
// order of `variables`.
struct DistributionTable {
  std::vector<std::string> variables;
  std::map<std::vector<std::string>, double> cells;

  double at(const std::vector<std::string>& key) const {
    auto it = cells.find(key);
    return it == cells.end() ? 0.0 : it->second;
  }
};

inline DistributionTable marginal(const BayesNet& net, const std::vector<std::string>& target,
                                  const Assignment& evidence) {
  CompiledNet compiled(net);
  const auto ev = to_indices(net, compiled, evidence, /*require_full=*/false);
  std::vector<int> target_idx;
  std::vector<const Variable*> target_vars;
  for (const auto& t : target) {
    target_idx.push_back(compiled.index_of(t));
    target_vars.push_back(&net.variable(t));
  }
  DistributionTable out;
  out.variables = target;
  // Every cell of the target domain is present, zeros included.
  const auto cells = context_count(target_vars);
  for (std::size_t c = 0; c < cells; ++c) {
    auto ctx = context_at(target_vars, c);
    std::vector<std::string> key;
    for (const auto& t : target) key.push_back(ctx.at(t));
    out.cells[key] = 0.0;
  }
  double total = 0.0;
  compiled.enumerate(ev, [&](const std::vector<int>& a, double p) {
    std::vector<std::string> key;
    key.reserve(target_idx.size());
    for (std::size_t k = 0; k < target_idx.size(); ++k) {
      key.push_back(target_vars[k]->domain[static_cast<std::size_t>(a[static_cast<std::size_t>(target_idx[k])])]);
    }
    out.cells[key] += p;
    total += p;
  });
  if (total <= 0.0) throw Error(ErrorCode::kZeroProbabilityEvidence, "evidence has probability 0");
  for (auto& [key, p] : out.cells) p /= total;
  return out;
}

inline Assignment from_indices(const BayesNet& net, const CompiledNet& compiled, const std::vector<int>& a) {
  Assignment out;
  for (std::size_t v = 0; v < compiled.size(); ++v) {
    const auto& name = compiled.node(static_cast<int>(v)).name;
    out[name] = net.variable(name).domain[static_cast<std::size_t>(a[v])];
  }
  return out;
}

// One ancestral sample; identical seeds give identical assignments.
inline Assignment sample(const BayesNet& net, std::uint64_t seed) {
  CompiledNet compiled(net);
  std::mt19937_64 rng(seed);
  return from_indices(net, compiled, compiled.sample(rng));
}

inline std::vector<Assignment> sample_n(const BayesNet& net, std::size_t n, std::uint64_t seed) {
  CompiledNet compiled(net);
  std::mt19937_64 rng(seed);
  std::vector<Assignment> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(from_indices(net, compiled, compiled.sample(rng)));
  return out;
}

}  // namespace iimaid
