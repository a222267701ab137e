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

// Graphviz DOT exports: MAID graphs, game trees and bounded belief trees.

#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "iimaid/efg.hpp"
#include "iimaid/ii_maid.hpp"
#include "iimaid/io.hpp"
#include "iimaid/maid.hpp"

namespace iimaid {

namespace internal {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string_view node_shape(VariableKind k) {
  switch (k) {
    case VariableKind::kChance: return "ellipse";
    case VariableKind::kDecision: return "box";
    case VariableKind::kUtility: return "diamond";
  }
  return "ellipse";
}

// Nodes and edges of `m` with ids prefixed by `prefix`; information links
// are dashed.
inline void write_maid_body(std::ostream& out, const Maid& m, const std::string& prefix, const std::string& indent) {
  for (const auto& [name, v] : m.variables()) {
    std::string label = name;
    if (!v.owner.empty()) label += " (" + v.owner + ")";
    out << indent << dot_quote(prefix + name) << " [label=" << dot_quote(label) << ", shape=" << node_shape(v.kind)
        << "];\n";
  }
  for (const auto& [from, to] : m.edges()) {
    out << indent << dot_quote(prefix + from) << " -> " << dot_quote(prefix + to);
    if (m.kind(to) == VariableKind::kDecision) out << " [style=dashed]";
    out << ";\n";
  }
}

}  // namespace internal

inline std::string maid_to_dot(const Maid& m) {
  std::ostringstream out;
  out << "digraph " << internal::dot_quote(m.name().empty() ? "maid" : m.name()) << " {\n";
  internal::write_maid_body(out, m, "", "  ");
  out << "}\n";
  return out.str();
}

// Decision nodes of one information set share a dashed cluster.
inline std::string efg_to_dot(const Efg& g) {
  using internal::dot_quote;
  std::ostringstream out;
  out << "digraph efg {\n";
  auto id = [](std::size_t v) { return "n" + std::to_string(v); };
  std::vector<bool> grouped(g.nodes.size(), false);
  for (std::size_t k = 0; k < g.infosets.size(); ++k) {
    const auto& set = g.infosets[k];
    out << "  subgraph cluster_info" << k << " {\n    style=dashed;\n    label=" << dot_quote(set.agent) << ";\n";
    for (int v : set.nodes) {
      grouped[static_cast<std::size_t>(v)] = true;
      const auto& n = g.nodes[static_cast<std::size_t>(v)];
      out << "    " << id(static_cast<std::size_t>(v)) << " [label=" << dot_quote(n.variable) << ", shape=box];\n";
    }
    out << "  }\n";
  }
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    if (grouped[v]) continue;
    const auto& n = g.nodes[v];
    if (n.kind == EfgNodeKind::kLeaf) {
      std::string label;
      for (std::size_t i = 0; i < n.payoffs.size(); ++i) {
        label += (i ? ", " : "") + g.agents[i] + "=" + io::format_decimal(n.payoffs[i]);
      }
      out << "  " << id(v) << " [label=" << dot_quote(label) << ", shape=plaintext];\n";
    } else {
      out << "  " << id(v) << " [label=" << dot_quote(n.variable) << ", shape=ellipse];\n";
    }
  }
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const auto& n = g.nodes[v];
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      std::string label = n.actions[k];
      if (n.kind == EfgNodeKind::kChance) label += " (" + io::format_decimal(n.chance_probs[k]) + ")";
      out << "  " << id(v) << " -> " << id(static_cast<std::size_t>(n.children[k])) << " [label=" << dot_quote(label)
          << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

// Unrolls the belief graph from the objective for `depth` levels. Each tree
// node is a cluster holding its subjective MAID; an edge to a child is
// labelled with the believing agent and the probability.
inline std::string belief_tree_to_dot(const IiMaid& x, int depth) {
  using internal::dot_quote;
  if (depth < 0) throw Error(ErrorCode::kBadFlag, "depth must be non-negative");
  struct TreeNode {
    std::string model;
    int parent = -1;
    std::string agent;
    double p = 1.0;
    int level = 0;
  };
  std::vector<TreeNode> tree{{x.objective(), -1, "", 1.0, 0}};
  for (std::size_t k = 0; k < tree.size(); ++k) {
    if (tree[k].level == depth) continue;
    for (const auto& agent : x.agents()) {
      if (!x.model(tree[k].model).model.has_agent(agent)) continue;
      for (const auto& [target, p] : x.beliefs_of(agent, tree[k].model)) {
        tree.push_back({target, static_cast<int>(k), agent, p, tree[k].level + 1});
      }
    }
  }
  std::ostringstream out;
  out << "digraph beliefs {\n  compound=true;\n";
  auto anchor = [&](std::size_t k) {
    const auto& vars = x.model(tree[k].model).model.variables();
    return dot_quote("t" + std::to_string(k) + "/" + vars.begin()->first);
  };
  for (std::size_t k = 0; k < tree.size(); ++k) {
    out << "  subgraph cluster_t" << k << " {\n    label=" << dot_quote(tree[k].model) << ";\n";
    internal::write_maid_body(out, x.model(tree[k].model).model, "t" + std::to_string(k) + "/", "    ");
    out << "  }\n";
  }
  for (std::size_t k = 1; k < tree.size(); ++k) {
    const auto parent = static_cast<std::size_t>(tree[k].parent);
    out << "  " << anchor(parent) << " -> " << anchor(k) << " [ltail=cluster_t" << parent << ", lhead=cluster_t" << k
        << ", label=" << dot_quote(tree[k].agent + ": " + io::format_decimal(tree[k].p)) << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace iimaid
