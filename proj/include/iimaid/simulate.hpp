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

// Seeded ancestral rollouts of a MAID under fixed decision rules.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "iimaid/maid.hpp"

namespace iimaid {

struct AgentEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  double exact = 0.0;
};

struct SimulationReport {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::map<std::string, AgentEstimate> agents;

  // |mean - exact| <= sigmas * stderr, with a floor for zero-variance games.
  bool within(double sigmas, double floor = kTolerance) const {
    for (const auto& [a, e] : agents) {
      if (std::abs(e.mean - e.exact) > sigmas * e.stderr_ + floor) return false;
    }
    return true;
  }
};

inline SimulationReport simulate(const Maid& m, const PolicyProfile& rules, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kBadFlag, "need at least one rollout");
  MaidEvaluator eval(m, rules);
  const CompiledNet& net = eval.net();
  std::map<std::string, std::vector<int>> utilities;
  for (const auto& agent : m.agents()) {
    for (const auto& u : m.utilities_of(agent)) utilities[agent].push_back(net.index_of(u));
  }
  // Welford accumulation per agent.
  std::map<std::string, std::pair<double, double>> acc;
  for (const auto& agent : m.agents()) acc[agent] = {0.0, 0.0};
  std::mt19937_64 rng(seed);
  for (std::size_t k = 1; k <= n; ++k) {
    const auto a = net.sample(rng);
    for (auto& [agent, ms] : acc) {
      double total = 0.0;
      for (int u : utilities[agent]) total += net.node(u).values[static_cast<std::size_t>(a[static_cast<std::size_t>(u)])];
      const double delta = total - ms.first;
      ms.first += delta / static_cast<double>(k);
      ms.second += delta * (total - ms.first);
    }
  }
  SimulationReport out{n, seed, {}};
  const auto exact = eval.expected_utilities();
  for (const auto& [agent, ms] : acc) {
    const double var = n > 1 ? ms.second / static_cast<double>(n - 1) : 0.0;
    out.agents[agent] = {ms.first, std::sqrt(var / static_cast<double>(n)), exact.at(agent)};
  }
  return out;
}

}  // namespace iimaid
