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

#include "iimaid/maid.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

namespace iimaid {
namespace {

using namespace testing;  // NOLINT

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kInvalidModel;
}

// Two simultaneous binary choices, zero-sum payoffs of +-1.
Maid matching_pennies() {
  const Variable a = var("D_1", {"heads", "tails"});
  const Variable b = var("D_2", {"heads", "tails"});
  const Variable u1 = utility("U_1", {"-1", "1"});
  const Variable u2 = utility("U_2", {"-1", "1"});
  auto same = [](const Assignment& x) { return x.at("D_1") == x.at("D_2"); };
  return Maid({"P1", "P2"},
              {{a, VariableKind::kDecision, "P1", {}},
               {b, VariableKind::kDecision, "P2", {}},
               {u1, VariableKind::kUtility, "P1", {}},
               {u2, VariableKind::kUtility, "P2", {}}},
              {deterministic_cpd(u1, {&a, &b}, [&](const Assignment& x) { return same(x) ? "1" : "-1"; }),
               deterministic_cpd(u2, {&a, &b}, [&](const Assignment& x) { return same(x) ? "-1" : "1"; })});
}

// Naive oracle: expected utility by summing the joint over every full
// assignment of the induced network.
double brute_eu(const Maid& m, const PolicyProfile& p, const std::string& agent) {
  const BayesNet net = m.induced_network(p);
  std::vector<const Variable*> all;
  for (const auto& [name, v] : net.variables) all.push_back(&v);
  double eu = 0.0;
  for (std::size_t c = 0; c < context_count(all); ++c) {
    const auto a = context_at(all, c);
    const double pr = joint_probability(net, a);
    for (const auto& u : m.utilities_of(agent)) {
      const auto& v = net.variable(u);
      eu += pr * v.utility_values[static_cast<std::size_t>(*v.index_of(a.at(u)))];
    }
  }
  return eu;
}

TEST(MaidTest, ConstructionRejectsUtilityWithChildren) {
  const Variable x = var("X", {"a", "b"});
  const Variable u = utility("U", {"0", "1"});
  EXPECT_EQ(code_of([&] {
              Maid({"A"}, {{u, VariableKind::kUtility, "A", {}}, {x, VariableKind::kChance, "", {}}},
                   {Cpd{"U", {}, {{0.5, 0.5}}}, Cpd{"X", {"U"}, {{1, 0}, {0, 1}}}});
            }),
            ErrorCode::kInvalidModel);
}

TEST(MaidTest, ConstructionRejectsUnknownOwnerAndCycles) {
  const Variable d = var("D", {"a", "b"});
  EXPECT_EQ(code_of([&] { Maid({"A"}, {{d, VariableKind::kDecision, "B", {}}}, {}); }), ErrorCode::kUnknownAgent);
  const Variable x = var("X", {"a", "b"});
  EXPECT_EQ(code_of([&] {
              Maid({"A"}, {{d, VariableKind::kDecision, "A", {"X"}}, {x, VariableKind::kChance, "", {}}},
                   {Cpd{"X", {"D"}, {{1, 0}, {0, 1}}}});
            }),
            ErrorCode::kCycleDetected);
}

TEST(MaidTest, InducedNetwork) {
  const Maid m = honest_maid();
  const BayesNet net = induced_network(m, profile({truthful(m), deploy_iff_match(m)}));
  EXPECT_NEAR(joint_probability(net, {{"C", "high"}, {"D_A", "high"}, {"D_H", "deploy"}, {"U_A", "1"}, {"U_H", "1"}}),
              0.1, 1e-12);
  EXPECT_EQ(code_of([&] { induced_network(m, profile({truthful(m)})); }), ErrorCode::kMissingRule);
}

TEST(MaidTest, ZeroDecisionNetworkIsTheta) {
  const Maid m({"A"}, {{kC, VariableKind::kChance, "", {}}}, {prior_c()});
  const BayesNet net = induced_network(m, {});
  EXPECT_EQ(net.cpds.at("C"), prior_c());
  EXPECT_EQ(net.cpds.size(), 1u);
}

TEST(MaidTest, ExpectedUtilities) {
  const Maid m = honest_maid();
  const auto honest = profile({truthful(m), deploy_iff_match(m)});
  const auto lying = profile({always_low(m), deploy_iff_match(m)});
  EXPECT_NEAR(expected_utility(m, honest, "A"), 1.0, 1e-12);
  EXPECT_NEAR(expected_utility(m, honest, "H"), 1.0, 1e-12);
  EXPECT_NEAR(expected_utility(m, lying, "A"), 0.9 * 1 + 0.1 * -1, 1e-12);
  EXPECT_NEAR(expected_utility(m, lying, "H"), 0.9 * 1 + 0.1 * 0, 1e-12);
  EXPECT_EQ(code_of([&] { expected_utility(m, honest, "Z"); }), ErrorCode::kUnknownAgent);

  const Maid spectator({"A", "B"}, {{kC, VariableKind::kChance, "", {}}}, {prior_c()});
  EXPECT_EQ(expected_utility(spectator, {}, "B"), 0.0);
}

TEST(MaidTest, ExpectedUtilityMatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const Maid& m : {honest_maid(), capability_maid()}) {
    for (int trial = 0; trial < 20; ++trial) {
      PolicyProfile p;
      for (const auto& d : m.decisions()) {
        p[d] = rule_from(m, d, [&](const Assignment&) {
          const double x = unit(rng);
          return std::vector<double>{x, 1.0 - x};
        });
      }
      for (const auto& agent : m.agents()) EXPECT_NEAR(expected_utility(m, p, agent), brute_eu(m, p, agent), 1e-12);
    }
  }
}

TEST(MaidTest, ExpectedUtilityMatchesMonteCarlo) {
  const Maid m = honest_maid();
  const auto p = profile({uniform_rule(m, "D_A"), deploy_iff_match(m)});
  const auto samples = sample_n(m.induced_network(p), 100000, 11);
  double mean_h = 0.0;
  for (const auto& s : samples) mean_h += std::stod(s.at("U_H")) / samples.size();
  EXPECT_NEAR(mean_h, expected_utility(m, p, "H"), 0.02);
}

TEST(MaidTest, BestResponseOfReporter) {
  const Maid m = honest_maid();
  const auto br = best_response(m, profile({deploy_iff_match(m)}), "A");
  EXPECT_NEAR(br.value, 1.0, 1e-12);
  EXPECT_EQ(br.policy.at("D_A"), truthful(m));
}

TEST(MaidTest, BestResponseOfDeployerInCapabilityModel) {
  const Maid m = capability_maid();
  const auto br = best_response(m, profile({always_low(m)}), "H");
  // Report "high" never happens, so both actions tie there and the least
  // label ("deploy") is kept.
  EXPECT_NEAR(br.value, 0.9 * 1 + 0.1 * -5, 1e-12);
  const auto& rule = br.policy.at("D_H");
  EXPECT_EQ(rule.rows[1], (std::vector<double>{1.0, 0.0}));  // D_A = low
  EXPECT_EQ(rule.rows[0], (std::vector<double>{1.0, 0.0}));  // D_A = high, tie
}

TEST(MaidTest, BestResponseSingleAgentIsPerContextArgmax) {
  const Variable d = var("D", {"a", "b", "c"});
  const Variable u = utility("U", {"0", "2", "5"});
  const Maid m({"A"},
               {{kC, VariableKind::kChance, "", {}}, {d, VariableKind::kDecision, "A", {"C"}},
                {u, VariableKind::kUtility, "A", {}}},
               {prior_c(), deterministic_cpd(u, {&kC, &d}, [](const Assignment& x) -> std::string {
                  if (x.at("C") == "high") return x.at("D") == "c" ? "5" : "0";
                  return x.at("D") == "a" ? "2" : "0";
                })});
  const auto br = best_response(m, {}, "A");
  EXPECT_EQ(br.policy.at("D").rows, (std::vector<std::vector<double>>{{0, 0, 1}, {1, 0, 0}}));
  EXPECT_NEAR(br.value, 0.1 * 5 + 0.9 * 2, 1e-12);
}

TEST(MaidTest, BestResponseDominatesEveryPurePolicy) {
  const Maid m = honest_maid();
  const auto others = profile({always_low(m)});
  const auto br = best_response(m, others, "H");
  const auto slots = policy_slots(m, {"D_H"});
  std::vector<int> radix(slots.size(), 2), digits(slots.size(), 0);
  do {
    auto p = others;
    p.merge(pure_policy_from(m, slots, digits));
    EXPECT_GE(br.value + 1e-12, expected_utility(m, p, "H"));
  } while (next_digits(digits, radix));
}

TEST(MaidTest, SearchCap) {
  const Maid m = honest_maid();
  EXPECT_EQ(code_of([&] { best_response(m, profile({always_low(m)}), "H", 8); }), ErrorCode::kSearchSpaceTooLarge);
  EXPECT_NO_THROW(best_response(m, profile({always_low(m)}), "H", 16));
}

TEST(MaidTest, NashChecks) {
  const Maid mh = honest_maid();
  const Maid ma = capability_maid();
  auto r = is_nash(mh, profile({truthful(mh), deploy_iff_match(mh)}));
  EXPECT_TRUE(r.is_nash);
  EXPECT_LT(r.regrets["A"], 1e-9);
  EXPECT_LT(r.regrets["H"], 1e-9);
  EXPECT_TRUE(is_nash(ma, profile({always_low(ma), deploy_iff_low(ma)})).is_nash);
  r = is_nash(mh, profile({always_low(mh), deploy_iff_match(mh)}));
  EXPECT_FALSE(r.is_nash);
  EXPECT_NEAR(r.regrets["A"], 1.0 - 0.8, 1e-9);
}

TEST(MaidTest, NashInvariantUnderAffineUtilityChange) {
  const Maid m = honest_maid();
  auto vars = std::vector<MaidVariable>();
  for (auto [name, v] : m.variables()) {
    if (name == "U_H") {
      for (auto& x : v.variable.utility_values) x = 3.0 * x + 7.0;
    }
    vars.push_back(v);
  }
  std::vector<Cpd> cpds;
  for (const auto& [name, c] : m.cpds()) cpds.push_back(c);
  const Maid scaled(m.agents(), vars, cpds);
  const auto slots = policy_slots(m, {"D_A", "D_H"});
  std::vector<int> radix(slots.size(), 2), digits(slots.size(), 0);
  do {
    const auto p = pure_policy_from(m, slots, digits);
    EXPECT_EQ(is_nash(m, p, 1e-9).is_nash, is_nash(scaled, p, 3e-9).is_nash);
  } while (next_digits(digits, radix));
}

TEST(MaidTest, FindPureNash) {
  const Maid m = honest_maid();
  const auto all = find_pure_nash(m);
  const auto target = profile({truthful(m), deploy_iff_match(m)});
  EXPECT_NE(std::find(all.begin(), all.end(), target), all.end());
  for (const auto& p : all) EXPECT_TRUE(is_nash(m, p).is_nash);

  const Maid empty({"A"}, {{kC, VariableKind::kChance, "", {}}}, {prior_c()});
  EXPECT_EQ(find_pure_nash(empty), std::vector<PolicyProfile>{PolicyProfile{}});

  EXPECT_TRUE(find_pure_nash(matching_pennies()).empty());
}

TEST(MaidTest, RejectedProfilesHavePositiveRegret) {
  const Maid m = capability_maid();
  const auto nash = find_pure_nash(m);
  const auto slots = policy_slots(m, {"D_A", "D_H"});
  std::vector<int> radix(slots.size(), 2), digits(slots.size(), 0);
  do {
    const auto p = pure_policy_from(m, slots, digits);
    if (std::find(nash.begin(), nash.end(), p) != nash.end()) continue;
    const auto r = is_nash(m, p);
    EXPECT_GT(std::max(r.regrets.at("A"), r.regrets.at("H")), 0.0);
  } while (next_digits(digits, radix));
}

TEST(MaidTest, PerfectRecall) {
  EXPECT_TRUE(has_perfect_recall(honest_maid(), "A").holds);
  EXPECT_TRUE(has_perfect_recall(honest_maid(), "H").holds);

  const Variable d1 = var("D1", {"a", "b"});
  const Variable d2 = var("D2", {"a", "b"});
  const Variable x = var("X", {"a", "b"});
  const Variable y = var("Y", {"a", "b"});
  const Maid chain({"A"},
                   {{kC, VariableKind::kChance, "", {}},
                    {d1, VariableKind::kDecision, "A", {"C"}},
                    {d2, VariableKind::kDecision, "A", {"C", "D1"}}},
                   {prior_c()});
  const auto r = has_perfect_recall(chain, "A");
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.ordering, (std::vector<std::string>{"D1", "D2"}));

  const Maid split({"A"},
                   {{x, VariableKind::kChance, "", {}},
                    {y, VariableKind::kChance, "", {}},
                    {d1, VariableKind::kDecision, "A", {"X"}},
                    {d2, VariableKind::kDecision, "A", {"Y"}}},
                   {Cpd{"X", {}, {{0.5, 0.5}}}, Cpd{"Y", {}, {{0.5, 0.5}}}});
  EXPECT_FALSE(has_perfect_recall(split, "A").holds);
}

}  // namespace
}  // namespace iimaid
