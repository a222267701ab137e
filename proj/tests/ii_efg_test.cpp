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

#include "iimaid/ii_efg.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

namespace iimaid {
namespace {

using namespace testing;  // NOLINT

std::vector<IiPolicyProfile> all_pure(const IiMaid& x) {
  std::vector<IiPolicyProfile> out;
  PureIiProfiles(x).for_each([&](IiPolicyProfile p) {
    out.push_back(std::move(p));
    return true;
  });
  return out;
}

IiPolicyProfile random_mixed(const IiMaid& x, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return make_ii_profile(x, [&](const InformationSet& info) {
    std::vector<double> row(info.actions.size());
    double total = 0.0;
    for (auto& v : row) total += (v = unit(rng) + 1e-3);
    for (auto& v : row) v /= total;
    return row;
  });
}

TEST(IiEfgTest, ConversionOfEvaluationGame) {
  const IiMaid x = evaluation_game();
  const auto conv = maid2efgII(x);
  const auto& g = conv.game;
  EXPECT_EQ(g.space.states, (std::vector<std::string>{"S_A", "S_H"}));
  const auto star = g.state_index("S_H");
  const auto a = g.state_index("S_A");
  EXPECT_EQ(g.interim, star);
  EXPECT_EQ(g.space.beliefs.at("A")[star][a], 1.0);
  EXPECT_EQ(g.space.beliefs.at("H")[star][star], 1.0);
  EXPECT_TRUE(is_coherent(g));
  EXPECT_TRUE(conv.bijective);
  EXPECT_EQ(conv.correspondence.at("A").size(), 2u);
  EXPECT_EQ(conv.correspondence.at("H").size(), 6u);
  for (const auto& agent : x.agents()) {
    std::set<InformationSet> keys;
    for (const auto& [k, c] : conv.correspondence.at(agent)) keys.insert(k);
    EXPECT_EQ(keys, information_sets(x, agent));
  }
}

TEST(IiEfgTest, MetaInformationSets) {
  const auto conv = maid2efgII(evaluation_game());
  const MetaStructure ms(conv.game);
  const int h_star = ms.type_of.at("H")[conv.game.interim];
  const int a_star = ms.type_of.at("A")[conv.game.interim];
  EXPECT_EQ(meta_information_sets(conv.game, "H", h_star).size(), 6u);
  EXPECT_EQ(meta_information_sets(conv.game, "A", a_star).size(), 2u);
  EXPECT_EQ(ms.type_count.at("H"), 2);
  EXPECT_EQ(meta_information_sets(conv.game, "H").size(), 12u);

  const auto single = maid2efgII(embed(honest_maid()));
  EXPECT_EQ(meta_information_sets(single.game, "H").size(), single.game.games[0].infosets_of("H").size());
}

TEST(IiEfgTest, InterimUtilities) {
  const IiMaid x = evaluation_game();
  const auto conv = maid2efgII(x);
  const auto s = map_policy(conv, s6_profile(x));
  const auto w = conv.game.interim;
  EXPECT_NEAR(interim_utility(conv.game, s, "H", w), 0.9, 1e-12);
  EXPECT_NEAR(interim_utility(conv.game, s, "A", w), 0.0, 1e-12);

  // One tree with zero payoffs everywhere.
  const Variable d = var("D", {"a", "b"});
  const Variable u = utility("U", {"0"});
  const Maid flat({"A"}, {{d, VariableKind::kDecision, "A", {}}, {u, VariableKind::kUtility, "A", {}}},
                  {Cpd{"U", {"D"}, {{1.0}, {1.0}}}});
  const IiMaid fx = embed(flat);
  std::mt19937_64 rng(1);
  const auto fc = maid2efgII(fx);
  EXPECT_EQ(interim_utility(fc.game, map_policy(fc, random_mixed(fx, rng)), "A", 0), 0.0);
}

TEST(IiEfgTest, RestrictedSumIdentity) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const IiMaid x = common_prior_game(rng, 3 + trial % 3);
    const auto conv = maid2efgII(x);
    ASSERT_TRUE(is_coherent(conv.game));
    const auto s = map_policy(conv, random_mixed(x, rng));
    for (const auto& agent : x.agents()) {
      for (std::size_t w = 0; w < conv.game.space.states.size(); ++w) {
        EXPECT_NEAR(interim_utility(conv.game, s, agent, w, false), interim_utility(conv.game, s, agent, w, true),
                    1e-9);
      }
    }
  }
}

TEST(IiEfgTest, InterimNash) {
  const IiMaid x = evaluation_game();
  const auto conv = maid2efgII(x);
  const auto w = conv.game.interim;
  EXPECT_TRUE(is_interim_nash(conv.game, map_policy(conv, s6_profile(x)), w).is_nash);
  const auto r =
      is_interim_nash(conv.game, map_policy(conv, evaluation_profile(x, report_truth, h_match, h_if_low)), w);
  EXPECT_FALSE(r.is_nash);
  EXPECT_NEAR(r.regrets.at("A"), 0.2, 1e-9);
}

TEST(IiEfgTest, SingleStateReducesToTreeNash) {
  const Maid m = honest_maid();
  const IiMaid x = embed(m);
  const auto conv = maid2efgII(x);
  EXPECT_TRUE(is_interim_nash(conv.game, map_policy(conv, to_ii_profile(m, profile({truthful(m), deploy_iff_match(m)}))), 0)
                  .is_nash);
  const auto slots = policy_slots(m, m.decisions());
  std::vector<int> radix(slots.size(), 2), digits(slots.size(), 0);
  do {
    const auto p = pure_policy_from(m, slots, digits);
    EXPECT_EQ(is_interim_nash(conv.game, map_policy(conv, to_ii_profile(m, p)), 0).is_nash, is_nash(m, p).is_nash);
  } while (next_digits(digits, radix));
}

TEST(IiEfgTest, BayesianEquilibrium) {
  const IiMaid x = evaluation_game();
  const auto conv = maid2efgII(x);
  const auto star = conv.game.interim;
  const auto other = conv.game.state_index("S_A");
  // Uniform H in the capability tree is fine at the objective state but not
  // where H itself reasons in that tree.
  const auto s6 = map_policy(conv, s6_profile(x));
  EXPECT_TRUE(is_interim_nash(conv.game, s6, star).is_nash);
  EXPECT_FALSE(is_interim_nash(conv.game, s6, other).is_nash);
  EXPECT_FALSE(is_bayesian_equilibrium(conv.game, s6));

  const auto rbr = map_policy(conv, rbr_profile(x));
  const bool both = is_interim_nash(conv.game, rbr, star).is_nash && is_interim_nash(conv.game, rbr, other).is_nash;
  EXPECT_EQ(is_bayesian_equilibrium(conv.game, rbr), both);
  EXPECT_TRUE(both);

  const Variable d = var("D", {"a", "b"});
  const Variable u = utility("U", {"0", "1"});
  const Maid solo({"A"}, {{d, VariableKind::kDecision, "A", {}}, {u, VariableKind::kUtility, "A", {}}},
                  {deterministic_cpd(u, {&d}, [](const Assignment& a) { return a.at("D") == "b" ? "1" : "0"; })});
  const IiMaid sx = embed(solo);
  const auto sc = maid2efgII(sx);
  const auto argmax = make_ii_profile(sx, [](const InformationSet&) { return std::vector<double>{0, 1}; });
  EXPECT_TRUE(is_bayesian_equilibrium(sc.game, map_policy(sc, argmax)));
}

TEST(IiEfgTest, EquivalenceExhaustiveAndMixed) {
  const IiMaid x = evaluation_game();
  const auto conv = maid2efgII(x);
  const auto pure = all_pure(x);
  EXPECT_EQ(pure.size(), 256u);
  auto r = verify_equivalence(x, conv, pure);
  EXPECT_TRUE(r.holds);
  EXPECT_LT(r.max_deviation, 1e-9);

  std::mt19937_64 rng(100);
  std::vector<IiPolicyProfile> mixed;
  for (int k = 0; k < 100; ++k) mixed.push_back(random_mixed(x, rng));
  r = verify_equivalence(x, conv, mixed);
  EXPECT_TRUE(r.holds);
}

TEST(IiEfgTest, CorruptedCorrespondenceDetected) {
  const IiMaid x = evaluation_game();
  auto conv = maid2efgII(x);
  auto& h = conv.correspondence.at("H");
  const InformationSet one{"H", {{"C", "high"}, {"D_A", "low"}}, {"deploy", "no_deploy"}};
  const InformationSet two{"H", {{"C", "low"}, {"D_A", "low"}}, {"deploy", "no_deploy"}};
  std::swap(h.at(one), h.at(two));
  const auto r = verify_equivalence(x, conv, all_pure(x));
  EXPECT_FALSE(r.holds);
  EXPECT_GE(r.max_deviation, 0.1);
}

TEST(IiEfgTest, TypeMeasurability) {
  // A has one type across both states here, so both states see the same rows.
  SubjectiveMaid s1{"S1", honest_maid(), {}, {{"A", {{"S1", 0.5}, {"S2", 0.5}}}, {"H", {{"S1", 1.0}}}}, std::nullopt};
  SubjectiveMaid s2{"S2", honest_maid(), {}, {{"A", {{"S1", 0.5}, {"S2", 0.5}}}, {"H", {{"S2", 1.0}}}}, std::nullopt};
  const IiMaid x({"A", "H"}, "S1", {s1, s2});
  const auto conv = maid2efgII(x);
  const MetaStructure ms(conv.game);
  EXPECT_EQ(ms.type_count.at("A"), 1);
  std::mt19937_64 rng(4);
  const auto s = map_policy(conv, random_mixed(x, rng));
  const auto at1 = strategy_at(conv.game, ms, s, 0);
  const auto at2 = strategy_at(conv.game, ms, s, 1);
  for (int k : conv.game.games[0].infosets_of("A")) {
    EXPECT_EQ(at1[static_cast<std::size_t>(k)], at2[static_cast<std::size_t>(k)]);
  }
}

}  // namespace
}  // namespace iimaid
