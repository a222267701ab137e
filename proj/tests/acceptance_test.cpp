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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "iimaid/cli.hpp"
#include "iimaid/ii_efg.hpp"
#include "iimaid/io.hpp"
#include "random_stacks.hpp"

namespace iimaid {
namespace {

using nlohmann::json;

std::string data(const std::string& name) { return std::string(IIMAID_DATA_DIR) + "/" + name; }

std::string temp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

struct Run {
  int code = 0;
  json report;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args, bool as_json = true) {
  if (as_json) {
    args.push_back("--output");
    args.push_back("json");
  }
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  if (as_json && !r.out.empty()) r.report = json::parse(r.out);
  return r;
}

// Collects failed checks of one criterion with a short reason each.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    expect(std::abs(got - want) <= tol, what + " = " + io::format_decimal(got) + ", want " + io::format_decimal(want) +
                                            " +- " + io::format_decimal(tol));
  }
  bool ok() const { return failures_.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// ---- Criteria -----------------------------------------------------------------

void complete_information_nash(Check& c) {
  for (const auto& [game, profile] : {std::pair{"honest_eval.maid.json", "honest_ne.profile.json"},
                                      std::pair{"capability_eval.maid.json", "capability_ne.profile.json"}}) {
    const auto t = std::chrono::steady_clock::now();
    const auto r = cli({"check-nash", data(game), "--profile", data(profile)});
    const double s = seconds_since(t);
    c.expect(r.code == 0, std::string(game) + " exit " + std::to_string(r.code));
    for (const auto& [agent, regret] : r.report["result"]["regrets"].items()) {
      c.expect(regret.get<double>() < 1e-9, std::string(game) + " regret " + agent);
    }
    c.expect(s < 0.1, std::string(game) + " took " + std::to_string(s) + " s");
  }
}

void non_equilibrium_detection(Check& c) {
  const auto t = std::chrono::steady_clock::now();
  const auto r = cli({"check-nash", data("honest_eval.maid.json"), "--profile", data("honest_lowmatch.profile.json")});
  const double s = seconds_since(t);
  c.expect(r.code == 1, "exit " + std::to_string(r.code));
  c.near(r.report["result"]["regrets"]["A"].get<double>(), 0.2, 1e-9, "A regret");
  c.expect(s < 0.1, "took " + std::to_string(s) + " s");
}

void consistency(Check& c) {
  const auto t = std::chrono::steady_clock::now();
  const auto r = cli({"check-consistency", data("evaluation_game.iimaid.json")});
  const auto& res = r.report["result"];
  c.expect(r.code == 1, "evaluation game exit " + std::to_string(r.code));
  c.expect(res["prior-feasible"].get<bool>(), "evaluation game infeasible");
  c.expect(res["forced-zero"] == json::array({"S_H"}), "forced zero " + res["forced-zero"].dump());
  c.near(res["range"]["S_H"][1].get<double>(), 0.0, 1e-9, "max p(S_H)");
  c.expect(!res["strongly-consistent"].get<bool>(), "evaluation game strongly consistent");
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> size(3, 5);
  int passed = 0;
  for (int k = 0; k < 100; ++k) {
    const auto x = testing::common_prior_game(rng, size(rng));
    if (check_consistency(x).strongly_consistent) ++passed;
  }
  c.expect(passed == 100, "common-prior games " + std::to_string(passed) + "/100");
  const double s = seconds_since(t);
  c.expect(s < 2.0, "took " + std::to_string(s) + " s");
}

void information_sets_count(Check& c) {
  const auto t = std::chrono::steady_clock::now();
  const auto r = cli({"info-sets", data("evaluation_game.iimaid.json")});
  const double s = seconds_since(t);
  c.expect(r.code == 0, "exit " + std::to_string(r.code));
  c.expect(r.report["result"]["A"]["count"] == 2, "A count " + r.report["result"]["A"]["count"].dump());
  c.expect(r.report["result"]["H"]["count"] == 6, "H count " + r.report["result"]["H"]["count"].dump());
  c.expect(s < 0.1, "took " + std::to_string(s) + " s");
}

void ii_nash(Check& c) {
  const auto t = std::chrono::steady_clock::now();
  const auto ne = cli({"check-nash", data("evaluation_game.iimaid.json"), "--profile", data("s6_ne.profile.json"),
                       "--tol", "1e-6"});
  c.expect(ne.code == 0, "equilibrium exit " + std::to_string(ne.code));
  const auto bad = cli({"check-nash", data("evaluation_game.iimaid.json"), "--profile",
                        data("s6_mutated.profile.json"), "--tol", "1e-6"});
  c.expect(bad.code == 1, "mutated exit " + std::to_string(bad.code));
  c.near(bad.report["result"]["regrets"]["A"].get<double>(), 0.2, 1e-6, "mutated A regret");
  const double s = seconds_since(t);
  c.expect(s < 1.0, "took " + std::to_string(s) + " s");
}

void equivalence(Check& c) {
  const auto t = std::chrono::steady_clock::now();
  const auto r = cli({"verify-equivalence", data("evaluation_game.iimaid.json"), "--tol", "1e-9"});
  c.expect(r.code == 0, "exit " + std::to_string(r.code));
  c.expect(r.report["result"]["profiles"] == 256, "profiles " + r.report["result"]["profiles"].dump());
  c.expect(r.report["result"]["max-deviation"].get<double>() < 1e-9, "max deviation");

  const IiMaid x = io::load_document(data("evaluation_game.iimaid.json")).game;
  auto conv = maid2efgII(x);
  auto& h = conv.correspondence.at("H");
  const InformationSet one{"H", {{"C", "high"}, {"D_A", "low"}}, {"deploy", "no_deploy"}};
  const InformationSet two{"H", {{"C", "low"}, {"D_A", "low"}}, {"deploy", "no_deploy"}};
  std::swap(h.at(one), h.at(two));
  std::vector<IiPolicyProfile> all;
  PureIiProfiles(x).for_each([&](IiPolicyProfile p) {
    all.push_back(std::move(p));
    return true;
  });
  const auto corrupted = verify_equivalence(x, conv, all);
  c.expect(corrupted.max_deviation >= 0.1, "corrupted deviation " + io::format_decimal(corrupted.max_deviation));
  const double s = seconds_since(t);
  c.expect(s < 5.0, "took " + std::to_string(s) + " s");
}

void recursive_best_response_outcome(Check& c) {
  const auto t = std::chrono::steady_clock::now();
  const auto r = cli({"solve-rbr", data("evaluation_game_depth3.stack.json")});
  const double s = seconds_since(t);
  c.expect(r.code == 0, "exit " + std::to_string(r.code));
  const auto& res = r.report["result"];
  const auto got = io::parse_profile(json{{"format-version", 1}, {"kind", "profile"}, {"policies", res["profile"]}});
  const IiMaid x = io::load_document(data("evaluation_game.iimaid.json")).game;
  c.expect(got == testing::rbr_profile(x), "profile differs from always-low / deploy iff C = D_A");
  // Every trace record must pick the least index attaining the maximum.
  std::size_t audited = 0;
  for (const auto& rec : res["trace"]) {
    std::vector<double> values;
    for (const auto& v : rec["values"]) values.push_back(std::stod(v.get<std::string>()));
    if (values.empty()) continue;
    std::size_t arg = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
      if (values[k] > values[arg] + kTieTolerance) arg = k;
    }
    const auto key_actions = rec["information-set"].get<std::string>();
    const auto brace = key_actions.find('{');
    std::vector<std::string> actions;
    std::stringstream ss(key_actions.substr(brace + 1, key_actions.size() - brace - 2));
    for (std::string a; std::getline(ss, a, ',');) actions.push_back(a);
    c.expect(actions[arg] == rec["action"].get<std::string>(), "non-argmax record " + rec.dump());
    ++audited;
  }
  c.expect(audited > 0, "empty trace");
  c.near(res["expected-utilities"]["A"].get<double>(), 0.8, 1e-9, "EU A");
  c.near(res["expected-utilities"]["H"].get<double>(), 0.9, 1e-9, "EU H");
  c.expect(s < 1.0, "took " + std::to_string(s) + " s");
}

void rbr_oracle(Check& c) {
  const auto t = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20261016);
  const std::string path = temp("iimaid_acceptance_random.stack.json");
  int matched = 0;
  for (int k = 0; k < 50; ++k) {
    const auto rs = testing::random_depth2_stack(rng);
    {
      std::ofstream f(path, std::ios::binary);
      f << io::serialize_document({io::DocumentKind::kDepthStack, {}, rs.game});
    }
    const auto r = cli({"solve-rbr", path});
    if (r.code != 0) {
      c.expect(false, "stack " + std::to_string(k) + " exit " + std::to_string(r.code) + ": " + r.err);
      continue;
    }
    const auto got = io::parse_profile(
        json{{"format-version", 1}, {"kind", "profile"}, {"policies", r.report["result"]["profile"]}});
    const auto expected = testing::oracle_rbr(rs);
    const Maid& o = rs.game.model("O").model;
    bool same = true;
    for (const auto& [agent, acts] : expected) {
      const std::string d = agent == "X" ? "D_X" : "D_Y";
      for (std::size_t ctx = 0; ctx < acts.size(); ++ctx) {
        const auto key = infoset_at(o, d, o.context_at(d, ctx));
        same = same && got.at(agent).contains(key) && got.at(agent).at(key) == point_mass(2, acts[ctx]);
      }
    }
    if (same) ++matched;
  }
  std::remove(path.c_str());
  c.expect(matched == 50, std::to_string(matched) + "/50 stacks match the oracle");
  const double s = seconds_since(t);
  c.expect(s < 30.0, "took " + std::to_string(s) + " s");
}

void nash_existence(Check& c) {
  for (const std::string game : {"evaluation_game.iimaid.json", "honest_eval.maid.json", "capability_eval.maid.json"}) {
    const std::string out = temp("iimaid_acceptance_" + game + ".profile.json");
    const auto solved = cli({"solve-nash", data(game), "--profile-out", out});
    c.expect(solved.code == 0, game + " solve exit " + std::to_string(solved.code));
    const auto checked = cli({"check-nash", data(game), "--profile", out, "--tol", "1e-6"});
    c.expect(checked.code == 0, game + " check exit " + std::to_string(checked.code));
    std::remove(out.c_str());
  }
}

void monte_carlo(Check& c) {
  struct Case {
    std::string game, profile;
    std::map<std::string, double> exact;  // pinned values, where the criteria state them
  };
  const std::vector<Case> cases{
      {"honest_eval.maid.json", "honest_ne.profile.json", {{"A", 1.0}, {"H", 1.0}}},
      {"capability_eval.maid.json", "capability_ne.profile.json", {{"A", 1.0}, {"H", 0.4}}},  // 0.9 - 0.5
      {"honest_eval.maid.json", "honest_lowmatch.profile.json", {{"A", 0.8}, {"H", 0.9}}},
      {"evaluation_game.iimaid.json", "s6_ne.profile.json", {{"H", 0.9}}},
      {"evaluation_game.iimaid.json", "s6_mutated.profile.json", {}},
      {"evaluation_game.iimaid.json", "rbr.profile.json", {{"A", 0.8}, {"H", 0.9}}},
  };
  std::uint64_t seed = 1;
  for (const auto& k : cases) {
    const std::vector<std::string> args{"simulate", data(k.game), "--profile", data(k.profile), "--n", "100000",
                                        "--seed", std::to_string(seed++)};
    const auto r = cli(args);
    const std::string name = k.game + " / " + k.profile;
    c.expect(r.code == 0, name + " exit " + std::to_string(r.code));
    for (const auto& [agent, e] : r.report["result"]["agents"].items()) {
      const double mean = e["mean"].get<double>(), se = e["stderr"].get<double>(), exact = e["exact"].get<double>();
      c.expect(std::abs(mean - exact) <= 4.0 * se + 1e-12, name + " " + agent + " outside 4 stderr");
      if (k.exact.contains(agent)) c.near(exact, k.exact.at(agent), 1e-9, name + " exact " + agent);
    }
    c.expect(cli(args).out == r.out, name + " report differs between identical runs");
  }
}

}  // namespace
}  // namespace iimaid

int main() {
  using iimaid::Check;
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"complete-information Nash equilibria (regret < 1e-9)", iimaid::complete_information_nash},
      {"non-equilibrium detection (A regret 0.2 +- 1e-9)", iimaid::non_equilibrium_detection},
      {"consistency (p(S_H) forced to 0; 100/100 common-prior games)", iimaid::consistency},
      {"information sets (A = 2, H = 6)", iimaid::information_sets_count},
      {"II-MAID Nash (tol 1e-6; mutated regret 0.2 +- 1e-6)", iimaid::ii_nash},
      {"equivalence with the converted game (< 1e-9; corruption >= 0.1)", iimaid::equivalence},
      {"recursive best response on the depth-3 stack (EU 0.8 / 0.9 +- 1e-9)",
       iimaid::recursive_best_response_outcome},
      {"recursive best response vs nested-argmax oracle (50 stacks)", iimaid::rbr_oracle},
      {"Nash existence at desk scale (tol 1e-6)", iimaid::nash_existence},
      {"Monte-Carlo cross-check (n = 1e5, 4 stderr, seeded)", iimaid::monte_carlo},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Check c;
    const auto t = std::chrono::steady_clock::now();
    try {
      criteria[k].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double ms = 1000.0 * iimaid::seconds_since(t);
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.1f ms", ms);
    std::cout << (c.ok() ? "PASS" : "FAIL") << " " << (k + 1) << ". " << criteria[k].first << " [" << timing << "]";
    if (!c.ok()) std::cout << ": " << c.summary();
    std::cout << "\n";
    if (!c.ok()) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
