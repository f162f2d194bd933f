// Copyright 2026 The fosg Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fosg/cfr.hpp"
#include "fosg/games.hpp"
#include "fosg/rng.hpp"

namespace fosg {
namespace {

// Remaps a vector given in sorted_members order to pubs.members order.
std::vector<double> to_members_order(const TreeIndex& idx, int32_t pub,
                                     int player,
                                     const std::vector<double>& sorted) {
  const auto& members = idx.pubs[pub].members[player];
  std::vector<int32_t> order = idx.sorted_members(pub, player);
  std::vector<double> out(members.size(), 0.0);
  for (size_t i = 0; i < order.size(); ++i) {
    size_t j = std::find(members.begin(), members.end(), order[i]) -
               members.begin();
    out[j] = sorted[i];
  }
  return out;
}

// Solves a sub-game with both root ranges fixed (CFR+), then reports both
// players' counterfactual values under the average profile.
CfvResult solve_and_evaluate(const TreeIndex& idx, int32_t pub,
                             const std::vector<double>& r1_sorted,
                             const std::vector<double>& r2_sorted,
                             int64_t iters) {
  SubgameRootSpec root;
  root.root_pub = pub;
  root.range[0] = to_members_order(idx, pub, 0, r1_sorted);
  root.range[1] = to_members_order(idx, pub, 1, r2_sorted);
  CfrSolver solver(idx, cfr_plus_config(), root);
  solver.run(iters);
  return compute_values(idx, pub, r1_sorted, r2_sorted, solver.average());
}

BehaviorPolicy random_policy(const TreeIndex& idx, int player, Rng& rng) {
  BehaviorPolicy p = uniform_policy(idx, player);
  for (size_t s = 0; s < idx.infos[player].size(); ++s) {
    if (!idx.is_decision(player, static_cast<int32_t>(s))) continue;
    size_t n = idx.infos[player][s].actions.size();
    double sum = 0;
    std::vector<double> row(n);
    for (auto& x : row) sum += (x = rng.next_double() + 1e-3);
    for (size_t a = 0; a < n; ++a) {
      p.probs[idx.act_offset[player][s] + a] = row[a] / sum;
    }
  }
  return p;
}

// The public state reached after player 1's private commitment.
int32_t rps_inner_pub(const TreeIndex& idx) {
  return idx.pubs[0].children.at(0);
}

TEST_CASE("rps cfr average approaches uniform") {
  TreeIndex idx = enumerate(make_game("rps"));
  CfrConfig cfg;  // rm, simultaneous, uniform averaging
  auto [avg, diag] = run_cfr(idx, cfg, 2000);
  int32_t s1 = idx.hists[0].info[0];
  for (int a = 0; a < 3; ++a) {
    CHECK(avg.pi[0].probs[idx.act_offset[0][s1] + a] ==
          doctest::Approx(1.0 / 3).epsilon(0.05));
  }
  CHECK(diag.points.back().nashconv < 0.1);
}

TEST_CASE("regret bounds hold at every checkpoint") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  // Simultaneous updates: nashconv of the average is bounded by the summed
  // positive regrets, and full regret never exceeds its per-state bound.
  CfrConfig cfg;
  CfrSolver solver(idx, cfg);
  solver.run(500, /*log=*/true);
  for (const auto& pt : solver.diagnostics().points) {
    double t = static_cast<double>(pt.iter);
    CHECK(pt.nashconv <=
          (pt.sum_pos_regret[0] + pt.sum_pos_regret[1]) / t + 1e-9);
    for (int p = 0; p < 2; ++p) {
      CHECK(pt.full_regret[p] <= pt.sum_pos_regret[p] + 1e-9);
    }
  }

  CfrSolver plus(idx, cfr_plus_config());
  plus.run(500, /*log=*/true);
  for (const auto& pt : plus.diagnostics().points) {
    for (int p = 0; p < 2; ++p) {
      CHECK(pt.full_regret[p] <= pt.sum_pos_regret[p] + 1e-9);
    }
  }
}

TEST_CASE("kuhn cfr converges to the known game value") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  CfrConfig cfg;
  auto [avg, diag] = run_cfr(idx, cfg, 10000);
  CHECK(diag.points.back().nashconv < 1e-2);
  CHECK(std::abs(expected_return(idx, avg)[0] - (-1.0 / 18)) < 2e-3);
  CHECK(std::abs(cached_game_value(idx) - (-1.0 / 18)) < 1e-4);
}

TEST_CASE("cfr+ outpaces vanilla cfr on leduc") {
  TreeIndex idx = enumerate(make_game("leduc"));
  CfrConfig vanilla;
  auto [avg_v, diag_v] = run_cfr(idx, vanilla, 1000);
  auto [avg_p, diag_p] = run_cfr(idx, cfr_plus_config(), 1000);
  double nc_v = diag_v.points.back().nashconv;
  double nc_p = diag_p.points.back().nashconv;
  CHECK(nc_p < nc_v);
  CHECK(nc_p < 1e-2);
}

TEST_CASE("kuhn cfr+ mixes somewhere (bluffing survives averaging)") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  CfrSolver solver(idx, cfr_plus_config());
  solver.run(10000);
  PolicyProfile avg = solver.average();
  bool mixed = false;
  for (size_t s = 0; s < idx.infos[0].size(); ++s) {
    if (!idx.is_decision(0, static_cast<int32_t>(s))) continue;
    if (support(idx, avg.pi[0], static_cast<int32_t>(s), 1e-4).size() > 1) {
      mixed = true;
    }
  }
  CHECK(mixed);
}

TEST_CASE("value-function table at the rps inner public state") {
  TreeIndex idx = enumerate(make_game("rps"));
  int32_t pub = rps_inner_pub(idx);
  REQUIRE(idx.pubs[pub].members[0].size() == 3);
  REQUIRE(idx.pubs[pub].members[1].size() == 1);

  // Infostate keys at this state sort the player-1 commitments p < r < s;
  // all range and value vectors below use that order.
  CfvResult a = solve_and_evaluate(idx, pub, {0.2, 0.2, 0.6}, {1}, 10000);
  CHECK(a.v[1][0] == doctest::Approx(0.4).epsilon(1e-3));
  CHECK(a.v[0][0] == doctest::Approx(0.0).scale(1).epsilon(2e-3));
  CHECK(a.v[0][1] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(a.v[0][2] == doctest::Approx(-1.0).epsilon(1e-3));

  CfvResult b = solve_and_evaluate(idx, pub, {0.4, 0.3, 0.3}, {1}, 10000);
  CHECK(b.v[1][0] == doctest::Approx(0.1).epsilon(1e-3));
  CHECK(b.v[0][0] == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(b.v[0][1] == doctest::Approx(0.0).scale(1).epsilon(2e-3));
  CHECK(b.v[0][2] == doctest::Approx(1.0).epsilon(1e-3));

  double third = 1.0 / 3;
  CfvResult c =
      solve_and_evaluate(idx, pub, {third, third, third}, {1}, 10000);
  CHECK(c.v[1][0] == doctest::Approx(0.0).scale(1).epsilon(1e-3));
  for (int i = 0; i < 3; ++i) {
    CHECK(c.v[0][i] == doctest::Approx(0.0).scale(1).epsilon(1e-3));
  }
}

TEST_CASE("a zero range silences the opponent's values") {
  TreeIndex idx = enumerate(make_game("rps"));
  int32_t pub = rps_inner_pub(idx);
  PolicyProfile prof = uniform_profile(idx);
  CfvResult r = compute_values(idx, pub, {0, 0, 0}, {1}, prof);
  CHECK(r.v[1][0] == 0.0);
  // Player 1's own values are counterfactual: they ignore the own range.
  CHECK(r.v[0][0] == doctest::Approx(0.0));
}

TEST_CASE("weighted values balance to zero at every public state") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  Rng rng(21);
  PolicyProfile prof{{random_policy(idx, 0, rng), random_policy(idx, 1, rng)}};
  for (size_t pub = 0; pub < idx.pubs.size(); ++pub) {
    std::array<std::vector<double>, 2> range;
    for (int p = 0; p < 2; ++p) {
      std::vector<int32_t> order =
          idx.sorted_members(static_cast<int32_t>(pub), p);
      for (int32_t s : order) {
        range[p].push_back(info_reach(idx, prof.pi[p], s));
      }
    }
    CfvResult r = compute_values(idx, static_cast<int32_t>(pub), range[0],
                                 range[1], prof);
    double balance = 0;
    for (int p = 0; p < 2; ++p) {
      for (size_t i = 0; i < range[p].size(); ++i) {
        balance += range[p][i] * r.v[p][i];
      }
    }
    CHECK(std::abs(balance) < 1e-9);
  }
}

TEST_CASE("linear averaging matches reach-weighted mixture of iterates") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  CfrConfig cfg;
  cfg.averaging = Averaging::kLinear;
  CfrSolver solver(idx, cfg);
  std::vector<BehaviorPolicy> snaps;
  std::vector<double> weights;
  for (int t = 1; t <= 50; ++t) {
    solver.run(1);
    snaps.push_back(solver.current().pi[0]);
    weights.push_back(static_cast<double>(t));
  }
  BehaviorPolicy mix = average_policies(idx, snaps, weights);
  BehaviorPolicy avg = solver.average_policy(0);
  for (size_t i = 0; i < avg.probs.size(); ++i) {
    CHECK(avg.probs[i] == doctest::Approx(mix.probs[i]).epsilon(1e-9));
  }
}

TEST_CASE("warm-up skipping drops early iterates from the average") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  CfrConfig cfg;
  cfg.skip_fraction = 0.5;
  CfrSolver skip(idx, cfg);
  skip.run(100);
  CfrConfig ref_cfg;
  CfrSolver ref(idx, ref_cfg);
  ref.run(100);
  // Same iterates either way; the skipped average differs from the full one.
  double diff = 0;
  BehaviorPolicy a = skip.average_policy(0);
  BehaviorPolicy b = ref.average_policy(0);
  for (size_t i = 0; i < a.probs.size(); ++i) {
    diff += std::abs(a.probs[i] - b.probs[i]);
  }
  CHECK(diff > 1e-6);
}

TEST_CASE("equilibrium play accrues no full regret") {
  TreeIndex idx = enumerate(make_game("rps"));
  CfrConfig cfg;
  CfrSolver solver(idx, cfg);
  solver.run(100);
  CHECK(solver.full_regret(0) <= 1e-9);
  CHECK(solver.full_regret(1) <= 1e-9);
}

TEST_CASE("single-decision full regret equals the local regret") {
  TreeIndex idx = enumerate(make_game("matrix:1,-2;-2,4"));
  CfrConfig cfg;
  CfrSolver solver(idx, cfg);
  solver.run(100);
  for (int p = 0; p < 2; ++p) {
    double full = solver.full_regret(p);
    if (full > 0) {
      CHECK(full == doctest::Approx(solver.sum_pos_regret(p)).epsilon(1e-9));
    } else {
      CHECK(full <= solver.sum_pos_regret(p) + 1e-9);
    }
  }
}

TEST_CASE("gadget head: forced follow reproduces the plain solve") {
  TreeIndex idx = enumerate(make_game("rps"));
  int32_t pub = rps_inner_pub(idx);
  std::vector<double> r1 = {0.2, 0.2, 0.6};

  SubgameRootSpec plain;
  plain.root_pub = pub;
  plain.range[0] = to_members_order(idx, pub, 0, r1);
  plain.range[1] = {1};
  CfrSolver base(idx, cfr_plus_config(), plain);
  base.run(2000);

  SubgameRootSpec forced = plain;
  forced.gadget_player = 1;
  forced.bound = {std::numeric_limits<double>::infinity()};
  CfrSolver gadget(idx, cfr_plus_config(), forced);
  gadget.run(2000);
  CHECK(gadget.avg_follow()[0] == doctest::Approx(1.0));
  BehaviorPolicy a = base.average_policy(1);
  BehaviorPolicy b = gadget.average_policy(1);
  for (size_t i = 0; i < a.probs.size(); ++i) {
    CHECK(a.probs[i] == doctest::Approx(b.probs[i]).epsilon(1e-9));
  }
}

TEST_CASE("gadget head follows or terminates with the bound") {
  TreeIndex idx = enumerate(make_game("rps"));
  int32_t pub = rps_inner_pub(idx);
  SubgameRootSpec root;
  root.root_pub = pub;
  root.range[0] = to_members_order(idx, pub, 0, {0.2, 0.2, 0.6});
  root.range[1] = {1};
  root.gadget_player = 1;

  // The sub-game is worth 0.4 to player 2 here.  A terrible Terminate value
  // drives the head to Follow; a generous one drives it to Terminate.
  root.bound = {-10.0};
  CfrSolver follow(idx, cfr_plus_config(), root);
  follow.run(2000);
  CHECK(follow.avg_follow()[0] > 0.99);

  root.bound = {10.0};
  CfrSolver term(idx, cfr_plus_config(), root);
  term.run(2000);
  CHECK(term.avg_follow()[0] < 0.01);
}

}  // namespace
}  // namespace fosg
