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

#include <cmath>

#include "fosg/bestresponse.hpp"
#include "fosg/games.hpp"
#include "fosg/rng.hpp"

namespace fosg {
namespace {

void set_row(const TreeIndex& idx, BehaviorPolicy& p, int32_t s,
             std::vector<double> probs) {
  for (size_t a = 0; a < probs.size(); ++a) {
    p.probs[idx.act_offset[p.player][s] + a] = probs[a];
  }
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

TEST_CASE("rps pure rock is exploited for 1") {
  TreeIndex idx = enumerate(make_game("rps"));
  BehaviorPolicy rock = uniform_policy(idx, 0);
  set_row(idx, rock, idx.hists[0].info[0], {1, 0, 0});
  BrResult br = best_response(idx, rock, 1);
  CHECK(br.brv == doctest::Approx(1.0));
  // The responder plays the action that beats rock in this matrix (index 2).
  for (size_t s = 0; s < idx.infos[1].size(); ++s) {
    if (idx.is_decision(1, static_cast<int32_t>(s))) {
      CHECK(br.policy.probs[idx.act_offset[1][s] + 2] == 1.0);
    }
  }

  BehaviorPolicy uni = uniform_policy(idx, 0);
  CHECK(best_response(idx, uni, 1).brv == doctest::Approx(0.0));
}

TEST_CASE("kuhn best response matches brute force over pure responses") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  BehaviorPolicy fixed = uniform_policy(idx, 0);
  BrResult br = best_response(idx, fixed, 1);

  std::vector<int32_t> decisions;
  for (size_t s = 0; s < idx.infos[1].size(); ++s) {
    if (idx.is_decision(1, static_cast<int32_t>(s))) {
      decisions.push_back(static_cast<int32_t>(s));
    }
  }
  REQUIRE(decisions.size() == 6);
  double best = -1e9;
  for (int mask = 0; mask < 64; ++mask) {
    PolicyProfile prof{{fixed, uniform_policy(idx, 1)}};
    for (size_t k = 0; k < decisions.size(); ++k) {
      set_row(idx, prof.pi[1], decisions[k],
              (mask >> k) & 1 ? std::vector<double>{0, 1}
                              : std::vector<double>{1, 0});
    }
    best = std::max(best, expected_return(idx, prof)[1]);
  }
  CHECK(br.brv == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("brv certifies optimality against random responders") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  Rng rng(7);
  BehaviorPolicy fixed = random_policy(idx, 0, rng);
  BrResult br = best_response(idx, fixed, 1);
  for (int trial = 0; trial < 200; ++trial) {
    PolicyProfile prof{{fixed, random_policy(idx, 1, rng)}};
    CHECK(br.brv >= expected_return(idx, prof)[1] - 1e-9);
  }
  // BRV equals the expected return of (fixed, responder policy).
  PolicyProfile prof{{fixed, br.policy}};
  CHECK(expected_return(idx, prof)[1] == doctest::Approx(br.brv));
}

TEST_CASE("cbrv dominates per-action counterfactual values") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  Rng rng(9);
  BehaviorPolicy fixed = random_policy(idx, 0, rng);
  BrResult br = cf_best_response(idx, fixed, 1);
  for (size_t s = 0; s < idx.infos[1].size(); ++s) {
    size_t n = idx.infos[1][s].actions.size();
    for (size_t a = 0; a < n; ++a) {
      CHECK(br.cbrv[s] >= br.q[idx.act_offset[1][s] + a] - 1e-12);
    }
  }
}

TEST_CASE("nashconv basics") {
  TreeIndex idx = enumerate(make_game("rps"));
  PolicyProfile uni = uniform_profile(idx);
  NashConvResult eq = nashconv(idx, uni);
  CHECK(eq.nashconv == doctest::Approx(0.0));
  CHECK(eq.exploitability == doctest::Approx(0.0));

  PolicyProfile rocky = uni;
  set_row(idx, rocky.pi[0], idx.hists[0].info[0], {1, 0, 0});
  NashConvResult nc = nashconv(idx, rocky, /*gv1=*/0.0);
  CHECK(nc.nashconv == doctest::Approx(1.0));
  CHECK(nc.delta[0] == doctest::Approx(1.0));  // rock is exploited for 1
  CHECK(nc.delta[1] == doctest::Approx(0.0));  // uniform is safe
  CHECK(nc.nashconv >= 0);
}

TEST_CASE("rps_water water-water is an equilibrium") {
  TreeIndex idx = enumerate(make_game("rps_water"));
  PolicyProfile prof = uniform_profile(idx);
  set_row(idx, prof.pi[0], idx.hists[0].info[0], {0, 0, 0, 1});
  for (size_t s = 0; s < idx.infos[1].size(); ++s) {
    if (idx.is_decision(1, static_cast<int32_t>(s))) {
      set_row(idx, prof.pi[1], static_cast<int32_t>(s), {0, 0, 0, 1});
    }
  }
  CHECK(nashconv(idx, prof).nashconv == doctest::Approx(0.0));
}

TEST_CASE("tie-break hook controls the reported response") {
  TreeIndex idx = enumerate(make_game("rps"));
  BehaviorPolicy uni = uniform_policy(idx, 0);
  // Against uniform, all of player 2's actions tie at value 0.
  TieBreak last = [](int, int32_t, const double*, int n) { return n - 1; };
  BrResult br = best_response(idx, uni, 1, &last);
  for (size_t s = 0; s < idx.infos[1].size(); ++s) {
    if (idx.is_decision(1, static_cast<int32_t>(s))) {
      CHECK(br.policy.probs[idx.act_offset[1][s] + 2] == 1.0);
    }
  }
}

}  // namespace
}  // namespace fosg
