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
#include <map>

#include "fosg/games.hpp"
#include "fosg/tree.hpp"

namespace fosg {
namespace {

// Returns {payoff at (row i, col j)} reconstructed from the enumerated tree.
std::map<std::pair<int, int>, double> terminal_matrix(const TreeIndex& idx) {
  std::map<std::pair<int, int>, double> m;
  for (int32_t h = 0; h < idx.num_histories(); ++h) {
    if (idx.hists[h].actor != -2) continue;
    const World& w = idx.worlds[h];
    m[{w[1], w[2]}] = idx.hists[h].ret[0];
  }
  return m;
}

TEST_CASE("inline matrix syntax matches the canonical rps payoffs") {
  TreeIndex a = enumerate(make_game("rps"));
  TreeIndex b = enumerate(make_game("matrix:0,1,-1;-1,0,1;1,-1,0"));
  CHECK(terminal_matrix(a) == terminal_matrix(b));
  CHECK(a.num_histories() == b.num_histories());
}

TEST_CASE("make_game rejects unknown names and malformed input") {
  CHECK_THROWS(make_game("holdem"));
  CHECK_THROWS(make_game("matrix:1,2;3"));
  CHECK_THROWS(make_game("matrix:1,x;3,4"));
  CHECK_THROWS(make_game("matrix:"));
}

TEST_CASE("general-sum matrices need the explicit escape hatch") {
  MatrixGameSpec chicken;
  chicken.payoff = {{0, -1}, {1, -10}};
  chicken.payoff2 = {{0, 1}, {-1, -10}};
  CHECK_THROWS(matrix_to_fosg(chicken));
  chicken.allow_general_sum = true;
  auto game = matrix_to_fosg(chicken);
  CHECK_FALSE(game->zero_sum());
  TreeIndex idx = enumerate(game);
  CHECK(idx.num_terminals() == 4);
}

TEST_CASE("1x1 matrix game is a single forced line with value 0") {
  TreeIndex idx = enumerate(make_game("matrix:0"));
  CHECK(idx.num_histories() == 3);
  CHECK(idx.hists[2].ret[0] == 0.0);
}

TEST_CASE("rps_water has an all-zero water row and column") {
  TreeIndex idx = enumerate(make_game("rps_water"));
  auto m = terminal_matrix(idx);
  for (int k = 0; k < 4; ++k) {
    CHECK(m[{3, k}] == 0.0);
    CHECK(m[{k, 3}] == 0.0);
  }
  CHECK(m[{0, 0}] == 1.0);   // the diagonal win of the printed table
  CHECK(m[{0, 2}] == -1.0);
}

TEST_CASE("kuhn poker shape") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  CHECK(idx.num_histories() == 58);
  CHECK(idx.num_decision_infostates(0) == 6);
  CHECK(idx.num_decision_infostates(1) == 6);
  // Stakes are 1 (no bet called) or 2 (bet and call).
  double max_ret = 0;
  for (int32_t h = 0; h < idx.num_histories(); ++h) {
    if (idx.hists[h].actor == -2) {
      max_ret = std::max(max_ret, std::abs(idx.hists[h].ret[0]));
    }
  }
  CHECK(max_ret == 2.0);
  CHECK(idx.delta_r == 4.0);
}

TEST_CASE("leduc poker shape") {
  TreeIndex idx = enumerate(make_game("leduc"));
  CHECK(idx.num_histories() > 1000);
  double max_ret = 0;
  for (int32_t h = 0; h < idx.num_histories(); ++h) {
    if (idx.hists[h].actor == -2) {
      max_ret = std::max(max_ret, std::abs(idx.hists[h].ret[0]));
    }
  }
  // ante 1 + round-1 bet/raise (2+2) + round-2 bet/raise (4+4) = 13.
  CHECK(max_ret == 13.0);
}

TEST_CASE("mini poker uses the asymmetric deal distribution") {
  TreeIndex idx = enumerate(make_game("mini_poker_asym"));
  // Joint deal probabilities at depth 2 (Q=0, K=1, A=2).
  std::map<std::pair<int, int>, double> deal;
  for (int32_t h = 0; h < idx.num_histories(); ++h) {
    if (idx.hists[h].depth == 2) {
      deal[{idx.worlds[h][1], idx.worlds[h][2]}] = idx.hists[h].pc;
    }
  }
  REQUIRE(deal.size() == 4);
  CHECK(deal[{2, 2}] == doctest::Approx(0.25));
  CHECK(deal[{1, 2}] == doctest::Approx(0.25));
  CHECK(deal[{1, 1}] == doctest::Approx(0.25));
  CHECK(deal[{0, 0}] == doctest::Approx(0.25));
}

TEST_CASE("coordinated matching pennies observations") {
  auto game = make_game("matching_pennies_coordinated");
  TreeIndex idx = enumerate(game);
  // The chance step emits a public L/R token; player 1's move is private.
  int public_sides = 0;
  for (int32_t h = 0; h < idx.num_histories(); ++h) {
    if (idx.hists[h].depth != 2) continue;
    const std::string& pub = game->strings().name(idx.hists[h].obs.pub);
    CHECK((pub == "L" || pub == "R"));
    ++public_sides;
  }
  CHECK(public_sides == 4);
  for (int32_t h = 0; h < idx.num_histories(); ++h) {
    if (idx.hists[h].depth == 1) {
      CHECK(idx.hists[h].obs.pub == kNullToken);
      CHECK(idx.hists[h].obs.priv[1] == kNullToken);
    }
  }
}

TEST_CASE("glasses game basics") {
  auto game = make_game("glasses");
  TreeIndex idx = enumerate(game);
  CHECK(idx.num_histories() > 100);
  CHECK(idx.delta_r == 2.0);
  // The chaser's observations never leak the evader's position: its private
  // tokens are always empty.
  for (int32_t h = 0; h < idx.num_histories(); ++h) {
    CHECK(idx.hists[h].obs.priv[1] == kNullToken);
  }
  // Both outcomes occur: some terminal is a capture, some a survival.
  bool capture = false, survival = false;
  for (int32_t h = 0; h < idx.num_histories(); ++h) {
    if (idx.hists[h].actor == -2) {
      (idx.hists[h].ret[0] > 0 ? survival : capture) = true;
    }
  }
  CHECK(capture);
  CHECK(survival);
}

}  // namespace
}  // namespace fosg
