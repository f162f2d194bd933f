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
#include <vector>

#include "fosg/bestresponse.hpp"
#include "fosg/games.hpp"
#include "fosg/resolve.hpp"
#include "fosg/rng.hpp"

namespace fosg {
namespace {

double tabularized_exploitability(const TreeIndex& idx,
                                  const ResolveConfig& cfg) {
  PolicyProfile prof = uniform_profile(idx);
  for (int p = 0; p < 2; ++p) {
    ResolvingAgent agent(idx, p, cfg);
    prof.pi[p] = tabularize(idx, agent);
  }
  return nashconv(idx, prof).exploitability;
}

TEST_CASE("full lookahead reduces to plain cfr") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  CfrConfig cfg = cfr_plus_config();
  LookaheadSolve ls = depth_limited_cfr(idx, {}, {}, DepthPolicy::full(),
                                        cfg, 200);
  CfrSolver ref(idx, cfg);
  ref.run(200);
  PolicyProfile want = ref.average();
  CHECK(ls.avg.pi[0].probs == want.pi[0].probs);
  CHECK(ls.avg.pi[1].probs == want.pi[1].probs);
  CHECK(ls.frontier.empty());
}

TEST_CASE("step frontiers cut the lookahead exactly once per public state") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  auto frontier = compute_frontier(idx, 0, DepthPolicy::n_steps(2));
  CHECK(!frontier.empty());
  for (int32_t pub : frontier) {
    CHECK(idx.pubs[pub].depth == 2);
    CHECK(!idx.pubs[pub].terminal);
  }
  LookaheadSolve ls = depth_limited_cfr(idx, {},
                                        ValueFunctionHandle::exact_cfr(50),
                                        DepthPolicy::n_steps(2),
                                        cfr_plus_config(), 50);
  // Lookahead = every root-reachable pub of depth <= 2, exactly once.
  std::vector<int32_t> sorted = ls.pubs;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  int expected = 0;
  for (const auto& pub : idx.pubs) {
    if (pub.depth <= 2 && !(pub.depth == 2 && pub.terminal)) ++expected;
  }
  CHECK(static_cast<int>(ls.pubs.size()) == expected);
}

TEST_CASE("exact value functions satisfy zero-sum balance") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  int32_t pub = -1;
  for (size_t p = 0; p < idx.pubs.size(); ++p) {
    if (idx.pubs[p].depth == 2 && !idx.pubs[p].terminal) {
      pub = static_cast<int32_t>(p);
      break;
    }
  }
  REQUIRE(pub >= 0);
  ValueFn fn = make_value_fn(idx, ValueFunctionHandle::exact_cfr(2000));
  Rng rng(3);
  std::vector<double> r1, r2;
  for (size_t i = 0; i < idx.pubs[pub].members[0].size(); ++i) {
    r1.push_back(rng.next_double());
  }
  for (size_t j = 0; j < idx.pubs[pub].members[1].size(); ++j) {
    r2.push_back(rng.next_double());
  }
  std::vector<double> v1(r1.size(), 0.0), v2(r2.size(), 0.0);
  fn(pub, r1, r2, v1, v2);
  double bal = 0;
  for (size_t i = 0; i < r1.size(); ++i) bal += r1[i] * v1[i];
  for (size_t j = 0; j < r2.size(); ++j) bal += r2[j] * v2[j];
  for (double x : v1) CHECK(std::isfinite(x));
  // Both are best-response values, so the sum is a small nonnegative gap.
  CHECK(bal >= -1e-9);
  CHECK(bal < 1e-2);
}

TEST_CASE("rps resolving agent opens uniformly") {
  TreeIndex idx = enumerate(make_game("rps"));
  ResolveConfig cfg;
  cfg.iters = 2000;
  ResolvingAgent agent(idx, 0, cfg);
  agent.new_game();
  int32_t s = idx.hists[0].info[0];
  OnlineAgent::Act a = agent.act(s);
  REQUIRE(a.row.size() == 3);
  for (double x : a.row) CHECK(x == doctest::Approx(1.0 / 3).epsilon(0.05));
}

TEST_CASE("a fixed-policy agent tabularizes to itself") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  CfrSolver solver(idx, cfr_plus_config());
  solver.run(1000);
  BehaviorPolicy avg = solver.average_policy(0);
  FixedPolicyAgent agent(idx, avg, 7);
  BehaviorPolicy tab = tabularize(idx, agent);
  CHECK(tab.probs == avg.probs);
}

TEST_CASE("continual re-solving converges on kuhn with full lookahead") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  ResolveConfig cfg;
  cfg.iters = 100;
  double e100 = tabularized_exploitability(idx, cfg);
  cfg.iters = 1000;
  double e1000 = tabularized_exploitability(idx, cfg);
  cfg.iters = 4000;
  double e4000 = tabularized_exploitability(idx, cfg);
  CHECK(e1000 < e100);
  CHECK(e4000 < 2e-2);
}

TEST_CASE("one-step lookahead improves with value-function quality") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  ResolveConfig cfg;
  cfg.iters = 1000;
  cfg.depth = DepthPolicy::n_steps(1);
  cfg.value_fn = ValueFunctionHandle::exact_cfr(10);
  double weak = tabularized_exploitability(idx, cfg);
  cfg.value_fn = ValueFunctionHandle::exact_cfr(40);
  double strong = tabularized_exploitability(idx, cfg);
  CHECK(std::isfinite(weak));
  CHECK(strong <= weak * 1.1 + 1e-3);
}

TEST_CASE("tabularization is deterministic") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  ResolveConfig cfg;
  cfg.iters = 300;
  ResolvingAgent a(idx, 0, cfg), b(idx, 0, cfg);
  BehaviorPolicy ta = tabularize(idx, a);
  BehaviorPolicy tb = tabularize(idx, b);
  CHECK(ta.probs == tb.probs);

  // Repeated new_game leaves the cached state identical.
  a.new_game();
  a.new_game();
  int32_t s = -1;
  for (size_t i = 0; i < idx.infos[0].size(); ++i) {
    if (idx.is_decision(0, static_cast<int32_t>(i))) {
      s = static_cast<int32_t>(i);
      break;
    }
  }
  OnlineAgent::Act first = a.act(s);
  a.new_game();
  OnlineAgent::Act again = a.act(s);
  CHECK(first.action_index == again.action_index);
  CHECK(first.row == again.row);
}

TEST_CASE("safety chain holds after each resolve on kuhn") {
  TreeIndex idx = enumerate(make_game("kuhn"));
  ResolveConfig cfg;
  cfg.iters = 2000;
  ResolvingAgent agent(idx, 1, cfg);
  agent.new_game();
  // Walk every depth-2 public state with player-2 decisions and compare the
  // re-solved sub-game's opponent values against the stored bounds.
  for (size_t p = 0; p < idx.pubs.size(); ++p) {
    int32_t pub = static_cast<int32_t>(p);
    bool decides = false;
    for (int32_t s : idx.pubs[p].members[1]) {
      if (idx.is_decision(1, s)) decides = true;
    }
    if (!decides || idx.pubs[p].depth != 2) continue;
    // With a full lookahead the covering solve for depth-2 states is the
    // root solve, whose averaged values are the stored bounds.
    const LookaheadSolve& root_ls = agent.solve_for(0);
    const LookaheadSolve& ls = agent.solve_for(pub);
    for (int32_t s : idx.pubs[p].members[0]) {
      CHECK(ls.avg_cfv[0][s] <= root_ls.avg_cfv[0][s] + 0.15);
    }
  }
}

}  // namespace
}  // namespace fosg
