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
//
// Online search: depth-limited CFR over a lookahead tree with a value
// function at the frontier, and the continual re-solving agent that chains
// its own range and the opponent's averaged counterfactual values from one
// solve to the next.

#ifndef FOSG_RESOLVE_H_
#define FOSG_RESOLVE_H_

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fosg/cfr.hpp"
#include "fosg/policy.hpp"
#include "fosg/rng.hpp"
#include "fosg/tree.hpp"

namespace fosg {

// How frontier public states are valued during a depth-limited solve.
struct ValueFunctionHandle {
  enum class Kind { kTerminalOnly, kExactCfr };
  Kind kind = Kind::kTerminalOnly;
  int64_t iters = 100;  // inner cfr+ iterations for kExactCfr

  static ValueFunctionHandle terminal_only() { return {}; }
  static ValueFunctionHandle exact_cfr(int64_t iters) {
    return {Kind::kExactCfr, iters};
  }
};

// Where the lookahead stops.
struct DepthPolicy {
  enum class Kind { kFull, kSteps, kUntilPublicEvent };
  Kind kind = Kind::kFull;
  int steps = 1;

  static DepthPolicy full() { return {}; }
  static DepthPolicy n_steps(int n) { return {Kind::kSteps, n}; }
  static DepthPolicy until_public_event() {
    return {Kind::kUntilPublicEvent, 0};
  }
};

// Non-terminal public states where the lookahead from root_pub is cut.
std::unordered_set<int32_t> compute_frontier(const TreeIndex& idx,
                                             int32_t root_pub,
                                             const DepthPolicy& depth);

// Engine-facing value function (pubs.members-order reaches and values) for
// a handle; kExactCfr solves the sub-game under the iteration's reaches and
// returns zero-regret (counterfactual best-response) values.  A
// kTerminalOnly handle must never be consulted: it throws with the frontier
// node id.
ValueFn make_value_fn(const TreeIndex& idx, const ValueFunctionHandle& vf);

// One solved lookahead: the average profile inside, plus everything a later
// re-solve retrieves — averaged counterfactual values at every lookahead
// public state and the own player's reach under the average profile.
// Per-infostate vectors are indexed by global infostate id.
struct LookaheadSolve {
  int32_t root_pub = 0;
  std::vector<int32_t> pubs;  // lookahead including the frontier
  std::unordered_set<int32_t> frontier;
  PolicyProfile avg;
  std::array<std::vector<double>, 2> avg_cfv;
  std::array<std::vector<double>, 2> reach;  // under avg, incl. root range
};

LookaheadSolve depth_limited_cfr(const TreeIndex& idx, SubgameRootSpec root,
                                 const ValueFunctionHandle& vf,
                                 const DepthPolicy& depth,
                                 const CfrConfig& cfg, int64_t T);

inline CfrConfig resolve_cfr_config() {
  CfrConfig cfg = cfr_plus_config();
  cfg.skip_fraction = 0.5;  // warm-up skipped in averages and invariants
  return cfg;
}

struct ResolveConfig {
  int64_t iters = 1000;  // T per resolve
  CfrConfig cfr = resolve_cfr_config();
  ValueFunctionHandle value_fn;
  DepthPolicy depth;
  uint64_t seed = 0;
  // Cache resolves (and the first sampled action) per public state across
  // games; disable for determinism audits.
  bool cache = true;
};

// An online player queried one own decision infostate at a time, in order
// along a line of play.
class OnlineAgent {
 public:
  struct Act {
    int action_index = 0;
    Token action = kNullToken;
    std::vector<double> row;  // policy over the infostate's actions
  };

  virtual ~OnlineAgent() = default;
  virtual int player() const = 0;
  virtual void new_game() = 0;
  virtual Act act(int32_t infostate) = 0;
};

// Continual re-solving: new_game solves the root lookahead; each act
// re-solves the current public state behind a CFR-D gadget whose own range
// and opponent bounds come from the solve covering that state.
class ResolvingAgent : public OnlineAgent {
 public:
  ResolvingAgent(const TreeIndex& idx, int player, ResolveConfig cfg);

  int player() const override { return player_; }
  void new_game() override;
  Act act(int32_t infostate) override;

  // Re-solves run and own infostates served with an all-zero range (uniform
  // fallback), for diagnostics.
  int64_t solves() const { return solves_; }
  int64_t range_fallbacks() const { return range_fallbacks_; }
  // The solve covering decisions at `pub` (resolving it and its ancestor
  // chain on demand).
  const LookaheadSolve& solve_for(int32_t pub);

 private:
  const TreeIndex& idx_;
  int player_;
  ResolveConfig cfg_;
  Rng rng_;
  std::unordered_map<int32_t, LookaheadSolve> solves_by_pub_;
  std::unordered_map<int32_t, int> first_action_;
  int64_t solves_ = 0;
  int64_t range_fallbacks_ = 0;
};

// Replays a fixed offline policy (e.g. a CFR average) through the online
// interface.
class FixedPolicyAgent : public OnlineAgent {
 public:
  FixedPolicyAgent(const TreeIndex& idx, BehaviorPolicy policy, uint64_t seed);

  int player() const override { return policy_.player; }
  void new_game() override;
  Act act(int32_t infostate) override;

 private:
  const TreeIndex& idx_;
  BehaviorPolicy policy_;
  uint64_t seed_;
  Rng rng_;
};

// Queries the agent along every line of play (fresh game per line) and
// assembles the complete offline policy; throws if two queries of the same
// infostate disagree beyond 1e-9 (tabularization needs a stateless agent).
BehaviorPolicy tabularize(const TreeIndex& idx, OnlineAgent& agent);

}  // namespace fosg

#endif  // FOSG_RESOLVE_H_
