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
// Public sub-games and re-solving constructions: the rooted sub-game dealt
// from ranges, generalized value functions, unsafe re-solving, and the two
// safe re-solving gadgets (constraint-based and max-margin), with the
// sub-game margin measure.
//
// Unless noted otherwise, all per-infostate vectors here (ranges, bounds,
// values) are indexed in sorted_members order of the public state.

#ifndef FOSG_SUBGAME_H_
#define FOSG_SUBGAME_H_

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fosg/cfr.hpp"
#include "fosg/policy.hpp"
#include "fosg/tree.hpp"

namespace fosg {

// Remaps a sorted_members-order vector into pubs[pub].members order (the
// engine's native root-range layout).
std::vector<double> sorted_to_members(const TreeIndex& idx, int32_t pub,
                                      int player,
                                      const std::vector<double>& sorted);

struct CfvVector {
  int32_t pub = 0;
  int player = 0;
  std::vector<double> v;  // per member infostate, game payoff units
};

// A sub-game as a standalone game: an initial chance step deals the root
// public state's histories with probability ∝ range₁·range₂·P_c, revealing
// each player's original infostate privately; play then continues as in the
// original game with the original terminal returns.
struct PublicSubgame {
  int32_t pub = 0;
  std::array<std::vector<double>, 2> range;
  double mass = 0;  // normalization constant of the deal
  std::shared_ptr<Game> game;
  std::vector<int32_t> dealt;  // original root histories, in deal order
};

PublicSubgame build_subgame(const TreeIndex& idx, int32_t s_pub,
                            const std::vector<double>& range1,
                            const std::vector<double>& range2);

// Solves the sub-game under fixed ranges with 'iters' iterations of cfr+
// and returns both players' counterfactual best-response values against the
// average profile, in the engine's full-game units (consistent with the
// supplied unnormalized ranges).
std::pair<CfvVector, CfvVector> value_function_exact(
    const TreeIndex& idx, int32_t s_pub, const std::vector<double>& range1,
    const std::vector<double>& range2, int64_t iters);

// Opponent counterfactual best-response values at a public state when
// `own` plays own_policy everywhere and the opponent best-responds below;
// own range is own_policy's reach of the public state.
std::vector<double> opp_cbrv(const TreeIndex& idx, int32_t s_pub, int own,
                             const BehaviorPolicy& own_policy);

// Copies `inner` over `trunk` at every infostate inside the public subtree.
BehaviorPolicy splice_policy(const TreeIndex& idx, int32_t s_pub,
                             const BehaviorPolicy& trunk,
                             const BehaviorPolicy& inner);

// Re-solves the sub-game from both players' trunk reaches; no safety
// guarantee.  If purify >= 0, that player's sub-game rows are replaced by a
// lowest-index-tie best response to the solved average — a legitimate
// zero-regret selection that exhibits the failure mode.
PolicyProfile unsafe_resolve(const TreeIndex& idx, int32_t s_pub,
                             const PolicyProfile& trunk, int64_t iters,
                             int purify = -1);

// A re-solving gadget as a standalone game for the own player `own`; the
// opponent is dealt their root infostates with probability ∝ their
// counterfactual reach mass k(s') = Σ_h own_range·P_c.
struct GadgetGame {
  enum class Kind { kCfrd, kMaxMargin };
  Kind kind = Kind::kCfrd;
  int own = 0;
  int32_t pub = 0;
  std::shared_ptr<Game> game;
  double mass = 0;            // K = Σ k(s')
  std::vector<double> k;      // per opponent root infostate
  std::vector<std::string> dropped;  // zero-mass branches removed
};

// Constraint gadget: the opponent may Terminate for bound(s') — encoded as
// a terminal utility bound·K/k(s') so its in-gadget counterfactual value is
// exactly the bound — or Follow into the sub-game, whose utilities are
// scaled by K so counterfactual values keep their original units.  An
// infinite bound removes the Terminate action.
GadgetGame build_cfrd_gadget(const TreeIndex& idx, int32_t s_pub, int own,
                             const std::vector<double>& own_range,
                             const std::vector<double>& opp_cfv_bound);

// Max-margin gadget: the opponent picks their starting infostate; member
// histories are dealt ∝ own_range·P_c normalized within the choice, and the
// opponent's terminal returns are shifted by −opp_value(s') (own returns
// negated to stay zero-sum).  opp_value is in the gadget's normalized
// units: the opponent's counterfactual value divided by k(s'), so under the
// original policy every choice is worth 0 and the gadget's value to the own
// player is the achievable max-min margin.
GadgetGame build_maxmargin_gadget(const TreeIndex& idx, int32_t s_pub,
                                  int own,
                                  const std::vector<double>& own_range,
                                  const std::vector<double>& opp_value);

// The opponent's normalized values for build_maxmargin_gadget, from the
// original policy: opp_cbrv / k(s') (0 where k = 0).
std::vector<double> normalized_opp_values(const TreeIndex& idx, int32_t s_pub,
                                          int own,
                                          const BehaviorPolicy& own_policy);

// Maps the own player's rows of a solved gadget policy back onto the
// original infostates, over `base`.  Verifies the follow-branch bijection:
// every reachable original sub-game decision infostate of the own player
// corresponds to exactly one gadget infostate with identical action lists.
BehaviorPolicy map_gadget_policy(const GadgetGame& gadget,
                                 const TreeIndex& gadget_idx,
                                 const TreeIndex& idx,
                                 const BehaviorPolicy& gadget_policy,
                                 const BehaviorPolicy& base);

// One-call refinement of the own player's sub-game rows below s_pub, by
// technique name: "unsafe" (re-solve from both trunk reaches, then purify —
// the failure mode), "cfrd" (constraint gadget) or "maxmargin".  The trunk
// profile supplies ranges, bounds and the rows kept above the sub-game.
BehaviorPolicy refine_subgame(const TreeIndex& idx, int32_t s_pub, int own,
                              const PolicyProfile& trunk,
                              const std::string& technique, int64_t iters);

// min over opponent root infostates of CBRV(original) − CBRV(refined);
// both policies must agree above the public state (the trunk), so the
// comparison uses matched ranges.
double subgame_margin(const TreeIndex& idx, int32_t s_pub, int own,
                      const BehaviorPolicy& original,
                      const BehaviorPolicy& refined);

}  // namespace fosg

#endif  // FOSG_SUBGAME_H_
