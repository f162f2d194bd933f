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
// Behavioral policies over a TreeIndex, reach probabilities, ranges at
// public states, reach-weighted policy averaging, and a plain-text strategy
// format.

#ifndef FOSG_POLICY_H_
#define FOSG_POLICY_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fosg/tree.hpp"

namespace fosg {

// One player's behavioral policy: a probability row per infostate, stored
// flat at the TreeIndex's act_offset slots.  Non-decision rows hold 1.
struct BehaviorPolicy {
  int player = 0;
  std::vector<double> probs;
};

struct PolicyProfile {
  std::array<BehaviorPolicy, 2> pi;
};

// A reach-weight vector over one player's member infostates of a public
// state, in sorted_members order.
struct Range {
  int32_t pub = 0;
  int player = 0;
  bool normalized = false;
  std::vector<double> w;
};

BehaviorPolicy uniform_policy(const TreeIndex& idx, int player);
PolicyProfile uniform_profile(const TreeIndex& idx);

// Validates shape, non-negativity and row sums (1e-9).
void check_policy(const TreeIndex& idx, const BehaviorPolicy& policy);

struct ReachFactors {
  double chance = 1.0;
  std::array<double, 2> player = {1.0, 1.0};
};

// Factored reach probability of a history: P(h) = chance * p1 * p2.
ReachFactors reach(const TreeIndex& idx, const PolicyProfile& profile,
                   int32_t hist);

// The acting player's own reach of an infostate (product of own action
// probabilities along its action-observation history).
double info_reach(const TreeIndex& idx, const BehaviorPolicy& policy,
                  int32_t s);

// Expected cumulative return per player under the profile.
std::array<double, 2> expected_return(const TreeIndex& idx,
                                      const PolicyProfile& profile);

// Reach-weighted average of several policies of the same player: the policy
// realization-equivalent to picking policy k with probability weight[k].
// Infostates no policy reaches fall back to uniform.
BehaviorPolicy average_policies(const TreeIndex& idx,
                                const std::vector<BehaviorPolicy>& policies,
                                const std::vector<double>& weights);

// Actions with probability above `eps` at infostate s.
std::vector<int> support(const TreeIndex& idx, const BehaviorPolicy& policy,
                         int32_t s, double eps = 1e-9);

// Unnormalized own-reach range at a public state (sorted_members order);
// set `normalize` for a distribution (throws if the total reach is 0).
Range range_at(const TreeIndex& idx, const BehaviorPolicy& policy, int32_t pub,
               bool normalize = false);

// One line per decision infostate: "KEY action=prob ...", keys sorted,
// probabilities with 12 significant digits.
std::string policy_to_text(const TreeIndex& idx, const BehaviorPolicy& policy);
BehaviorPolicy policy_from_text(const TreeIndex& idx, int player,
                                const std::string& text);

}  // namespace fosg

#endif  // FOSG_POLICY_H_
