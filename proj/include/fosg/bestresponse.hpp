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
// Exact best response, counterfactual best response, and NashConv /
// exploitability metrics.

#ifndef FOSG_BESTRESPONSE_H_
#define FOSG_BESTRESPONSE_H_

#include <array>
#include <cmath>
#include <vector>

#include "fosg/engine.hpp"
#include "fosg/policy.hpp"
#include "fosg/tree.hpp"

namespace fosg {

struct BrResult {
  BehaviorPolicy policy;  // deterministic at every decision infostate
  double brv = 0.0;       // value to the responder at the root
  // Counterfactual best-response value per responder infostate (global id),
  // and the per-action counterfactual values it dominates.
  std::vector<double> cbrv;
  std::vector<double> q;
};

// Best response of `responder` against the opponent's fixed policy.  The
// argmax is taken at every responder infostate from counterfactual action
// values, ties broken by lowest action index (or `tie_break`).
BrResult best_response(const TreeIndex& idx, const BehaviorPolicy& fixed,
                       int responder, const TieBreak* tie_break = nullptr);

// The counterfactual best response: identical computation — the
// per-infostate argmax already covers zero-reach infostates — exposed under
// its own name to mirror the formal object.
BrResult cf_best_response(const TreeIndex& idx, const BehaviorPolicy& fixed,
                          int responder, const TieBreak* tie_break = nullptr);

struct NashConvResult {
  std::array<double, 2> brv = {0, 0};  // brv[p]: responder p vs fixed opponent
  // Per-player exploitability gap; requires the game value (to player 1).
  std::array<double, 2> delta = {NAN, NAN};
  double nashconv = 0.0;
  double exploitability = 0.0;
};

// nashconv = BRV₁ + BRV₂ (the game values cancel in the zero-sum sum);
// pass the game value gv1 (to player 1) to also report δ₁ = BRV₂ + gv1 and
// δ₂ = BRV₁ − gv1.
NashConvResult nashconv(const TreeIndex& idx, const PolicyProfile& profile,
                        double gv1 = NAN);

}  // namespace fosg

#endif  // FOSG_BESTRESPONSE_H_
