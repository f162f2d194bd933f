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

#include "fosg/bestresponse.hpp"

namespace fosg {

BrResult best_response(const TreeIndex& idx, const BehaviorPolicy& fixed,
                       int responder, const TieBreak* tie_break) {
  int opp = 1 - responder;
  if (fixed.player != opp) {
    throw std::invalid_argument("best_response: fixed policy has wrong owner");
  }
  BehaviorPolicy own = uniform_policy(idx, responder);

  Engine engine(idx);
  Engine::Options opts;
  opts.policy[opp] = fixed.probs.data();
  opts.policy[responder] = own.probs.data();
  opts.responder[responder] = true;
  opts.tie_break = tie_break;
  const Engine::Result& res = engine.run(opts);

  BrResult out;
  out.policy.player = responder;
  out.policy.probs.assign(idx.total_actions[responder], 0.0);
  for (size_t s = 0; s < idx.infos[responder].size(); ++s) {
    size_t n = idx.infos[responder][s].actions.size();
    if (n == 0) continue;
    int pick = res.br_action[responder][s];
    out.policy.probs[idx.act_offset[responder][s] + (pick >= 0 ? pick : 0)] =
        1.0;
  }
  out.brv = res.v[responder][idx.hists[0].info[responder]];
  out.cbrv = res.v[responder];
  out.q = res.q[responder];
  return out;
}

BrResult cf_best_response(const TreeIndex& idx, const BehaviorPolicy& fixed,
                          int responder, const TieBreak* tie_break) {
  return best_response(idx, fixed, responder, tie_break);
}

NashConvResult nashconv(const TreeIndex& idx, const PolicyProfile& profile,
                        double gv1) {
  NashConvResult out;
  for (int p = 0; p < 2; ++p) {
    out.brv[p] = best_response(idx, profile.pi[1 - p], p).brv;
  }
  out.nashconv = out.brv[0] + out.brv[1];
  out.exploitability = out.nashconv / 2;
  if (!std::isnan(gv1)) {
    out.delta[0] = out.brv[1] + gv1;
    out.delta[1] = out.brv[0] - gv1;
  }
  return out;
}

}  // namespace fosg
