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
// Public-tree CFR / CFR+ over a TreeIndex, runnable from any public state
// with fixed root ranges, optionally behind a re-solving gadget head where
// the opponent may take a Terminate value instead of entering the sub-game.

#ifndef FOSG_CFR_H_
#define FOSG_CFR_H_

#include <array>
#include <cstdint>
#include <limits>
#include <unordered_set>
#include <vector>

#include "fosg/bestresponse.hpp"
#include "fosg/engine.hpp"
#include "fosg/policy.hpp"
#include "fosg/regret.hpp"

namespace fosg {

enum class Averaging { kUniform, kLinear };

struct CfrConfig {
  MinimizerKind minimizer = MinimizerKind::kRm;  // rm or rm_plus
  UpdateMode mode = UpdateMode::kSimultaneous;   // alternating: player 1 first
  Averaging averaging = Averaging::kUniform;
  // Fraction of the planned iterations excluded from the averages (both the
  // average policy and the averaged counterfactual values).
  double skip_fraction = 0.0;
};

inline CfrConfig cfr_plus_config() {
  return {MinimizerKind::kRmPlus, UpdateMode::kAlternating, Averaging::kLinear,
          0.0};
}

// Where to run: the whole game by default, or a public sub-game with fixed
// root ranges, optionally with the CFR-D gadget head for one player.
struct SubgameRootSpec {
  int32_t root_pub = 0;
  // Fixed root reach per member infostate, in pubs[root].members order;
  // empty means all ones.
  std::array<std::vector<double>, 2> range;
  // CFR-D head: `gadget_player` chooses per root infostate between a
  // Terminate value `bound[s']` (counterfactual units) and following into
  // the sub-game; +inf forces Follow.  Its entry in `range` is then the
  // reach cap multiplied by the head's Follow probability each iteration.
  int gadget_player = -1;
  std::vector<double> bound;
  // Depth limit: public states where each pass stops and consults value_fn
  // with that iteration's downward reaches.  Regret and average-policy
  // updates then cover only the lookahead; frontier counterfactual values
  // still enter the value averages.
  const std::unordered_set<int32_t>* frontier = nullptr;
  const ValueFn* value_fn = nullptr;
};

struct CfrDiagnostics {
  struct Point {
    int64_t iter = 0;
    double nashconv = 0;  // full-game solves only
    std::array<double, 2> sum_pos_regret = {0, 0};
    std::array<double, 2> full_regret = {0, 0};
  };
  std::vector<Point> points;
};

class CfrSolver {
 public:
  CfrSolver(const TreeIndex& idx, const CfrConfig& cfg,
            SubgameRootSpec root = {});

  // Runs T iterations; the averaging warm-up skip is skip_fraction * T.
  // `log` records diagnostics at geometric checkpoints (full-game roots).
  void run(int64_t T, bool log = false);

  PolicyProfile average() const;
  BehaviorPolicy average_policy(int player) const;
  PolicyProfile current() const;

  double sum_pos_regret(int player) const;
  // Full regret: T_p * BRV(opponent's running average) - realized.
  double full_regret(int player) const;
  // Weight-averaged counterfactual values (skip applied), per infostate.
  std::vector<double> avg_cfv(int player) const;
  // Same, restricted to root members (pubs[root].members order).
  std::vector<double> avg_root_cfv(int player) const;
  // Average Follow probability of the gadget head per root member.
  std::vector<double> avg_follow() const;

  int64_t iterations() const { return t_; }
  const CfrDiagnostics& diagnostics() const { return diag_; }
  Engine& engine() { return engine_; }
  // Lookahead public states: the updated interior, and the same including
  // the frontier (whole subtree when no frontier is set).
  const std::vector<int32_t>& lookahead() const { return lookahead_; }
  const std::vector<int32_t>& lookahead_with_frontier() const {
    return lookahead_all_;
  }

 private:
  void iteration(int64_t t, int64_t skip_until, int64_t total);
  void pass_and_update(int updating, double avg_w);
  double head_follow_prob(size_t k) const;

  const TreeIndex& idx_;
  CfrConfig cfg_;
  SubgameRootSpec root_;
  Engine engine_;
  int64_t t_ = 0;
  std::vector<int32_t> lookahead_;
  std::vector<int32_t> lookahead_all_;

  std::array<std::vector<double>, 2> regret_;    // flat per (infostate, action)
  std::array<std::vector<double>, 2> cur_;       // current policies
  std::array<std::vector<double>, 2> avg_mass_;  // reach-weighted action mass
  std::array<std::vector<double>, 2> cfv_acc_;   // weighted value sums
  std::array<double, 2> weight_sum_ = {0, 0};

  // Gadget head state: RM+ regrets and averages per root member of the
  // gadget player ([0] = Terminate, [1] = Follow).
  std::vector<std::array<double, 2>> head_regret_;
  std::vector<double> head_follow_acc_;
  std::vector<double> head_cur_follow_;

  // Full-regret bookkeeping (uniform weights, never skipped).
  std::array<double, 2> realized_ = {0, 0};
  std::array<int64_t, 2> updates_ = {0, 0};
  std::array<std::vector<double>, 2> opp_mass_;  // opponent policy average

  CfrDiagnostics diag_;
};

std::pair<PolicyProfile, CfrDiagnostics> run_cfr(const TreeIndex& idx,
                                                 const CfrConfig& cfg,
                                                 int64_t T);

// Counterfactual values at a public state under fixed ranges and policies
// (one engine pass; no solving).  Ranges and outputs use sorted_members
// order.
struct CfvResult {
  std::array<std::vector<double>, 2> v;
  // Per-action values, aligned with v's infostate order; inner vectors are
  // per legal action.
  std::array<std::vector<std::vector<double>>, 2> q;
};
CfvResult compute_values(const TreeIndex& idx, int32_t s_pub,
                         const std::vector<double>& range1,
                         const std::vector<double>& range2,
                         const PolicyProfile& profile);

// Game value to player 1 from a high-precision CFR+ solve, cached per game
// name.
double cached_game_value(const TreeIndex& idx);

}  // namespace fosg

#endif  // FOSG_CFR_H_
