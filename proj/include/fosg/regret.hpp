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
// Local regret minimizers and matrix-game self-play dynamics: regret
// matching self-play with the folk-theorem bound, best-responding
// divergence demos, fictitious play and the double-oracle loop.

#ifndef FOSG_REGRET_H_
#define FOSG_REGRET_H_

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "fosg/games.hpp"

namespace fosg {

enum class MinimizerKind { kGreedy, kRm, kRmPlus, kHedge };

struct RegretState {
  MinimizerKind kind = MinimizerKind::kRm;
  double beta = 1.0;  // hedge temperature
  std::vector<double> regret;
  int64_t t = 0;
};

RegretState make_regret_state(MinimizerKind kind, int num_actions,
                              double beta = 1.0);

// The prescription beta = sqrt(2 ln|A| / T) when the horizon is known.
double hedge_beta(int num_actions, int64_t horizon);

// Current policy of the minimizer.  rm/rm_plus play proportionally to
// positive cumulative regret (uniform if none is positive); greedy plays the
// argmax; hedge plays exponentially in cumulative regret.
std::vector<double> next_policy(const RegretState& state);

// Adds the instantaneous regret x(a) - <played, x>; rm_plus then clamps the
// store at zero.
void observe(RegretState& state, const std::vector<double>& reward,
             const std::vector<double>& played);

// Largest positive cumulative regret (0 if none): the R^T of the bounds.
double max_regret(const RegretState& state);

// --- matrix-game helpers ---------------------------------------------------

// Reward vectors of a zero-sum matrix game: u1 = A y, u2 = -A^T x.
std::vector<double> row_rewards(const MatrixGameSpec& a,
                                const std::vector<double>& y);
std::vector<double> col_rewards(const MatrixGameSpec& a,
                                const std::vector<double>& x);
double matrix_value(const MatrixGameSpec& a, const std::vector<double>& x,
                    const std::vector<double>& y);
// max_i (Ay)_i - min_j (x^T A)_j >= 0, zero exactly at equilibrium.
double matrix_nashconv(const MatrixGameSpec& a, const std::vector<double>& x,
                       const std::vector<double>& y);

// --- self-play dynamics -----------------------------------------------------

enum class UpdateMode { kSimultaneous, kAlternating };

struct TracePoint {
  int64_t iter = 0;
  double nashconv = 0;
  double r1 = 0, r2 = 0;  // max positive cumulative regrets
};

struct SelfplayResult {
  std::array<std::vector<double>, 2> avg;      // uniform average policies
  std::array<RegretState, 2> state;            // final minimizer states
  std::vector<TracePoint> trace;               // geometric checkpoints
};

SelfplayResult matrix_selfplay(const MatrixGameSpec& a, MinimizerKind kind,
                               int64_t steps,
                               UpdateMode mode = UpdateMode::kSimultaneous);

// Picks among tied best responses given the reward vector.
using MatrixTieBreak = std::function<int(int player,
                                         const std::vector<double>& rewards)>;

struct BrSequenceResult {
  std::vector<std::array<int, 2>> actions;  // pure profile per step
  std::array<std::vector<double>, 2> avg;
  bool current_converged = false;
  bool average_converged = false;
};

// Iterated pure best response to the opponent's previous action, both
// players starting at action 0.  Ties default to the lowest index.
BrSequenceResult best_respond_sequence(const MatrixGameSpec& a, int64_t steps,
                                       const MatrixTieBreak* tie_break = nullptr);

struct FictitiousPlayResult {
  std::array<std::vector<double>, 2> avg;
  std::vector<TracePoint> trace;
};

// Pure best response to the opponent's empirical average policy.
FictitiousPlayResult fictitious_play(const MatrixGameSpec& a, int64_t steps);

struct DoubleOracleResult {
  std::array<std::vector<int>, 2> actions;       // final restricted sets
  std::array<std::vector<double>, 2> profile;    // over the full action space
  double residual = 0;  // full-game nashconv of the returned profile
  int rounds = 0;
};

// Restricted-game equilibria via rm_plus self-play; expands each player's
// set with their full-game best response until no strict improvement.
DoubleOracleResult double_oracle(const MatrixGameSpec& a, int64_t inner_steps,
                                 std::array<std::vector<int>, 2> start = {
                                     std::vector<int>{0}, std::vector<int>{0}});

}  // namespace fosg

#endif  // FOSG_REGRET_H_
