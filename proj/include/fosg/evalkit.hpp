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
// Match simulation and unbiased variance-reduced evaluation: plain Monte
// Carlo, imaginary observations (range evaluation over the evaluated
// agent's compatible private states), MIVAT-style chance corrections, and
// AIVAT (imaginary observations plus corrections at chance steps and the
// evaluated agent's own decisions).  Plus the per-infostate stitching
// consistency demonstration.

#ifndef FOSG_EVALKIT_H_
#define FOSG_EVALKIT_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fosg/mccfr.hpp"
#include "fosg/policy.hpp"
#include "fosg/tree.hpp"

namespace fosg {

// One step of a recorded match: the realized transition plus everything the
// estimators may condition on.
struct MatchStep {
  int32_t hist = 0;  // history before the step
  int32_t next = 0;  // realized history after the step
  int decider = -1;  // acting player, -1 for a pure chance step
  int action_index = -1;          // decider's action (index into their row)
  std::vector<double> row;        // decider's policy row (players only)
  // Outcome distribution given the realized joint action, and the
  // corresponding successor histories.
  std::vector<double> chance;
  std::vector<int32_t> chance_next;
  // The evaluated agent's reach over the pre-step public state's member
  // infostates (sorted_members order).
  std::vector<double> own_range;
};

struct MatchRecord {
  uint64_t seed = 0;
  int evaluated = 0;  // the agent the estimators score
  int32_t terminal = 0;
  std::array<double, 2> payoff = {0, 0};
  std::vector<MatchStep> steps;
  // Evaluated agent's reach at the terminal public state (sorted order).
  std::vector<double> terminal_range;
};

// Annotated record for a given terminal under fixed policies (the
// deterministic core of simulation, also the exhaustive-test entry point).
MatchRecord record_for_terminal(const TreeIndex& idx,
                                const PolicyProfile& profile, int evaluated,
                                int32_t terminal, uint64_t seed = 0);

// k independent seeded matches under fixed policies.
std::vector<MatchRecord> simulate_matches(const TreeIndex& idx,
                                          const PolicyProfile& profile,
                                          int evaluated, int64_t k,
                                          uint64_t seed);

// Duplicate evaluation: `pairs` pairs of matches replaying the same chance
// draws with the hero policies in seat 1 and then in seat 2; every record
// evaluates the hero's seat.
std::vector<MatchRecord> duplicate_matches(const TreeIndex& idx,
                                           const PolicyProfile& hero,
                                           const PolicyProfile& villain,
                                           int64_t pairs, uint64_t seed);

enum class Estimator { kMc, kImaginary, kMivat, kMivatImaginary, kAivat };
std::string estimator_name(Estimator e);

struct EstimatorReport {
  std::string name;
  std::vector<double> values;  // per-match corrected value
  double mean = 0;
  double sd = 0;  // sample standard deviation (n - 1)
  int64_t count = 0;
};

// Scores records for their evaluated agent.  `baselines` supplies b(h) for
// the correction terms (null = zeros; exact_history_values of a reference
// profile is the intended source).  `correct_opponent` extends aivat's
// action corrections to the opponent's recorded rows — only meaningful in
// self-play, where the opponent's policy is known; default off.
EstimatorReport estimate(const TreeIndex& idx,
                         const std::vector<MatchRecord>& records,
                         Estimator method,
                         const HistoryValues* baselines = nullptr,
                         bool correct_opponent = false);

// Per-match value of a single record (the fold estimate() aggregates).
double estimate_record(const TreeIndex& idx, const MatchRecord& rec,
                       Estimator method,
                       const HistoryValues* baselines = nullptr,
                       bool correct_opponent = false);

// Consistency demonstration: independent solves steered toward different
// equilibria, stitched into one profile per-infostate.  A bias adds a small
// constant to the action's cumulative regret each iteration, which selects
// among equilibrium rows at the infostate without restricting anyone — so a
// biased solve still converges to a full-game (near-)equilibrium whenever
// the action is part of one.
struct BiasConfig {
  struct Bias {
    int player = 0;
    int32_t infostate = 0;
    int action = 0;
  };
  std::vector<Bias> biases;
  double strength = 0.1;  // regret bonus per iteration
};

struct ConsistencyReport {
  std::vector<double> individual_nashconv;  // one per config
  double stitched_nashconv = 0;
  PolicyProfile stitched;
};

// Solves once per config under its biases, stitches each config's biased
// rows (config 0 supplies everything else), and reports nashconv of the
// individual solves and of the stitched profile.
ConsistencyReport consistency_demo(const TreeIndex& idx,
                                   const std::vector<BiasConfig>& configs,
                                   int64_t T);

}  // namespace fosg

#endif  // FOSG_EVALKIT_H_
