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
// Outcome-sampling MCCFR and its variance-reduced variant with learned or
// oracle baselines.  A trajectory is sampled with an exploratory policy ξ
// (an ε-mix of uniform and the current policy, at both players' decisions;
// chance is sampled at its true probabilities), then evaluated bottom-up by
// a deterministic routine — so tests can also enumerate every terminal and
// verify the estimators' expectations exactly.

#ifndef FOSG_MCCFR_H_
#define FOSG_MCCFR_H_

#include <array>
#include <cstdint>
#include <vector>

#include "fosg/policy.hpp"
#include "fosg/rng.hpp"
#include "fosg/tree.hpp"

namespace fosg {

struct SampleScheme {
  double eps_explore = 0.6;  // ξ = eps/|A| + (1-eps)·π, so ξ > 0 everywhere
  uint64_t seed = 0;
};

enum class MccfrVariant { kOs, kVr, kVrOracle };

// Learned control variates: b[owner][actor] holds, at the acting player's
// flat (infostate, action) slots, the running estimate of `owner`'s value
// after that action.  Refreshed as b ← (1-α)·b + α·observed.
struct BaselineTable {
  double alpha = 0.5;
  std::array<std::array<std::vector<double>, 2>, 2> b;
};
BaselineTable make_baselines(const TreeIndex& idx, double alpha = 0.5);

// Exact expected terminal return per history under a profile (conditioned
// on reaching the history): the oracle baseline, also used as a reference
// value source elsewhere.
struct HistoryValues {
  std::array<std::vector<double>, 2> v;
};
HistoryValues exact_history_values(const TreeIndex& idx,
                                   const PolicyProfile& profile);

struct MccfrTables {
  std::array<std::vector<double>, 2> regret;
  std::array<std::vector<double>, 2> avg_mass;
  int64_t t = 0;
  uint64_t node_touches = 0;
};
MccfrTables make_mccfr_tables(const TreeIndex& idx);

// Deterministic bottom-up evaluation of one root→terminal path for the
// updating player: local action-value estimates q̂ and v̂ at each of their
// decision nodes (with the counterfactual weight w, so w·v̂ is the sampled
// counterfactual value), the bootstrapped per-history estimates, and the
// path's sampling probability P^ξ(z).
struct PathEstimates {
  double sample_prob = 1.0;
  std::vector<double> hist_value;  // v̂ of the updating player, root..z
  struct Node {
    int32_t hist = 0;
    int32_t s = 0;
    double w = 1.0;          // π_{-i}-over-ξ prefix weight
    double own_reach = 1.0;  // updating player's policy reach of the node
    double sprob = 1.0;      // P^ξ of reaching the node
    std::vector<double> q;
    double v = 0;
  };
  std::vector<Node> nodes;  // the updating player's decision nodes on z
};
PathEstimates evaluate_path(const TreeIndex& idx, int updating,
                            int32_t terminal, const PolicyProfile& policies,
                            MccfrVariant variant, const SampleScheme& scheme,
                            const BaselineTable* baselines,
                            const HistoryValues* oracle);

// Samples one terminal under ξ derived from the tables' current policies.
int32_t sample_terminal(const TreeIndex& idx, const MccfrTables& tables,
                        const SampleScheme& scheme, Rng& rng);

// One iteration = one sampled trajectory and update per updating player
// (player 1 first).  Returns the sampled terminals.
std::array<int32_t, 2> os_iteration(const TreeIndex& idx, MccfrTables& tables,
                                    const SampleScheme& scheme, Rng& rng);
std::array<int32_t, 2> vr_iteration(const TreeIndex& idx, MccfrTables& tables,
                                    const SampleScheme& scheme, Rng& rng,
                                    BaselineTable& baselines);

// Current / average policies of the tables (zero-mass rows fall back to
// uniform).
PolicyProfile mccfr_current(const TreeIndex& idx, const MccfrTables& tables);
PolicyProfile mccfr_average(const TreeIndex& idx, const MccfrTables& tables);

struct MccfrDiagnostics {
  struct Point {
    int64_t iter = 0;
    uint64_t node_touches = 0;
    double nashconv = 0;
    double probe_variance = 0;
  };
  std::vector<Point> points;
};

// Runs T iterations of the chosen variant; logs nashconv of the running
// average at geometric checkpoints, plus the empirical variance of the
// root-value estimate when probe_trajectories > 0.
std::pair<PolicyProfile, MccfrDiagnostics> run_mccfr(
    const TreeIndex& idx, MccfrVariant variant, const SampleScheme& scheme,
    int64_t T, int probe_trajectories = 0);

// Empirical variance of the root-value estimate over n sampled
// trajectories, per variant, holding the profile (and baselines) fixed.
struct VarianceProbe {
  double os = 0;
  double vr = 0;
  double vr_oracle = 0;
};
VarianceProbe variance_probe(const TreeIndex& idx,
                             const PolicyProfile& profile,
                             const BaselineTable& baselines,
                             int n_trajectories, const SampleScheme& scheme);

}  // namespace fosg

#endif  // FOSG_MCCFR_H_
