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
// The shared public-tree evaluation pass.  One pass computes, for a public
// subtree rooted anywhere and arbitrary root ranges, every infostate's
// counterfactual value v(s) and action values q(s,a) for both players —
// under expectation (fixed policies) or best response (argmax).  CFR, best
// response, exploitability, sub-game solving and value functions are all
// thin layers over this pass.
//
// Conventions: ranges carry player reach only; chance reach enters at the
// terminals through P_c(z) taken from the game root, and terminal returns
// are likewise cumulative from the game root.  Values are therefore
// counterfactual values in full-game units regardless of the pass root,
// which is what the re-solving gadgets need.

#ifndef FOSG_ENGINE_H_
#define FOSG_ENGINE_H_

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fosg/tree.hpp"

namespace fosg {

// Replaces the recursion below a frontier public state: given both players'
// downward reaches over pub.members order, writes both players'
// counterfactual values (same order and units as the engine's own).
using ValueFn = std::function<void(
    int32_t pub, const std::vector<double>& reach1,
    const std::vector<double>& reach2, std::vector<double>& v1,
    std::vector<double>& v2)>;

// Picks among tied best-response actions; `q` has `n` entries. Used to
// demonstrate adversarial tie-breaking in unsafe re-solving.
using TieBreak =
    std::function<int(int player, int32_t s, const double* q, int n)>;

class Engine {
 public:
  explicit Engine(const TreeIndex& idx);

  struct Options {
    // Flat behavioral policies (size total_actions[p]); rows of non-decision
    // infostates must hold probability 1.
    std::array<const double*, 2> policy = {nullptr, nullptr};
    // Best-response mode per player: argmax over q instead of expectation.
    std::array<bool, 2> responder = {false, false};
    int32_t root_pub = 0;
    // Root reach per member infostate, in pubs[root].members order; null
    // means all ones.  Not required to be normalized (the pass is linear).
    std::array<const double*, 2> root_range = {nullptr, nullptr};
    // Depth limit: public states where the recursion stops and value_fn is
    // consulted instead.  Never applied to the root.
    const std::unordered_set<int32_t>* frontier = nullptr;
    const ValueFn* value_fn = nullptr;
    const TieBreak* tie_break = nullptr;
  };

  struct Result {
    // Indexed by global infostate id / flat action slot of the pass owner's
    // TreeIndex.  Entries outside the visited subtree are zero.
    std::array<std::vector<double>, 2> v;      // counterfactual values
    std::array<std::vector<double>, 2> q;      // per-action values
    std::array<std::vector<double>, 2> reach;  // own reach incl. root range
    // Chosen action index per infostate in responder mode (-1 elsewhere).
    std::array<std::vector<int32_t>, 2> br_action;
  };

  // Runs one pass; the returned reference is owned by the engine and valid
  // until the next run.
  const Result& run(const Options& opts);

  // Public states of the subtree rooted at `root`, parents first (cached).
  const std::vector<int32_t>& subtree(int32_t root);

  const TreeIndex& index() const { return idx_; }
  // Total infostate visits across all run() calls (node-touch accounting).
  uint64_t work() const { return work_; }

 private:
  const TreeIndex& idx_;
  Result res_;
  std::unordered_map<int32_t, std::vector<int32_t>> subtree_cache_;
  uint64_t work_ = 0;
};

}  // namespace fosg

#endif  // FOSG_ENGINE_H_
