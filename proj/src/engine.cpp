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

#include "fosg/engine.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace fosg {

Engine::Engine(const TreeIndex& idx) : idx_(idx) {
  for (int p = 0; p < 2; ++p) {
    res_.v[p].resize(idx.infos[p].size());
    res_.reach[p].resize(idx.infos[p].size());
    res_.q[p].resize(idx.total_actions[p]);
    res_.br_action[p].resize(idx.infos[p].size());
  }
}

const std::vector<int32_t>& Engine::subtree(int32_t root) {
  auto it = subtree_cache_.find(root);
  if (it != subtree_cache_.end()) return it->second;
  std::vector<int32_t> order;
  order.push_back(root);
  // Children were appended in BFS order, so a simple expansion stays
  // parents-first.
  for (size_t i = 0; i < order.size(); ++i) {
    for (int32_t c : idx_.pubs[order[i]].children) order.push_back(c);
  }
  return subtree_cache_.emplace(root, std::move(order)).first->second;
}

const Engine::Result& Engine::run(const Options& opts) {
  const std::vector<int32_t>& order = subtree(opts.root_pub);
  for (int p = 0; p < 2; ++p) {
    std::fill(res_.v[p].begin(), res_.v[p].end(), 0.0);
    std::fill(res_.q[p].begin(), res_.q[p].end(), 0.0);
    std::fill(res_.reach[p].begin(), res_.reach[p].end(), 0.0);
    std::fill(res_.br_action[p].begin(), res_.br_action[p].end(), -1);
    if (opts.policy[p] == nullptr) {
      throw std::invalid_argument("engine: missing policy");
    }
  }

  // Root ranges.
  const TreeIndex::Pub& root = idx_.pubs[opts.root_pub];
  for (int p = 0; p < 2; ++p) {
    for (size_t i = 0; i < root.members[p].size(); ++i) {
      res_.reach[p][root.members[p][i]] =
          opts.root_range[p] ? opts.root_range[p][i] : 1.0;
    }
  }

  auto at_frontier = [&](int32_t pub) {
    return opts.frontier && pub != opts.root_pub && opts.frontier->count(pub);
  };

  // Forward sweep: own reach per infostate.
  for (size_t oi = 1; oi < order.size(); ++oi) {
    int32_t pub = order[oi];
    for (int p = 0; p < 2; ++p) {
      for (int32_t s : idx_.pubs[pub].members[p]) {
        const TreeIndex::Info& info = idx_.infos[p][s];
        const TreeIndex::Info& par = idx_.infos[p][info.parent];
        double prob = 1.0;
        if (par.actions.size() > 1 ||
            (par.actions.size() == 1 && par.actions[0] != kNoop)) {
          prob = opts.policy[p][idx_.act_offset[p][info.parent] +
                                info.action_index];
        }
        res_.reach[p][s] = res_.reach[p][info.parent] * prob;
      }
    }
  }
  // Frontier pruning for the forward sweep is unnecessary: reaches below a
  // frontier are computed but simply unused by the backward sweep.

  // Backward sweep: q and v, leaves to root.
  std::vector<double> fr_reach[2], fr_v[2];
  for (size_t oi = order.size(); oi-- > 0;) {
    int32_t pub_id = order[oi];
    const TreeIndex::Pub& pub = idx_.pubs[pub_id];
    bool skip_inside = false;
    // Skip public states strictly below a frontier cut.
    if (opts.frontier) {
      for (int32_t a = pub.parent; a >= 0; a = idx_.pubs[a].parent) {
        if (a == opts.root_pub) break;
        if (opts.frontier->count(a)) {
          skip_inside = true;
          break;
        }
      }
    }
    if (skip_inside) continue;

    if (at_frontier(pub_id)) {
      for (int p = 0; p < 2; ++p) {
        fr_reach[p].clear();
        for (int32_t s : pub.members[p]) fr_reach[p].push_back(res_.reach[p][s]);
        fr_v[p].assign(pub.members[p].size(), 0.0);
      }
      (*opts.value_fn)(pub_id, fr_reach[0], fr_reach[1], fr_v[0], fr_v[1]);
      for (int p = 0; p < 2; ++p) {
        for (size_t i = 0; i < pub.members[p].size(); ++i) {
          res_.v[p][pub.members[p][i]] = fr_v[p][i];
        }
      }
    } else if (pub.terminal) {
      for (int32_t h : pub.hists) {
        const TreeIndex::Hist& z = idx_.hists[h];
        for (int p = 0; p < 2; ++p) {
          res_.v[p][z.info[p]] +=
              res_.reach[1 - p][z.info[1 - p]] * z.pc * z.ret[p];
        }
      }
    } else {
      for (int p = 0; p < 2; ++p) {
        for (int32_t s : pub.members[p]) {
          const TreeIndex::Info& info = idx_.infos[p][s];
          const double* q = &res_.q[p][idx_.act_offset[p][s]];
          int n = static_cast<int>(info.actions.size());
          work_ += 1;
          bool decide = idx_.is_decision(p, s);
          if (opts.responder[p] && decide) {
            int best = 0;
            for (int a = 1; a < n; ++a) {
              if (q[a] > q[best]) best = a;
            }
            if (opts.tie_break) {
              best = (*opts.tie_break)(p, s, q, n);
            }
            res_.br_action[p][s] = best;
            res_.v[p][s] = q[best];
          } else {
            double v = 0;
            const double* pi = &opts.policy[p][idx_.act_offset[p][s]];
            for (int a = 0; a < n; ++a) v += pi[a] * q[a];
            res_.v[p][s] = v;
          }
        }
      }
    }

    // Push values into the parent's q row.
    if (pub_id != opts.root_pub) {
      for (int p = 0; p < 2; ++p) {
        for (int32_t s : pub.members[p]) {
          const TreeIndex::Info& info = idx_.infos[p][s];
          res_.q[p][idx_.act_offset[p][info.parent] + info.action_index] +=
              res_.v[p][s];
        }
      }
    }
  }
  return res_;
}

}  // namespace fosg
