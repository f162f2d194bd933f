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

#include "fosg/resolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "fosg/engine.hpp"

namespace fosg {

std::unordered_set<int32_t> compute_frontier(const TreeIndex& idx,
                                             int32_t root_pub,
                                             const DepthPolicy& depth) {
  std::unordered_set<int32_t> frontier;
  if (depth.kind == DepthPolicy::Kind::kFull) return frontier;
  int32_t limit = idx.pubs[root_pub].depth + depth.steps;
  std::vector<int32_t> queue = {root_pub};
  for (size_t k = 0; k < queue.size(); ++k) {
    for (int32_t c : idx.pubs[queue[k]].children) {
      const auto& pub = idx.pubs[c];
      if (pub.terminal) continue;
      bool cut = depth.kind == DepthPolicy::Kind::kSteps
                     ? pub.depth >= limit
                     : pub.chance_event;
      if (cut) {
        frontier.insert(c);
      } else {
        queue.push_back(c);
      }
    }
  }
  return frontier;
}

ValueFn make_value_fn(const TreeIndex& idx, const ValueFunctionHandle& vf) {
  if (vf.kind == ValueFunctionHandle::Kind::kTerminalOnly) {
    return [](int32_t pub, const std::vector<double>&,
              const std::vector<double>&, std::vector<double>&,
              std::vector<double>&) {
      throw std::runtime_error(
          "terminal-only value function consulted at public state " +
          std::to_string(pub));
    };
  }
  int64_t iters = vf.iters;
  return [&idx, iters](int32_t pub, const std::vector<double>& reach1,
                       const std::vector<double>& reach2,
                       std::vector<double>& v1, std::vector<double>& v2) {
    SubgameRootSpec root;
    root.root_pub = pub;
    root.range = {reach1, reach2};
    CfrSolver solver(idx, cfr_plus_config(), root);
    solver.run(iters);
    PolicyProfile avg = solver.average();
    // Zero-regret values: counterfactual best response to the average.
    std::array<std::vector<double>*, 2> out = {&v1, &v2};
    for (int p = 0; p < 2; ++p) {
      Engine::Options opts;
      opts.policy = {avg.pi[0].probs.data(), avg.pi[1].probs.data()};
      opts.responder[p] = true;
      opts.root_pub = pub;
      opts.root_range = {reach1.data(), reach2.data()};
      const Engine::Result& res = solver.engine().run(opts);
      const auto& members = idx.pubs[pub].members[p];
      for (size_t i = 0; i < members.size(); ++i) {
        (*out[p])[i] = res.v[p][members[i]];
      }
    }
  };
}

LookaheadSolve depth_limited_cfr(const TreeIndex& idx, SubgameRootSpec root,
                                 const ValueFunctionHandle& vf,
                                 const DepthPolicy& depth,
                                 const CfrConfig& cfg, int64_t T) {
  std::unordered_set<int32_t> frontier =
      compute_frontier(idx, root.root_pub, depth);
  ValueFn fn = make_value_fn(idx, vf);
  root.frontier = frontier.empty() ? nullptr : &frontier;
  root.value_fn = frontier.empty() ? nullptr : &fn;
  CfrSolver solver(idx, cfg, root);
  solver.run(T);

  LookaheadSolve out;
  out.root_pub = root.root_pub;
  out.pubs = solver.lookahead_with_frontier();
  out.frontier = std::move(frontier);
  out.avg = solver.average();
  out.avg_cfv = {solver.avg_cfv(0), solver.avg_cfv(1)};

  // Reach under the average profile (the backward sweep is irrelevant, so
  // the frontier gets a throw-away zero value function).
  std::array<std::vector<double>, 2> range;
  for (int p = 0; p < 2; ++p) {
    range[p] = root.range[p].empty()
                   ? std::vector<double>(
                         idx.pubs[root.root_pub].members[p].size(), 1.0)
                   : root.range[p];
  }
  ValueFn zero = [](int32_t, const std::vector<double>&,
                    const std::vector<double>&, std::vector<double>&,
                    std::vector<double>&) {};
  Engine::Options opts;
  opts.policy = {out.avg.pi[0].probs.data(), out.avg.pi[1].probs.data()};
  opts.root_pub = root.root_pub;
  opts.root_range = {range[0].data(), range[1].data()};
  opts.frontier = out.frontier.empty() ? nullptr : &out.frontier;
  opts.value_fn = out.frontier.empty() ? nullptr : &zero;
  const Engine::Result& res = solver.engine().run(opts);
  out.reach = {res.reach[0], res.reach[1]};
  return out;
}

ResolvingAgent::ResolvingAgent(const TreeIndex& idx, int player,
                               ResolveConfig cfg)
    : idx_(idx), player_(player), cfg_(std::move(cfg)), rng_(cfg_.seed) {}

void ResolvingAgent::new_game() {
  rng_ = Rng(cfg_.seed);
  if (!cfg_.cache) {
    solves_by_pub_.clear();
    first_action_.clear();
  }
  solve_for(0);
}

namespace {

bool contains_pub(const LookaheadSolve& ls, int32_t pub) {
  return std::find(ls.pubs.begin(), ls.pubs.end(), pub) != ls.pubs.end();
}

}  // namespace

const LookaheadSolve& ResolvingAgent::solve_for(int32_t pub) {
  auto hit = solves_by_pub_.find(pub);
  if (hit != solves_by_pub_.end()) return hit->second;

  if (pub == 0) {
    SubgameRootSpec spec;
    LookaheadSolve ls = depth_limited_cfr(idx_, spec, cfg_.value_fn,
                                          cfg_.depth, cfg_.cfr, cfg_.iters);
    ++solves_;
    return solves_by_pub_.emplace(0, std::move(ls)).first->second;
  }

  auto own_decides_at = [&](int32_t q) {
    for (int32_t s : idx_.pubs[q].members[player_]) {
      if (idx_.is_decision(player_, s)) return true;
    }
    return false;
  };

  // Walk root -> pub, re-solving wherever play would have: at own decision
  // points, at frontier hand-offs, and at pub itself.
  std::vector<int32_t> path;
  for (int32_t q = pub; q > 0; q = idx_.pubs[q].parent) path.push_back(q);
  std::reverse(path.begin(), path.end());

  const LookaheadSolve* cover = &solve_for(0);
  for (int32_t q : path) {
    if (!contains_pub(*cover, q)) {
      throw std::runtime_error("resolve: public state " + idx_.pub_key(q) +
                               " is missing from the previous lookahead");
    }
    bool handoff = cover->frontier.count(q) > 0;
    if (q != pub && !own_decides_at(q) && !handoff) continue;

    auto it = solves_by_pub_.find(q);
    if (it == solves_by_pub_.end()) {
      int opp = 1 - player_;
      SubgameRootSpec spec;
      spec.root_pub = q;
      const auto& own_members = idx_.pubs[q].members[player_];
      std::vector<double> own_range;
      double total = 0;
      for (int32_t s : own_members) {
        own_range.push_back(cover->reach[player_][s]);
        total += own_range.back();
      }
      if (total <= 0) {
        own_range.assign(own_members.size(), 1.0);
        ++range_fallbacks_;
      }
      spec.range[player_] = std::move(own_range);
      spec.gadget_player = opp;
      for (int32_t s : idx_.pubs[q].members[opp]) {
        spec.bound.push_back(cover->avg_cfv[opp][s]);
      }
      LookaheadSolve ls = depth_limited_cfr(idx_, spec, cfg_.value_fn,
                                            cfg_.depth, cfg_.cfr, cfg_.iters);
      ++solves_;
      it = solves_by_pub_.emplace(q, std::move(ls)).first;
    }
    cover = &it->second;
  }
  return *cover;
}

OnlineAgent::Act ResolvingAgent::act(int32_t infostate) {
  const TreeIndex::Info& info = idx_.infos[player_][infostate];
  const LookaheadSolve& ls = solve_for(info.pub);
  size_t n = info.actions.size();
  int64_t off = idx_.act_offset[player_][infostate];
  Act out;
  out.row.resize(n);
  for (size_t a = 0; a < n; ++a) {
    out.row[a] = ls.avg.pi[player_].probs[off + a];
  }
  auto cached = first_action_.find(infostate);
  if (cfg_.cache && cached != first_action_.end()) {
    out.action_index = cached->second;
  } else {
    out.action_index = static_cast<int>(rng_.sample(out.row));
    if (cfg_.cache) first_action_.emplace(infostate, out.action_index);
  }
  out.action = info.actions[out.action_index];
  return out;
}

FixedPolicyAgent::FixedPolicyAgent(const TreeIndex& idx, BehaviorPolicy policy,
                                   uint64_t seed)
    : idx_(idx), policy_(std::move(policy)), seed_(seed), rng_(seed) {}

void FixedPolicyAgent::new_game() { rng_ = Rng(seed_); }

OnlineAgent::Act FixedPolicyAgent::act(int32_t infostate) {
  const TreeIndex::Info& info = idx_.infos[policy_.player][infostate];
  size_t n = info.actions.size();
  int64_t off = idx_.act_offset[policy_.player][infostate];
  Act out;
  out.row.assign(policy_.probs.begin() + off, policy_.probs.begin() + off + n);
  out.action_index = static_cast<int>(rng_.sample(out.row));
  out.action = info.actions[out.action_index];
  return out;
}

BehaviorPolicy tabularize(const TreeIndex& idx, OnlineAgent& agent) {
  int p = agent.player();
  BehaviorPolicy out = uniform_policy(idx, p);
  std::vector<char> written(idx.infos[p].size(), 0);
  for (size_t s = 0; s < idx.infos[p].size(); ++s) {
    if (!idx.is_decision(p, static_cast<int32_t>(s))) continue;
    // The own-infostate chain of any member history reaches s.
    std::vector<int32_t> chain;
    for (int32_t h = idx.infos[p][s].hists.at(0); h >= 0;
         h = idx.hists[h].parent) {
      if (idx.hists[h].actor == p) chain.push_back(idx.hists[h].info[p]);
    }
    std::reverse(chain.begin(), chain.end());
    agent.new_game();
    for (int32_t q : chain) {
      OnlineAgent::Act a = agent.act(q);
      int64_t off = idx.act_offset[p][q];
      if (written[q]) {
        for (size_t i = 0; i < a.row.size(); ++i) {
          if (std::abs(out.probs[off + i] - a.row[i]) > 1e-9) {
            throw std::runtime_error(
                "tabularize: nondeterministic agent at infostate " +
                idx.info_key(p, q));
          }
        }
      } else {
        std::copy(a.row.begin(), a.row.end(), out.probs.begin() + off);
        written[q] = 1;
      }
    }
  }
  return out;
}

}  // namespace fosg
