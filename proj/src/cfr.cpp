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

#include "fosg/cfr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace fosg {

namespace {

bool is_checkpoint(int64_t t, int64_t total) {
  return t == total || (t & (t - 1)) == 0;
}

// Positive-proportional row over `n` slots, uniform if nothing is positive.
void rm_row(const double* regret, double* out, size_t n) {
  double pos = 0;
  for (size_t a = 0; a < n; ++a) pos += std::max(regret[a], 0.0);
  for (size_t a = 0; a < n; ++a) {
    out[a] = pos > 0 ? std::max(regret[a], 0.0) / pos : 1.0 / n;
  }
}

}  // namespace

CfrSolver::CfrSolver(const TreeIndex& idx, const CfrConfig& cfg,
                     SubgameRootSpec root)
    : idx_(idx), cfg_(cfg), root_(std::move(root)), engine_(idx) {
  if (cfg_.minimizer != MinimizerKind::kRm &&
      cfg_.minimizer != MinimizerKind::kRmPlus) {
    throw std::invalid_argument("cfr: minimizer must be rm or rm_plus");
  }
  if (cfg_.skip_fraction < 0 || cfg_.skip_fraction >= 1) {
    throw std::invalid_argument("cfr: skip_fraction must be in [0, 1)");
  }
  for (int p = 0; p < 2; ++p) {
    regret_[p].assign(idx_.total_actions[p], 0.0);
    cur_[p] = uniform_policy(idx_, p).probs;
    avg_mass_[p].assign(idx_.total_actions[p], 0.0);
    cfv_acc_[p].assign(idx_.infos[p].size(), 0.0);
    opp_mass_[p].assign(idx_.total_actions[1 - p], 0.0);
    size_t members = idx_.pubs[root_.root_pub].members[p].size();
    if (!root_.range[p].empty() && root_.range[p].size() != members) {
      throw std::invalid_argument("cfr: root range size mismatch");
    }
  }
  if (root_.gadget_player >= 0) {
    size_t members =
        idx_.pubs[root_.root_pub].members[root_.gadget_player].size();
    if (root_.bound.size() != members) {
      throw std::invalid_argument("cfr: gadget bound size mismatch");
    }
    head_regret_.assign(members, {0.0, 0.0});
    head_follow_acc_.assign(members, 0.0);
    head_cur_follow_.assign(members, 1.0);
  }
  if ((root_.frontier == nullptr) != (root_.value_fn == nullptr)) {
    throw std::invalid_argument("cfr: frontier and value_fn go together");
  }
  if (root_.frontier == nullptr || root_.frontier->empty()) {
    lookahead_ = engine_.subtree(root_.root_pub);
    lookahead_all_ = lookahead_;
  } else {
    lookahead_all_.push_back(root_.root_pub);
    for (size_t k = 0; k < lookahead_all_.size(); ++k) {
      int32_t pub = lookahead_all_[k];
      if (pub != root_.root_pub && root_.frontier->count(pub)) continue;
      lookahead_.push_back(pub);
      for (int32_t c : idx_.pubs[pub].children) lookahead_all_.push_back(c);
    }
  }
}

double CfrSolver::head_follow_prob(size_t k) const {
  if (!std::isfinite(root_.bound[k])) return 1.0;  // Follow forced
  double pos_t = std::max(head_regret_[k][0], 0.0);
  double pos_f = std::max(head_regret_[k][1], 0.0);
  double pos = pos_t + pos_f;
  return pos > 0 ? pos_f / pos : 0.5;
}

void CfrSolver::pass_and_update(int updating, double avg_w) {
  int gp = root_.gadget_player;
  // Current policies from the minimizer rows (subtree rows suffice, but
  // refreshing everything keeps unreached rows at uniform).
  for (int p = 0; p < 2; ++p) {
    for (size_t s = 0; s < idx_.infos[p].size(); ++s) {
      if (!idx_.is_decision(p, static_cast<int32_t>(s))) continue;
      size_t n = idx_.infos[p][s].actions.size();
      int64_t off = idx_.act_offset[p][s];
      rm_row(&regret_[p][off], &cur_[p][off], n);
    }
  }
  const TreeIndex::Pub& root_pub = idx_.pubs[root_.root_pub];
  std::array<std::vector<double>, 2> eff;
  for (int p = 0; p < 2; ++p) {
    eff[p] = root_.range[p].empty()
                 ? std::vector<double>(root_pub.members[p].size(), 1.0)
                 : root_.range[p];
  }
  if (gp >= 0) {
    for (size_t k = 0; k < head_regret_.size(); ++k) {
      head_cur_follow_[k] = head_follow_prob(k);
      eff[gp][k] *= head_cur_follow_[k];
    }
  }

  Engine::Options opts;
  opts.policy = {cur_[0].data(), cur_[1].data()};
  opts.root_pub = root_.root_pub;
  opts.root_range = {eff[0].data(), eff[1].data()};
  opts.frontier = root_.frontier;
  opts.value_fn = root_.value_fn;
  const Engine::Result& res = engine_.run(opts);

  auto update_player = [&](int p) {
    for (int32_t pub : lookahead_) {
      for (int32_t s : idx_.pubs[pub].members[p]) {
        if (!idx_.is_decision(p, s)) continue;
        size_t n = idx_.infos[p][s].actions.size();
        int64_t off = idx_.act_offset[p][s];
        double v = res.v[p][s];
        for (size_t a = 0; a < n; ++a) {
          double& r = regret_[p][off + a];
          r += res.q[p][off + a] - v;
          if (cfg_.minimizer == MinimizerKind::kRmPlus) r = std::max(r, 0.0);
        }
      }
    }
    if (p == gp) {
      for (size_t k = 0; k < head_regret_.size(); ++k) {
        if (!std::isfinite(root_.bound[k])) continue;
        double q_f = res.v[gp][root_pub.members[gp][k]];
        double f = head_cur_follow_[k];
        double v = f * q_f + (1 - f) * root_.bound[k];
        head_regret_[k][0] = std::max(head_regret_[k][0] + root_.bound[k] - v,
                                      0.0);
        head_regret_[k][1] = std::max(head_regret_[k][1] + q_f - v, 0.0);
      }
    }
    // Averages (warm-up skipped passes carry avg_w == 0).  Frontier values
    // are averaged too: they serve as future re-solving invariants.
    if (avg_w > 0) {
      for (int32_t pub : lookahead_all_) {
        bool interior = root_.frontier == nullptr ||
                        pub == root_.root_pub || !root_.frontier->count(pub);
        for (int32_t s : idx_.pubs[pub].members[p]) {
          cfv_acc_[p][s] += avg_w * res.v[p][s];
          if (!interior || !idx_.is_decision(p, s)) continue;
          size_t n = idx_.infos[p][s].actions.size();
          int64_t off = idx_.act_offset[p][s];
          for (size_t a = 0; a < n; ++a) {
            avg_mass_[p][off + a] += avg_w * res.reach[p][s] * cur_[p][off + a];
          }
        }
      }
      if (p == gp) {
        for (size_t k = 0; k < head_regret_.size(); ++k) {
          head_follow_acc_[k] += avg_w * head_cur_follow_[k];
        }
      }
      weight_sum_[p] += avg_w;
    }
    // Full-regret bookkeeping: realized value and the opponent's running
    // reach-weighted average, uniform over this player's update passes.
    int o = 1 - p;
    for (size_t k = 0; k < root_pub.members[p].size(); ++k) {
      realized_[p] += eff[p][k] * res.v[p][root_pub.members[p][k]];
    }
    for (int32_t pub : lookahead_) {
      for (int32_t s : idx_.pubs[pub].members[o]) {
        if (!idx_.is_decision(o, s)) continue;
        size_t n = idx_.infos[o][s].actions.size();
        int64_t off = idx_.act_offset[o][s];
        for (size_t a = 0; a < n; ++a) {
          opp_mass_[p][off + a] += res.reach[o][s] * cur_[o][off + a];
        }
      }
    }
    ++updates_[p];
  };

  if (updating < 0) {
    update_player(0);
    update_player(1);
  } else {
    update_player(updating);
  }
}

void CfrSolver::iteration(int64_t t, int64_t skip_until, int64_t total) {
  (void)total;
  double w = cfg_.averaging == Averaging::kLinear ? static_cast<double>(t)
                                                  : 1.0;
  double avg_w = t <= skip_until ? 0.0 : w;
  if (cfg_.mode == UpdateMode::kSimultaneous) {
    pass_and_update(-1, avg_w);
  } else {
    pass_and_update(0, avg_w);  // player 1 first
    pass_and_update(1, avg_w);
  }
}

void CfrSolver::run(int64_t T, bool log) {
  int64_t skip_until =
      t_ + static_cast<int64_t>(cfg_.skip_fraction * static_cast<double>(T));
  bool full_game = root_.root_pub == 0 && root_.gadget_player < 0 &&
                   root_.range[0].empty() && root_.range[1].empty() &&
                   root_.frontier == nullptr;
  for (int64_t i = 1; i <= T; ++i) {
    ++t_;
    iteration(t_, skip_until, T);
    if (log && is_checkpoint(i, T)) {
      CfrDiagnostics::Point pt;
      pt.iter = t_;
      pt.sum_pos_regret = {sum_pos_regret(0), sum_pos_regret(1)};
      if (full_game) {
        pt.nashconv = nashconv(idx_, average()).nashconv;
        pt.full_regret = {full_regret(0), full_regret(1)};
      }
      diag_.points.push_back(pt);
    }
  }
}

PolicyProfile CfrSolver::average() const {
  return PolicyProfile{{average_policy(0), average_policy(1)}};
}

BehaviorPolicy CfrSolver::average_policy(int player) const {
  BehaviorPolicy avg = uniform_policy(idx_, player);
  for (size_t s = 0; s < idx_.infos[player].size(); ++s) {
    if (!idx_.is_decision(player, static_cast<int32_t>(s))) continue;
    size_t n = idx_.infos[player][s].actions.size();
    int64_t off = idx_.act_offset[player][s];
    double total = 0;
    for (size_t a = 0; a < n; ++a) total += avg_mass_[player][off + a];
    if (total <= 0) continue;  // unreached: stay uniform
    for (size_t a = 0; a < n; ++a) {
      avg.probs[off + a] = avg_mass_[player][off + a] / total;
    }
  }
  return avg;
}

PolicyProfile CfrSolver::current() const {
  PolicyProfile prof = uniform_profile(idx_);
  for (int p = 0; p < 2; ++p) prof.pi[p].probs = cur_[p];
  return prof;
}

double CfrSolver::sum_pos_regret(int player) const {
  double sum = 0;
  for (size_t s = 0; s < idx_.infos[player].size(); ++s) {
    if (!idx_.is_decision(player, static_cast<int32_t>(s))) continue;
    size_t n = idx_.infos[player][s].actions.size();
    int64_t off = idx_.act_offset[player][s];
    double best = 0;
    for (size_t a = 0; a < n; ++a) {
      best = std::max(best, regret_[player][off + a]);
    }
    sum += best;
  }
  if (player == root_.gadget_player) {
    for (const auto& row : head_regret_) {
      sum += std::max({row[0], row[1], 0.0});
    }
  }
  return sum;
}

double CfrSolver::full_regret(int player) const {
  if (root_.root_pub != 0 || root_.gadget_player >= 0 ||
      root_.frontier != nullptr) {
    throw std::logic_error("full_regret: full-game solves only");
  }
  int o = 1 - player;
  BehaviorPolicy opp_avg = uniform_policy(idx_, o);
  for (size_t s = 0; s < idx_.infos[o].size(); ++s) {
    if (!idx_.is_decision(o, static_cast<int32_t>(s))) continue;
    size_t n = idx_.infos[o][s].actions.size();
    int64_t off = idx_.act_offset[o][s];
    double total = 0;
    for (size_t a = 0; a < n; ++a) total += opp_mass_[player][off + a];
    if (total <= 0) continue;
    for (size_t a = 0; a < n; ++a) {
      opp_avg.probs[off + a] = opp_mass_[player][off + a] / total;
    }
  }
  double brv = best_response(idx_, opp_avg, player).brv;
  return static_cast<double>(updates_[player]) * brv - realized_[player];
}

std::vector<double> CfrSolver::avg_cfv(int player) const {
  std::vector<double> out = cfv_acc_[player];
  if (weight_sum_[player] > 0) {
    for (double& x : out) x /= weight_sum_[player];
  }
  return out;
}

std::vector<double> CfrSolver::avg_root_cfv(int player) const {
  std::vector<double> all = avg_cfv(player);
  std::vector<double> out;
  for (int32_t s : idx_.pubs[root_.root_pub].members[player]) {
    out.push_back(all[s]);
  }
  return out;
}

std::vector<double> CfrSolver::avg_follow() const {
  std::vector<double> out = head_follow_acc_;
  int gp = root_.gadget_player;
  if (gp >= 0 && weight_sum_[gp] > 0) {
    for (double& x : out) x /= weight_sum_[gp];
  }
  return out;
}

std::pair<PolicyProfile, CfrDiagnostics> run_cfr(const TreeIndex& idx,
                                                 const CfrConfig& cfg,
                                                 int64_t T) {
  CfrSolver solver(idx, cfg);
  solver.run(T, /*log=*/true);
  return {solver.average(), solver.diagnostics()};
}

CfvResult compute_values(const TreeIndex& idx, int32_t s_pub,
                         const std::vector<double>& range1,
                         const std::vector<double>& range2,
                         const PolicyProfile& profile) {
  Engine engine(idx);
  std::array<const std::vector<double>*, 2> in = {&range1, &range2};
  std::array<std::vector<int32_t>, 2> order;
  std::array<std::vector<double>, 2> eng_range;
  for (int p = 0; p < 2; ++p) {
    order[p] = idx.sorted_members(s_pub, p);
    const std::vector<int32_t>& members = idx.pubs[s_pub].members[p];
    if (in[p]->size() != members.size()) {
      throw std::invalid_argument("compute_values: range size mismatch");
    }
    eng_range[p].assign(members.size(), 0.0);
    for (size_t i = 0; i < order[p].size(); ++i) {
      size_t j = std::find(members.begin(), members.end(), order[p][i]) -
                 members.begin();
      eng_range[p][j] = (*in[p])[i];
    }
  }
  Engine::Options opts;
  opts.policy = {profile.pi[0].probs.data(), profile.pi[1].probs.data()};
  opts.root_pub = s_pub;
  opts.root_range = {eng_range[0].data(), eng_range[1].data()};
  const Engine::Result& res = engine.run(opts);

  CfvResult out;
  for (int p = 0; p < 2; ++p) {
    for (int32_t s : order[p]) {
      out.v[p].push_back(res.v[p][s]);
      size_t n = idx.infos[p][s].actions.size();
      int64_t off = idx.act_offset[p][s];
      std::vector<double> q(n);
      for (size_t a = 0; a < n; ++a) q[a] = res.q[p][off + a];
      out.q[p].push_back(std::move(q));
    }
  }
  return out;
}

double cached_game_value(const TreeIndex& idx) {
  static std::map<std::string, double> cache;
  const std::string key = idx.game->name();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  CfrSolver solver(idx, cfr_plus_config());
  solver.run(100000);
  PolicyProfile avg = solver.average();
  double gv1 = expected_return(idx, avg)[0];
  cache.emplace(key, gv1);
  return gv1;
}

}  // namespace fosg
