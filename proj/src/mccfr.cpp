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

#include "fosg/mccfr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fosg/bestresponse.hpp"

namespace fosg {

namespace {

void rm_row(const double* regret, double* out, size_t n) {
  double pos = 0;
  for (size_t a = 0; a < n; ++a) pos += std::max(regret[a], 0.0);
  for (size_t a = 0; a < n; ++a) {
    out[a] = pos > 0 ? std::max(regret[a], 0.0) / pos : 1.0 / n;
  }
}

std::vector<double> policy_row(const TreeIndex& idx,
                               const PolicyProfile& prof, int player,
                               int32_t s) {
  size_t n = idx.infos[player][s].actions.size();
  int64_t off = idx.act_offset[player][s];
  return {prof.pi[player].probs.begin() + off,
          prof.pi[player].probs.begin() + off + static_cast<int64_t>(n)};
}

std::vector<double> xi_row(const std::vector<double>& pi, double eps) {
  std::vector<double> xi(pi.size());
  for (size_t a = 0; a < pi.size(); ++a) {
    xi[a] = eps / pi.size() + (1 - eps) * pi[a];
  }
  return xi;
}

// Index of the child's incoming action in the acting player's action list.
int action_index_of(const TreeIndex& idx, int32_t h, int32_t child) {
  int actor = idx.hists[h].actor;
  Token a = idx.hists[child].joint[actor];
  const auto& actions = idx.infos[actor][idx.hists[h].info[actor]].actions;
  return static_cast<int>(std::find(actions.begin(), actions.end(), a) -
                          actions.begin());
}

PolicyProfile normalized_profile(const TreeIndex& idx,
                                 const std::array<std::vector<double>, 2>& mass,
                                 bool from_regret) {
  PolicyProfile prof = uniform_profile(idx);
  for (int p = 0; p < 2; ++p) {
    for (size_t s = 0; s < idx.infos[p].size(); ++s) {
      if (!idx.is_decision(p, static_cast<int32_t>(s))) continue;
      size_t n = idx.infos[p][s].actions.size();
      int64_t off = idx.act_offset[p][s];
      if (from_regret) {
        rm_row(&mass[p][off], &prof.pi[p].probs[off], n);
        continue;
      }
      double total = 0;
      for (size_t a = 0; a < n; ++a) total += mass[p][off + a];
      if (total <= 0) continue;
      for (size_t a = 0; a < n; ++a) {
        prof.pi[p].probs[off + a] = mass[p][off + a] / total;
      }
    }
  }
  return prof;
}

int32_t sample_from_profile(const TreeIndex& idx, const PolicyProfile& prof,
                            const SampleScheme& scheme, Rng& rng) {
  int32_t h = 0;
  while (idx.hists[h].actor != -2) {
    const auto& node = idx.hists[h];
    if (node.actor < 0) {
      std::vector<double> w;
      for (int32_t c : node.children) w.push_back(idx.hists[c].step_prob);
      h = node.children[rng.sample(w)];
      continue;
    }
    int j = node.actor;
    int32_t s = node.info[j];
    std::vector<double> xi =
        xi_row(policy_row(idx, prof, j, s), scheme.eps_explore);
    int a = rng.sample(xi);
    Token token = idx.infos[j][s].actions[a];
    std::vector<int32_t> eligible;
    std::vector<double> w;
    for (int32_t c : node.children) {
      if (idx.hists[c].joint[j] == token) {
        eligible.push_back(c);
        w.push_back(idx.hists[c].step_prob);
      }
    }
    h = eligible[rng.sample(w)];
  }
  return h;
}

}  // namespace

BaselineTable make_baselines(const TreeIndex& idx, double alpha) {
  BaselineTable b;
  b.alpha = alpha;
  for (int owner = 0; owner < 2; ++owner) {
    for (int actor = 0; actor < 2; ++actor) {
      b.b[owner][actor].assign(idx.total_actions[actor], 0.0);
    }
  }
  return b;
}

HistoryValues exact_history_values(const TreeIndex& idx,
                                   const PolicyProfile& profile) {
  HistoryValues out;
  for (int p = 0; p < 2; ++p) out.v[p].assign(idx.hists.size(), 0.0);
  for (int32_t h = static_cast<int32_t>(idx.hists.size()) - 1; h >= 0; --h) {
    const auto& node = idx.hists[h];
    if (node.actor == -2) {
      for (int p = 0; p < 2; ++p) out.v[p][h] = node.ret[p];
      continue;
    }
    for (int32_t c : node.children) {
      double w = idx.hists[c].step_prob;
      if (node.actor >= 0) {
        int j = node.actor;
        int64_t off = idx.act_offset[j][node.info[j]];
        w *= profile.pi[j].probs[off + action_index_of(idx, h, c)];
      }
      for (int p = 0; p < 2; ++p) out.v[p][h] += w * out.v[p][c];
    }
  }
  return out;
}

MccfrTables make_mccfr_tables(const TreeIndex& idx) {
  MccfrTables t;
  for (int p = 0; p < 2; ++p) {
    t.regret[p].assign(idx.total_actions[p], 0.0);
    t.avg_mass[p].assign(idx.total_actions[p], 0.0);
  }
  return t;
}

PathEstimates evaluate_path(const TreeIndex& idx, int updating,
                            int32_t terminal, const PolicyProfile& policies,
                            MccfrVariant variant, const SampleScheme& scheme,
                            const BaselineTable* baselines,
                            const HistoryValues* oracle) {
  if (variant == MccfrVariant::kVr && baselines == nullptr) {
    throw std::invalid_argument("evaluate_path: vr needs baselines");
  }
  if (variant == MccfrVariant::kVrOracle && oracle == nullptr) {
    throw std::invalid_argument("evaluate_path: vr_oracle needs values");
  }
  std::vector<int32_t> path;
  for (int32_t h = terminal; h >= 0; h = idx.hists[h].parent) {
    path.push_back(h);
  }
  std::reverse(path.begin(), path.end());
  const size_t len = path.size();
  const int i = updating;

  // Downward accumulators per path node.
  std::vector<double> w(len, 1.0), own(len, 1.0), sprob(len, 1.0);
  for (size_t k = 0; k + 1 < len; ++k) {
    int32_t h = path[k], c = path[k + 1];
    const auto& node = idx.hists[h];
    double step = idx.hists[c].step_prob;
    double pi_a = 1.0, xi_a = 1.0;
    bool own_step = false;
    if (node.actor >= 0) {
      int j = node.actor;
      std::vector<double> pi = policy_row(idx, policies, j, node.info[j]);
      std::vector<double> xi = xi_row(pi, scheme.eps_explore);
      int a = action_index_of(idx, h, c);
      pi_a = pi[a];
      xi_a = xi[a];
      own_step = j == i;
    }
    w[k + 1] = w[k] * (own_step ? 1.0 / xi_a : pi_a / xi_a);
    own[k + 1] = own[k] * (own_step ? pi_a : 1.0);
    sprob[k + 1] = sprob[k] * xi_a * step;
  }

  PathEstimates out;
  out.sample_prob = sprob[len - 1];
  out.hist_value.assign(len, 0.0);
  out.hist_value[len - 1] = idx.hists[terminal].ret[i];

  for (size_t k = len - 1; k-- > 0;) {
    int32_t h = path[k], c = path[k + 1];
    const auto& node = idx.hists[h];
    double child_v = out.hist_value[k + 1];
    if (node.actor < 0) {
      // Chance step: sampled at its true probability.  The oracle baseline
      // also controls the unsampled outcomes.
      if (variant == MccfrVariant::kVrOracle) {
        double mean = 0;
        for (int32_t cc : node.children) {
          mean += idx.hists[cc].step_prob * oracle->v[i][cc];
        }
        out.hist_value[k] = mean + child_v - oracle->v[i][c];
      } else {
        out.hist_value[k] = child_v;
      }
      continue;
    }
    int j = node.actor;
    int32_t s = node.info[j];
    size_t n = idx.infos[j][s].actions.size();
    int64_t off = idx.act_offset[j][s];
    std::vector<double> pi = policy_row(idx, policies, j, s);
    std::vector<double> xi = xi_row(pi, scheme.eps_explore);
    int a_star = action_index_of(idx, h, c);

    // q̂(a) = base(a) + [a = a*]·(child − inner)/ξ(a*): zero baselines for
    // plain outcome sampling, the learned table for vr, and exact values
    // (including over the action's chance outcomes) for the oracle.
    std::vector<double> base(n, 0.0);
    double inner = 0;
    if (variant == MccfrVariant::kVr) {
      for (size_t a = 0; a < n; ++a) base[a] = baselines->b[i][j][off + a];
      inner = base[a_star];
    } else if (variant == MccfrVariant::kVrOracle) {
      for (int32_t cc : node.children) {
        int a = action_index_of(idx, h, cc);
        base[a] += idx.hists[cc].step_prob * oracle->v[i][cc];
      }
      inner = oracle->v[i][c];
    }
    std::vector<double> q = base;
    q[a_star] += (child_v - inner) / xi[a_star];
    double v = 0;
    for (size_t a = 0; a < n; ++a) v += pi[a] * q[a];
    out.hist_value[k] = v;
    if (j == i) {
      out.nodes.push_back({h, s, w[k], own[k], sprob[k], q, v});
    }
  }
  std::reverse(out.nodes.begin(), out.nodes.end());
  return out;
}

int32_t sample_terminal(const TreeIndex& idx, const MccfrTables& tables,
                        const SampleScheme& scheme, Rng& rng) {
  return sample_from_profile(idx, mccfr_current(idx, tables), scheme, rng);
}

namespace {

// `cur` must reflect the tables' regrets on entry; rows whose regrets
// change are refreshed in place, so callers can reuse it across iterations.
std::array<int32_t, 2> iteration(const TreeIndex& idx, MccfrTables& tables,
                                 const SampleScheme& scheme, Rng& rng,
                                 MccfrVariant variant, BaselineTable* bl,
                                 const HistoryValues* oracle,
                                 PolicyProfile& cur) {
  std::array<int32_t, 2> terminals = {-1, -1};
  for (int i = 0; i < 2; ++i) {
    int32_t z = sample_from_profile(idx, cur, scheme, rng);
    terminals[i] = z;
    PathEstimates pe =
        evaluate_path(idx, i, z, cur, variant, scheme, bl, oracle);
    tables.node_touches += pe.hist_value.size();
    for (const auto& node : pe.nodes) {
      size_t n = node.q.size();
      int64_t off = idx.act_offset[i][node.s];
      for (size_t a = 0; a < n; ++a) {
        tables.regret[i][off + a] += node.w * (node.q[a] - node.v);
        tables.avg_mass[i][off + a] += node.own_reach / node.sprob *
                                       cur.pi[i].probs[off + a];
      }
      rm_row(&tables.regret[i][off], &cur.pi[i].probs[off], n);
    }
    if (bl != nullptr) {
      // Refresh every decision baseline on the path with the observed
      // (already baseline-enhanced) child value.
      std::vector<int32_t> path;
      for (int32_t h = z; h >= 0; h = idx.hists[h].parent) path.push_back(h);
      std::reverse(path.begin(), path.end());
      for (size_t k = 0; k + 1 < path.size(); ++k) {
        const auto& node = idx.hists[path[k]];
        if (node.actor < 0) continue;
        int j = node.actor;
        int64_t off = idx.act_offset[j][node.info[j]] +
                      action_index_of(idx, path[k], path[k + 1]);
        double& b = bl->b[i][j][off];
        b = (1 - bl->alpha) * b + bl->alpha * pe.hist_value[k + 1];
      }
    }
  }
  ++tables.t;
  return terminals;
}

}  // namespace

std::array<int32_t, 2> os_iteration(const TreeIndex& idx, MccfrTables& tables,
                                    const SampleScheme& scheme, Rng& rng) {
  PolicyProfile cur = mccfr_current(idx, tables);
  return iteration(idx, tables, scheme, rng, MccfrVariant::kOs, nullptr,
                   nullptr, cur);
}

std::array<int32_t, 2> vr_iteration(const TreeIndex& idx, MccfrTables& tables,
                                    const SampleScheme& scheme, Rng& rng,
                                    BaselineTable& baselines) {
  PolicyProfile cur = mccfr_current(idx, tables);
  return iteration(idx, tables, scheme, rng, MccfrVariant::kVr, &baselines,
                   nullptr, cur);
}

PolicyProfile mccfr_current(const TreeIndex& idx, const MccfrTables& tables) {
  return normalized_profile(idx, tables.regret, /*from_regret=*/true);
}

PolicyProfile mccfr_average(const TreeIndex& idx, const MccfrTables& tables) {
  return normalized_profile(idx, tables.avg_mass, /*from_regret=*/false);
}

std::pair<PolicyProfile, MccfrDiagnostics> run_mccfr(const TreeIndex& idx,
                                                     MccfrVariant variant,
                                                     const SampleScheme& scheme,
                                                     int64_t T,
                                                     int probe_trajectories) {
  MccfrTables tables = make_mccfr_tables(idx);
  BaselineTable baselines = make_baselines(idx);
  Rng rng(scheme.seed);
  MccfrDiagnostics diag;
  PolicyProfile cur = mccfr_current(idx, tables);
  for (int64_t t = 1; t <= T; ++t) {
    if (variant == MccfrVariant::kOs) {
      iteration(idx, tables, scheme, rng, MccfrVariant::kOs, nullptr, nullptr,
                cur);
    } else if (variant == MccfrVariant::kVr) {
      iteration(idx, tables, scheme, rng, MccfrVariant::kVr, &baselines,
                nullptr, cur);
    } else {
      HistoryValues oracle = exact_history_values(idx, cur);
      iteration(idx, tables, scheme, rng, MccfrVariant::kVrOracle, nullptr,
                &oracle, cur);
    }
    if (t == T || (t & (t - 1)) == 0) {
      MccfrDiagnostics::Point pt;
      pt.iter = t;
      pt.node_touches = tables.node_touches;
      pt.nashconv = nashconv(idx, mccfr_average(idx, tables)).nashconv;
      if (probe_trajectories > 0) {
        VarianceProbe vp =
            variance_probe(idx, mccfr_current(idx, tables), baselines,
                           probe_trajectories, scheme);
        pt.probe_variance = variant == MccfrVariant::kOs  ? vp.os
                            : variant == MccfrVariant::kVr ? vp.vr
                                                           : vp.vr_oracle;
      }
      diag.points.push_back(pt);
    }
  }
  return {mccfr_average(idx, tables), diag};
}

VarianceProbe variance_probe(const TreeIndex& idx,
                             const PolicyProfile& profile,
                             const BaselineTable& baselines,
                             int n_trajectories, const SampleScheme& scheme) {
  if (n_trajectories < 2) {
    throw std::invalid_argument("variance_probe: need >= 2 trajectories");
  }
  HistoryValues oracle = exact_history_values(idx, profile);
  VarianceProbe out;
  auto probe = [&](MccfrVariant variant) {
    // Fresh generator per variant: paired trajectories across variants.
    Rng rng(scheme.seed);
    std::vector<double> est;
    for (int k = 0; k < n_trajectories; ++k) {
      int32_t z = sample_from_profile(idx, profile, scheme, rng);
      PathEstimates pe = evaluate_path(idx, /*updating=*/0, z, profile,
                                       variant, scheme, &baselines, &oracle);
      est.push_back(pe.hist_value[0]);
    }
    double mean = 0;
    for (double x : est) mean += x;
    mean /= est.size();
    double var = 0;
    for (double x : est) var += (x - mean) * (x - mean);
    return var / (est.size() - 1);
  };
  out.os = probe(MccfrVariant::kOs);
  out.vr = probe(MccfrVariant::kVr);
  out.vr_oracle = probe(MccfrVariant::kVrOracle);
  return out;
}

}  // namespace fosg
