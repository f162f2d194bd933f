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

#include "fosg/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "fosg/bestresponse.hpp"
#include "fosg/engine.hpp"
#include "fosg/rng.hpp"

namespace fosg {
namespace {

// Index drawn from unnormalized weights using an externally supplied uniform
// (so paired matches can replay the same chance draw).
int pick(const std::vector<double>& w, double u) {
  double total = 0;
  for (double x : w) total += x;
  double acc = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u * total < acc) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

// Children of h compatible with `decider` having played `tok` (all children
// for a pure chance step), plus their outcome probabilities.
void outcomes(const TreeIndex& idx, int32_t h, int decider, Token tok,
              std::vector<int32_t>& next, std::vector<double>& prob) {
  next.clear();
  prob.clear();
  for (int32_t c : idx.hists[h].children) {
    if (decider >= 0 && idx.hists[c].joint[decider] != tok) continue;
    next.push_back(c);
    prob.push_back(idx.hists[c].step_prob);
  }
}

// Plays one match to a terminal.  Chance outcomes draw from `chance_rng`,
// and only when the outcome is actually stochastic — that keeps the n-th
// chance draw aligned across duplicate seatings whose betting lines differ.
int32_t play_match(const TreeIndex& idx, const PolicyProfile& profile,
                   Rng& chance_rng, Rng& act_rng) {
  std::vector<int32_t> next;
  std::vector<double> prob;
  int32_t h = 0;
  while (idx.hists[h].actor != -2) {
    int decider = idx.hists[h].actor;
    Token tok = kNoop;
    if (decider >= 0) {
      int32_t s = idx.hists[h].info[decider];
      int64_t off = idx.act_offset[decider][s];
      size_t n = idx.infos[decider][s].actions.size();
      std::vector<double> row(profile.pi[decider].probs.begin() + off,
                              profile.pi[decider].probs.begin() + off + n);
      tok = idx.infos[decider][s].actions[act_rng.sample(row)];
    }
    outcomes(idx, h, decider, tok, next, prob);
    h = next.size() == 1 ? next[0] : next[pick(prob, chance_rng.next_double())];
  }
  return h;
}

double baseline(const HistoryValues* b, int player, int32_t h) {
  return b == nullptr ? 0.0 : b->v[player][h];
}

// Rao-Blackwellized payoff: expectation of the evaluated player's return
// over the terminals sharing the realized public state and opponent
// infostate, weighted by own reach times chance reach (the opponent's reach
// is common within the class and cancels).
double imaginary_value(const TreeIndex& idx, const MatchRecord& rec) {
  int i = rec.evaluated;
  int opp = 1 - i;
  int32_t pub = idx.hists[rec.terminal].pub;
  std::vector<int32_t> sorted = idx.sorted_members(pub, i);
  std::unordered_map<int32_t, size_t> pos;
  for (size_t k = 0; k < sorted.size(); ++k) pos.emplace(sorted[k], k);
  int32_t os = idx.hists[rec.terminal].info[opp];
  double num = 0, den = 0;
  for (int32_t z : idx.pubs[pub].hists) {
    if (idx.hists[z].info[opp] != os) continue;
    double w = rec.terminal_range[pos.at(idx.hists[z].info[i])] *
               idx.hists[z].pc;
    num += w * idx.hists[z].ret[i];
    den += w;
  }
  return den > 0 ? num / den : rec.payoff[i];
}

}  // namespace

MatchRecord record_for_terminal(const TreeIndex& idx,
                                const PolicyProfile& profile, int evaluated,
                                int32_t terminal, uint64_t seed) {
  MatchRecord rec;
  rec.seed = seed;
  rec.evaluated = evaluated;
  rec.terminal = terminal;
  rec.payoff = idx.hists[terminal].ret;
  rec.terminal_range =
      range_at(idx, profile.pi[evaluated], idx.hists[terminal].pub).w;

  std::vector<int32_t> path;
  for (int32_t h = terminal; h > 0; h = idx.hists[h].parent) path.push_back(h);
  std::reverse(path.begin(), path.end());
  int32_t h = 0;
  for (int32_t c : path) {
    MatchStep step;
    step.hist = h;
    step.next = c;
    step.decider = idx.hists[h].actor;
    Token tok = kNoop;
    if (step.decider >= 0) {
      int32_t s = idx.hists[h].info[step.decider];
      tok = idx.hists[c].joint[step.decider];
      const auto& actions = idx.infos[step.decider][s].actions;
      step.action_index = static_cast<int>(
          std::find(actions.begin(), actions.end(), tok) - actions.begin());
      int64_t off = idx.act_offset[step.decider][s];
      step.row.assign(profile.pi[step.decider].probs.begin() + off,
                      profile.pi[step.decider].probs.begin() + off +
                          actions.size());
    }
    outcomes(idx, h, step.decider, tok, step.chance_next, step.chance);
    step.own_range =
        range_at(idx, profile.pi[evaluated], idx.hists[h].pub).w;
    rec.steps.push_back(std::move(step));
    h = c;
  }
  return rec;
}

std::vector<MatchRecord> simulate_matches(const TreeIndex& idx,
                                          const PolicyProfile& profile,
                                          int evaluated, int64_t k,
                                          uint64_t seed) {
  std::vector<MatchRecord> out;
  out.reserve(k);
  Rng base(seed);
  for (int64_t m = 0; m < k; ++m) {
    Rng match_rng = base.split(m);
    Rng chance_rng(match_rng.next_u64());
    Rng act_rng(match_rng.next_u64());
    int32_t z = play_match(idx, profile, chance_rng, act_rng);
    out.push_back(record_for_terminal(idx, profile, evaluated, z,
                                      match_rng.seed()));
  }
  return out;
}

std::vector<MatchRecord> duplicate_matches(const TreeIndex& idx,
                                           const PolicyProfile& hero,
                                           const PolicyProfile& villain,
                                           int64_t pairs, uint64_t seed) {
  std::vector<MatchRecord> out;
  out.reserve(2 * pairs);
  Rng base(seed);
  for (int64_t t = 0; t < pairs; ++t) {
    Rng pair_rng = base.split(t);
    uint64_t chance_seed = pair_rng.next_u64();
    for (int seat = 0; seat < 2; ++seat) {
      PolicyProfile prof;
      prof.pi[seat] = hero.pi[seat];
      prof.pi[1 - seat] = villain.pi[1 - seat];
      Rng chance_rng(chance_seed);  // same stream in both seatings
      Rng act_rng(Rng::at(chance_seed, 1 + seat));
      int32_t z = play_match(idx, prof, chance_rng, act_rng);
      out.push_back(
          record_for_terminal(idx, prof, seat, z, Rng::at(chance_seed, seat)));
    }
  }
  return out;
}

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::kMc:
      return "mc";
    case Estimator::kImaginary:
      return "imaginary";
    case Estimator::kMivat:
      return "mivat";
    case Estimator::kMivatImaginary:
      return "mivat_imaginary";
    case Estimator::kAivat:
      return "aivat";
  }
  return "";
}

double estimate_record(const TreeIndex& idx, const MatchRecord& rec,
                       Estimator method, const HistoryValues* baselines,
                       bool correct_opponent) {
  int i = rec.evaluated;
  bool rao_blackwell = method == Estimator::kImaginary ||
                       method == Estimator::kMivatImaginary ||
                       method == Estimator::kAivat;
  double value = rao_blackwell ? imaginary_value(idx, rec) : rec.payoff[i];

  bool corrected = method == Estimator::kMivat ||
                   method == Estimator::kMivatImaginary ||
                   method == Estimator::kAivat;
  if (!corrected || baselines == nullptr) return value;

  for (const MatchStep& step : rec.steps) {
    // Chance term: expected baseline given the taken joint action minus the
    // realized one (zero conditional mean whatever the baseline is).
    double total = 0, expect = 0;
    for (size_t o = 0; o < step.chance.size(); ++o) {
      total += step.chance[o];
      expect += step.chance[o] * baseline(baselines, i, step.chance_next[o]);
    }
    value += expect / total - baseline(baselines, i, step.next);

    if (method != Estimator::kAivat || step.decider < 0) continue;
    if (step.decider != i && !correct_opponent) continue;
    // Action term: the decider's row is known, so replace the sampled
    // action's expected baseline with the row's expectation.
    int d = step.decider;
    const TreeIndex::Info& info =
        idx.infos[d][idx.hists[step.hist].info[d]];
    double taken = 0, row_expect = 0;
    for (size_t a = 0; a < info.actions.size(); ++a) {
      double ba = 0, w = 0;
      for (int32_t c : idx.hists[step.hist].children) {
        if (idx.hists[c].joint[d] != info.actions[a]) continue;
        ba += idx.hists[c].step_prob * baseline(baselines, i, c);
        w += idx.hists[c].step_prob;
      }
      ba /= w;
      row_expect += step.row[a] * ba;
      if (static_cast<int>(a) == step.action_index) taken = ba;
    }
    value += row_expect - taken;
  }
  return value;
}

EstimatorReport estimate(const TreeIndex& idx,
                         const std::vector<MatchRecord>& records,
                         Estimator method, const HistoryValues* baselines,
                         bool correct_opponent) {
  EstimatorReport report;
  report.name = estimator_name(method);
  report.count = static_cast<int64_t>(records.size());
  report.values.reserve(records.size());
  double sum = 0;
  for (const MatchRecord& rec : records) {
    double v = estimate_record(idx, rec, method, baselines, correct_opponent);
    report.values.push_back(v);
    sum += v;
  }
  if (report.count > 0) report.mean = sum / report.count;
  if (report.count > 1) {
    double ss = 0;
    for (double v : report.values) {
      ss += (v - report.mean) * (v - report.mean);
    }
    report.sd = std::sqrt(ss / (report.count - 1));
  }
  return report;
}

namespace {

// CFR+ (alternating, linear averaging) with equilibrium-selection biases:
// each biased action's cumulative regret gets a constant bonus per
// iteration, steering the solve toward equilibria that play it.
PolicyProfile solve_with_bias(const TreeIndex& idx, const BiasConfig& cfg,
                              int64_t T) {
  std::array<std::vector<double>, 2> bonus;
  for (int p = 0; p < 2; ++p) bonus[p].assign(idx.total_actions[p], 0.0);
  for (const auto& bias : cfg.biases) {
    if (!idx.is_decision(bias.player, bias.infostate)) {
      throw std::runtime_error("consistency_demo: bias at a non-decision "
                               "infostate");
    }
    bonus[bias.player][idx.act_offset[bias.player][bias.infostate] +
                       bias.action] = cfg.strength;
  }

  std::array<std::vector<double>, 2> regret, avg_mass, cur;
  for (int p = 0; p < 2; ++p) {
    regret[p].assign(idx.total_actions[p], 0.0);
    avg_mass[p].assign(idx.total_actions[p], 0.0);
    cur[p] = uniform_policy(idx, p).probs;
  }

  Engine engine(idx);
  for (int64_t t = 1; t <= T; ++t) {
    for (int p = 0; p < 2; ++p) {
      Engine::Options opts;
      opts.policy = {cur[0].data(), cur[1].data()};
      const Engine::Result& res = engine.run(opts);
      for (size_t s = 0; s < idx.infos[p].size(); ++s) {
        int32_t si = static_cast<int32_t>(s);
        if (!idx.is_decision(p, si)) continue;
        int64_t off = idx.act_offset[p][si];
        size_t n = idx.infos[p][si].actions.size();
        double w = static_cast<double>(t) * res.reach[p][si];
        for (size_t a = 0; a < n; ++a) {
          avg_mass[p][off + a] += w * cur[p][off + a];
        }
        double pos = 0;
        for (size_t a = 0; a < n; ++a) {
          double r = regret[p][off + a] + res.q[p][off + a] - res.v[p][si] +
                     bonus[p][off + a];
          regret[p][off + a] = std::max(0.0, r);
          pos += regret[p][off + a];
        }
        for (size_t a = 0; a < n; ++a) {
          cur[p][off + a] = pos > 0 ? regret[p][off + a] / pos : 1.0 / n;
        }
      }
    }
  }

  PolicyProfile avg = uniform_profile(idx);
  for (int p = 0; p < 2; ++p) {
    for (size_t s = 0; s < idx.infos[p].size(); ++s) {
      int32_t si = static_cast<int32_t>(s);
      if (!idx.is_decision(p, si)) continue;
      int64_t off = idx.act_offset[p][si];
      size_t n = idx.infos[p][si].actions.size();
      double mass = 0;
      for (size_t a = 0; a < n; ++a) mass += avg_mass[p][off + a];
      for (size_t a = 0; a < n; ++a) {
        avg.pi[p].probs[off + a] =
            mass > 0 ? avg_mass[p][off + a] / mass : 1.0 / n;
      }
    }
  }
  return avg;
}

}  // namespace

ConsistencyReport consistency_demo(const TreeIndex& idx,
                                   const std::vector<BiasConfig>& configs,
                                   int64_t T) {
  if (configs.empty()) {
    throw std::runtime_error("consistency_demo: no configurations");
  }
  ConsistencyReport report;
  std::vector<PolicyProfile> solves;
  for (const BiasConfig& cfg : configs) {
    solves.push_back(solve_with_bias(idx, cfg, T));
    report.individual_nashconv.push_back(nashconv(idx, solves.back()).nashconv);
  }
  // Stitch: config 0 supplies the base profile, every config overwrites the
  // rows of its own biased infostates.
  report.stitched = solves[0];
  for (size_t k = 1; k < configs.size(); ++k) {
    for (const auto& pin : configs[k].biases) {
      int p = pin.player;
      int64_t off = idx.act_offset[p][pin.infostate];
      size_t n = idx.infos[p][pin.infostate].actions.size();
      std::copy(solves[k].pi[p].probs.begin() + off,
                solves[k].pi[p].probs.begin() + off + n,
                report.stitched.pi[p].probs.begin() + off);
    }
  }
  report.stitched_nashconv = nashconv(idx, report.stitched).nashconv;
  return report;
}

}  // namespace fosg
