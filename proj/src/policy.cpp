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

#include "fosg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fosg/engine.hpp"

namespace fosg {

BehaviorPolicy uniform_policy(const TreeIndex& idx, int player) {
  BehaviorPolicy p;
  p.player = player;
  p.probs.resize(idx.total_actions[player]);
  for (size_t s = 0; s < idx.infos[player].size(); ++s) {
    size_t n = idx.infos[player][s].actions.size();
    for (size_t a = 0; a < n; ++a) {
      p.probs[idx.act_offset[player][s] + a] = 1.0 / static_cast<double>(n);
    }
  }
  return p;
}

PolicyProfile uniform_profile(const TreeIndex& idx) {
  return {{uniform_policy(idx, 0), uniform_policy(idx, 1)}};
}

void check_policy(const TreeIndex& idx, const BehaviorPolicy& policy) {
  if (policy.probs.size() != static_cast<size_t>(idx.total_actions[policy.player])) {
    throw std::invalid_argument("policy: wrong flat size");
  }
  for (size_t s = 0; s < idx.infos[policy.player].size(); ++s) {
    size_t n = idx.infos[policy.player][s].actions.size();
    double sum = 0;
    for (size_t a = 0; a < n; ++a) {
      double x = policy.probs[idx.act_offset[policy.player][s] + a];
      if (x < -1e-12) throw std::invalid_argument("policy: negative prob");
      sum += x;
    }
    if (n > 0 && std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("policy: row does not sum to 1 at " +
                                  idx.info_key(policy.player,
                                               static_cast<int32_t>(s)));
    }
  }
}

ReachFactors reach(const TreeIndex& idx, const PolicyProfile& profile,
                   int32_t hist) {
  ReachFactors f;
  for (int32_t h = hist; h > 0; h = idx.hists[h].parent) {
    const TreeIndex::Hist& node = idx.hists[h];
    int32_t g = node.parent;
    int actor = idx.hists[g].actor;
    if (actor == 0 || actor == 1) {
      int32_t s = idx.hists[g].info[actor];
      const auto& acts = idx.infos[actor][s].actions;
      Token a = node.joint[actor];
      auto it = std::find(acts.begin(), acts.end(), a);
      f.player[actor] *=
          profile.pi[actor]
              .probs[idx.act_offset[actor][s] + (it - acts.begin())];
    }
  }
  f.chance = idx.hists[hist].pc;
  return f;
}

double info_reach(const TreeIndex& idx, const BehaviorPolicy& policy,
                  int32_t s) {
  int p = policy.player;
  double r = 1.0;
  for (int32_t cur = s; idx.infos[p][cur].parent >= 0;
       cur = idx.infos[p][cur].parent) {
    const TreeIndex::Info& info = idx.infos[p][cur];
    const TreeIndex::Info& par = idx.infos[p][info.parent];
    if (par.actions.size() > 1 ||
        (par.actions.size() == 1 && par.actions[0] != kNoop)) {
      r *= policy.probs[idx.act_offset[p][info.parent] + info.action_index];
    }
  }
  return r;
}

std::array<double, 2> expected_return(const TreeIndex& idx,
                                      const PolicyProfile& profile) {
  Engine engine(idx);
  Engine::Options opts;
  opts.policy = {profile.pi[0].probs.data(), profile.pi[1].probs.data()};
  const Engine::Result& res = engine.run(opts);
  int32_t root0 = idx.hists[0].info[0];
  int32_t root1 = idx.hists[0].info[1];
  return {res.v[0][root0], res.v[1][root1]};
}

BehaviorPolicy average_policies(const TreeIndex& idx,
                                const std::vector<BehaviorPolicy>& policies,
                                const std::vector<double>& weights) {
  if (policies.empty() || policies.size() != weights.size()) {
    throw std::invalid_argument("average_policies: bad inputs");
  }
  int p = policies[0].player;
  BehaviorPolicy avg;
  avg.player = p;
  avg.probs.assign(idx.total_actions[p], 0.0);
  for (size_t k = 0; k < policies.size(); ++k) {
    if (policies[k].player != p) {
      throw std::invalid_argument("average_policies: mixed players");
    }
    for (size_t s = 0; s < idx.infos[p].size(); ++s) {
      double r = weights[k] * info_reach(idx, policies[k], static_cast<int32_t>(s));
      size_t n = idx.infos[p][s].actions.size();
      for (size_t a = 0; a < n; ++a) {
        avg.probs[idx.act_offset[p][s] + a] +=
            r * policies[k].probs[idx.act_offset[p][s] + a];
      }
    }
  }
  // Normalize rows; unreached infostates fall back to uniform.
  for (size_t s = 0; s < idx.infos[p].size(); ++s) {
    size_t n = idx.infos[p][s].actions.size();
    if (n == 0) continue;
    double sum = 0;
    for (size_t a = 0; a < n; ++a) sum += avg.probs[idx.act_offset[p][s] + a];
    for (size_t a = 0; a < n; ++a) {
      avg.probs[idx.act_offset[p][s] + a] =
          sum > 0 ? avg.probs[idx.act_offset[p][s] + a] / sum
                  : 1.0 / static_cast<double>(n);
    }
  }
  return avg;
}

std::vector<int> support(const TreeIndex& idx, const BehaviorPolicy& policy,
                         int32_t s, double eps) {
  std::vector<int> out;
  size_t n = idx.infos[policy.player][s].actions.size();
  for (size_t a = 0; a < n; ++a) {
    if (policy.probs[idx.act_offset[policy.player][s] + a] > eps) {
      out.push_back(static_cast<int>(a));
    }
  }
  return out;
}

Range range_at(const TreeIndex& idx, const BehaviorPolicy& policy, int32_t pub,
               bool normalize) {
  Range r;
  r.pub = pub;
  r.player = policy.player;
  for (int32_t s : idx.sorted_members(pub, policy.player)) {
    r.w.push_back(info_reach(idx, policy, s));
  }
  if (normalize) {
    double sum = 0;
    for (double x : r.w) sum += x;
    if (sum <= 0) throw std::invalid_argument("range_at: zero total reach");
    for (double& x : r.w) x /= sum;
    r.normalized = true;
  }
  return r;
}

std::string policy_to_text(const TreeIndex& idx, const BehaviorPolicy& policy) {
  int p = policy.player;
  std::map<std::string, int32_t> keys;
  for (size_t s = 0; s < idx.infos[p].size(); ++s) {
    if (idx.is_decision(p, static_cast<int32_t>(s))) {
      keys.emplace(idx.info_key(p, static_cast<int32_t>(s)),
                   static_cast<int32_t>(s));
    }
  }
  std::ostringstream out;
  out.precision(12);
  for (const auto& [key, s] : keys) {
    out << key;
    const auto& acts = idx.infos[p][s].actions;
    for (size_t a = 0; a < acts.size(); ++a) {
      out << ' ' << idx.game->strings().name(acts[a]) << '='
          << policy.probs[idx.act_offset[p][s] + a];
    }
    out << '\n';
  }
  return out.str();
}

BehaviorPolicy policy_from_text(const TreeIndex& idx, int player,
                                const std::string& text) {
  BehaviorPolicy p = uniform_policy(idx, player);
  auto key_map = idx.key_to_info(player);
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    auto it = key_map.find(key);
    if (it == key_map.end()) {
      throw std::invalid_argument("policy_from_text: unknown key " + key);
    }
    int32_t s = it->second;
    const auto& acts = idx.infos[player][s].actions;
    std::string pair;
    while (fields >> pair) {
      size_t eq = pair.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("policy_from_text: bad field " + pair);
      }
      Token a = idx.game->strings().lookup(pair.substr(0, eq));
      auto ait = std::find(acts.begin(), acts.end(), a);
      if (ait == acts.end()) {
        throw std::invalid_argument("policy_from_text: bad action in " + line);
      }
      p.probs[idx.act_offset[player][s] + (ait - acts.begin())] =
          std::stod(pair.substr(eq + 1));
    }
  }
  check_policy(idx, p);
  return p;
}

}  // namespace fosg
