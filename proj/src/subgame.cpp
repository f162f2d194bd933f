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

#include "fosg/subgame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "fosg/engine.hpp"

namespace fosg {

namespace {

// A game defined by explicit transition tables, used to materialize derived
// sub-games and gadgets.  Worlds are {node id, original history id or -1}.
class ExplicitGame : public Game {
 public:
  struct Out {
    int32_t next = 0;
    double prob = 1.0;
    Obs obs;
    std::array<double, 2> reward = {0.0, 0.0};
  };
  struct Node {
    std::array<std::vector<Token>, 2> actions;
    int32_t orig = -1;
    std::map<std::pair<Token, Token>, std::vector<Out>> next;
  };

  explicit ExplicitGame(std::string name) : name_(std::move(name)) {}

  std::string name() const override { return name_; }
  World initial_world() const override { return {0, nodes_[0].orig}; }
  std::vector<Token> legal_actions(const World& w, int player) const override {
    return nodes_[w[0]].actions[player];
  }
  std::vector<Outcome> apply(const World& w, Token a0, Token a1) const override {
    std::vector<Outcome> res;
    for (const Out& o : nodes_[w[0]].next.at({a0, a1})) {
      res.push_back({World{o.next, nodes_[o.next].orig}, o.prob, o.obs,
                     o.reward});
    }
    return res;
  }

  int32_t add_node(std::vector<Token> acts0, std::vector<Token> acts1,
                   int32_t orig = -1) {
    nodes_.push_back({{std::move(acts0), std::move(acts1)}, orig, {}});
    return static_cast<int32_t>(nodes_.size()) - 1;
  }
  Node& node(int32_t id) { return nodes_[id]; }

 private:
  std::string name_;
  std::vector<Node> nodes_;
};

Token re_intern(ExplicitGame& g, const TreeIndex& idx, Token t) {
  return t <= kNoop ? t : g.strings().intern(idx.game->strings().name(t));
}

Obs re_intern(ExplicitGame& g, const TreeIndex& idx, const Obs& obs) {
  return {re_intern(g, idx, obs.pub),
          {re_intern(g, idx, obs.priv[0]), re_intern(g, idx, obs.priv[1])}};
}

// Deep-copies the subtree below original history h into the derived game,
// emitting at each terminal the reward scale·ret + shift.
int32_t replicate(ExplicitGame& g, const TreeIndex& idx, int32_t h,
                  double scale, std::array<double, 2> shift) {
  const auto& node = idx.hists[h];
  std::vector<Token> acts[2];
  for (int p = 0; p < 2; ++p) {
    for (Token a : idx.infos[p][node.info[p]].actions) {
      acts[p].push_back(re_intern(g, idx, a));
    }
  }
  int32_t id = g.add_node(acts[0], acts[1], h);
  for (int32_t c : node.children) {
    const auto& child = idx.hists[c];
    int32_t next = replicate(g, idx, c, scale, shift);
    std::array<double, 2> reward = {0.0, 0.0};
    if (child.actor == -2) {
      for (int p = 0; p < 2; ++p) reward[p] = scale * child.ret[p] + shift[p];
    }
    std::pair<Token, Token> joint = {re_intern(g, idx, child.joint[0]),
                                     re_intern(g, idx, child.joint[1])};
    g.node(id).next[joint].push_back(
        {next, child.step_prob, re_intern(g, idx, child.obs), reward});
  }
  return id;
}

std::unordered_map<int32_t, size_t> sorted_pos(const TreeIndex& idx,
                                               int32_t pub, int player) {
  std::unordered_map<int32_t, size_t> pos;
  std::vector<int32_t> order = idx.sorted_members(pub, player);
  for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  return pos;
}

std::vector<int32_t> subtree_pubs(const TreeIndex& idx, int32_t s_pub) {
  std::vector<int32_t> out = {s_pub};
  for (size_t k = 0; k < out.size(); ++k) {
    for (int32_t c : idx.pubs[out[k]].children) out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<double> sorted_to_members(const TreeIndex& idx, int32_t pub,
                                      int player,
                                      const std::vector<double>& sorted) {
  const auto& members = idx.pubs[pub].members[player];
  std::vector<int32_t> order = idx.sorted_members(pub, player);
  if (sorted.size() != members.size()) {
    throw std::invalid_argument("sorted_to_members: size mismatch");
  }
  std::vector<double> out(members.size(), 0.0);
  for (size_t i = 0; i < order.size(); ++i) {
    size_t j = std::find(members.begin(), members.end(), order[i]) -
               members.begin();
    out[j] = sorted[i];
  }
  return out;
}

PublicSubgame build_subgame(const TreeIndex& idx, int32_t s_pub,
                            const std::vector<double>& range1,
                            const std::vector<double>& range2) {
  PublicSubgame sg;
  sg.pub = s_pub;
  sg.range = {range1, range2};
  auto pos1 = sorted_pos(idx, s_pub, 0);
  auto pos2 = sorted_pos(idx, s_pub, 1);

  auto game =
      std::make_shared<ExplicitGame>(idx.game->name() + "/sub:" +
                                     idx.pub_key(s_pub));
  int32_t root = game->add_node({kNoop}, {kNoop});
  Token deal_pub = game->strings().intern("deal!");
  std::vector<std::pair<int32_t, double>> deals;
  for (int32_t h : idx.pubs[s_pub].hists) {
    double m = range1.at(pos1.at(idx.hists[h].info[0])) *
               range2.at(pos2.at(idx.hists[h].info[1])) * idx.hists[h].pc;
    if (m > 0) deals.push_back({h, m});
  }
  for (const auto& [h, m] : deals) sg.mass += m;
  if (deals.empty()) {
    throw std::invalid_argument("build_subgame: all-zero joint mass");
  }
  for (const auto& [h, m] : deals) {
    int32_t next = replicate(*game, idx, h, 1.0, {0.0, 0.0});
    Obs obs;
    obs.pub = deal_pub;
    for (int p = 0; p < 2; ++p) {
      obs.priv[p] = game->strings().intern(
          "d:" + idx.info_key(p, idx.hists[h].info[p]));
    }
    game->node(root).next[{kNoop, kNoop}].push_back(
        {next, m / sg.mass, obs, {0.0, 0.0}});
    sg.dealt.push_back(h);
  }
  sg.game = game;
  return sg;
}

std::pair<CfvVector, CfvVector> value_function_exact(
    const TreeIndex& idx, int32_t s_pub, const std::vector<double>& range1,
    const std::vector<double>& range2, int64_t iters) {
  SubgameRootSpec root;
  root.root_pub = s_pub;
  root.range[0] = sorted_to_members(idx, s_pub, 0, range1);
  root.range[1] = sorted_to_members(idx, s_pub, 1, range2);
  CfrSolver solver(idx, cfr_plus_config(), root);
  solver.run(iters);
  PolicyProfile avg = solver.average();

  Engine engine(idx);
  std::pair<CfvVector, CfvVector> out;
  std::array<CfvVector*, 2> vecs = {&out.first, &out.second};
  for (int p = 0; p < 2; ++p) {
    Engine::Options opts;
    opts.policy = {avg.pi[0].probs.data(), avg.pi[1].probs.data()};
    opts.responder[p] = true;
    opts.root_pub = s_pub;
    opts.root_range = {root.range[0].data(), root.range[1].data()};
    const Engine::Result& res = engine.run(opts);
    vecs[p]->pub = s_pub;
    vecs[p]->player = p;
    for (int32_t s : idx.sorted_members(s_pub, p)) {
      vecs[p]->v.push_back(res.v[p][s]);
    }
  }
  return out;
}

std::vector<double> opp_cbrv(const TreeIndex& idx, int32_t s_pub, int own,
                             const BehaviorPolicy& own_policy) {
  int opp = 1 - own;
  Range r = range_at(idx, own_policy, s_pub);
  std::vector<double> own_range = sorted_to_members(idx, s_pub, own, r.w);
  std::vector<double> ones(idx.pubs[s_pub].members[opp].size(), 1.0);
  BehaviorPolicy opp_uniform = uniform_policy(idx, opp);

  Engine engine(idx);
  Engine::Options opts;
  std::array<const double*, 2> pol;
  pol[own] = own_policy.probs.data();
  pol[opp] = opp_uniform.probs.data();
  opts.policy = pol;
  opts.responder[opp] = true;
  opts.root_pub = s_pub;
  std::array<const double*, 2> rr;
  rr[own] = own_range.data();
  rr[opp] = ones.data();
  opts.root_range = rr;
  const Engine::Result& res = engine.run(opts);
  std::vector<double> out;
  for (int32_t s : idx.sorted_members(s_pub, opp)) out.push_back(res.v[opp][s]);
  return out;
}

BehaviorPolicy splice_policy(const TreeIndex& idx, int32_t s_pub,
                             const BehaviorPolicy& trunk,
                             const BehaviorPolicy& inner) {
  BehaviorPolicy out = trunk;
  int p = trunk.player;
  for (int32_t pub : subtree_pubs(idx, s_pub)) {
    for (int32_t s : idx.pubs[pub].members[p]) {
      size_t n = idx.infos[p][s].actions.size();
      int64_t off = idx.act_offset[p][s];
      for (size_t a = 0; a < n; ++a) {
        out.probs[off + a] = inner.probs[off + a];
      }
    }
  }
  return out;
}

PolicyProfile unsafe_resolve(const TreeIndex& idx, int32_t s_pub,
                             const PolicyProfile& trunk, int64_t iters,
                             int purify) {
  SubgameRootSpec root;
  root.root_pub = s_pub;
  for (int p = 0; p < 2; ++p) {
    root.range[p] =
        sorted_to_members(idx, s_pub, p, range_at(idx, trunk.pi[p], s_pub).w);
  }
  CfrSolver solver(idx, cfr_plus_config(), root);
  solver.run(iters);
  PolicyProfile avg = solver.average();
  PolicyProfile out = trunk;
  for (int p = 0; p < 2; ++p) {
    out.pi[p] = splice_policy(idx, s_pub, trunk.pi[p], avg.pi[p]);
  }
  if (purify >= 0) {
    // An arbitrary zero-regret selection: the sub-game best response to the
    // solved average, ties at the lowest action index.
    Engine::Options opts;
    opts.policy = {avg.pi[0].probs.data(), avg.pi[1].probs.data()};
    opts.responder[purify] = true;
    opts.root_pub = s_pub;
    opts.root_range = {root.range[0].data(), root.range[1].data()};
    const Engine::Result& res = solver.engine().run(opts);
    BehaviorPolicy pure = uniform_policy(idx, purify);
    for (int32_t pub : subtree_pubs(idx, s_pub)) {
      for (int32_t s : idx.pubs[pub].members[purify]) {
        if (!idx.is_decision(purify, s)) continue;
        size_t n = idx.infos[purify][s].actions.size();
        int64_t off = idx.act_offset[purify][s];
        int32_t pick = res.br_action[purify][s];
        if (pick < 0) pick = 0;
        for (size_t a = 0; a < n; ++a) {
          pure.probs[off + a] = static_cast<int32_t>(a) == pick ? 1.0 : 0.0;
        }
      }
    }
    out.pi[purify] = splice_policy(idx, s_pub, trunk.pi[purify], pure);
  }
  return out;
}

namespace {

// Shared gadget plumbing: per opponent root infostate, the counterfactual
// reach mass k(s') and the member histories with positive own mass.
struct GadgetDeal {
  std::vector<double> k;
  double K = 0;
  std::vector<std::vector<std::pair<int32_t, double>>> hists;  // per s'
  std::vector<int32_t> opp_order;
};

GadgetDeal gadget_deal(const TreeIndex& idx, int32_t s_pub, int own,
                       const std::vector<double>& own_range) {
  int opp = 1 - own;
  GadgetDeal d;
  d.opp_order = idx.sorted_members(s_pub, opp);
  auto own_pos = sorted_pos(idx, s_pub, own);
  std::unordered_map<int32_t, size_t> opp_pos;
  for (size_t i = 0; i < d.opp_order.size(); ++i) opp_pos[d.opp_order[i]] = i;
  d.k.assign(d.opp_order.size(), 0.0);
  d.hists.resize(d.opp_order.size());
  for (int32_t h : idx.pubs[s_pub].hists) {
    double m = own_range.at(own_pos.at(idx.hists[h].info[own])) *
               idx.hists[h].pc;
    size_t i = opp_pos.at(idx.hists[h].info[opp]);
    d.k[i] += m;
    if (m > 0) d.hists[i].push_back({h, m});
  }
  for (double x : d.k) d.K += x;
  if (d.K <= 0) {
    throw std::invalid_argument("gadget: all-zero opponent reach mass");
  }
  return d;
}

}  // namespace

GadgetGame build_cfrd_gadget(const TreeIndex& idx, int32_t s_pub, int own,
                             const std::vector<double>& own_range,
                             const std::vector<double>& opp_cfv_bound) {
  int opp = 1 - own;
  GadgetDeal d = gadget_deal(idx, s_pub, own, own_range);
  if (opp_cfv_bound.size() != d.opp_order.size()) {
    throw std::invalid_argument("cfrd gadget: bound size mismatch");
  }
  GadgetGame g;
  g.kind = GadgetGame::Kind::kCfrd;
  g.own = own;
  g.pub = s_pub;
  g.mass = d.K;
  g.k = d.k;
  auto game = std::make_shared<ExplicitGame>(idx.game->name() + "/cfrd:" +
                                             idx.pub_key(s_pub));
  int32_t root = game->add_node({kNoop}, {kNoop});
  Token deal_pub = game->strings().intern("deal!");
  Token t_tok = game->strings().intern("T");
  Token f_tok = game->strings().intern("F");
  Token end_pub = game->strings().intern("end!");
  Token go_pub = game->strings().intern("go");

  for (size_t i = 0; i < d.opp_order.size(); ++i) {
    if (d.hists[i].empty()) {
      if (std::isfinite(opp_cfv_bound[i])) {
        g.dropped.push_back(idx.info_key(opp, d.opp_order[i]));
      }
      continue;
    }
    bool can_stop = std::isfinite(opp_cfv_bound[i]);
    for (const auto& [h, m] : d.hists[i]) {
      // Opponent chooses Terminate/Follow knowing only their infostate.
      std::vector<Token> opp_acts =
          can_stop ? std::vector<Token>{t_tok, f_tok}
                   : std::vector<Token>{f_tok};
      std::vector<Token> acts0(1, kNoop), acts1(1, kNoop);
      (own == 0 ? acts1 : acts0) = opp_acts;
      int32_t pre = game->add_node(acts0, acts1, -1);
      Obs deal_obs;
      deal_obs.pub = deal_pub;
      deal_obs.priv[own] = game->strings().intern(
          "d:" + idx.info_key(own, idx.hists[h].info[own]));
      deal_obs.priv[opp] = game->strings().intern(
          "d:" + idx.info_key(opp, idx.hists[h].info[opp]));
      game->node(root).next[{kNoop, kNoop}].push_back(
          {pre, m / d.K, deal_obs, {0.0, 0.0}});

      if (can_stop) {
        int32_t stop = game->add_node({}, {}, -1);
        double u_opp = opp_cfv_bound[i] * d.K / d.k[i];
        std::array<double, 2> reward;
        reward[opp] = u_opp;
        reward[own] = -u_opp;
        std::pair<Token, Token> joint = {own == 0 ? kNoop : t_tok,
                                         own == 0 ? t_tok : kNoop};
        game->node(pre).next[joint].push_back(
            {stop, 1.0, {end_pub, {kNullToken, kNullToken}}, reward});
      }
      int32_t follow = replicate(*game, idx, h, d.K, {0.0, 0.0});
      std::pair<Token, Token> joint = {own == 0 ? kNoop : f_tok,
                                       own == 0 ? f_tok : kNoop};
      game->node(pre).next[joint].push_back(
          {follow, 1.0, {go_pub, {kNullToken, kNullToken}}, {0.0, 0.0}});
    }
  }
  g.game = game;
  return g;
}

GadgetGame build_maxmargin_gadget(const TreeIndex& idx, int32_t s_pub,
                                  int own,
                                  const std::vector<double>& own_range,
                                  const std::vector<double>& opp_value) {
  int opp = 1 - own;
  GadgetDeal d = gadget_deal(idx, s_pub, own, own_range);
  if (opp_value.size() != d.opp_order.size()) {
    throw std::invalid_argument("maxmargin gadget: value size mismatch");
  }
  GadgetGame g;
  g.kind = GadgetGame::Kind::kMaxMargin;
  g.own = own;
  g.pub = s_pub;
  g.mass = d.K;
  g.k = d.k;
  auto game = std::make_shared<ExplicitGame>(idx.game->name() + "/maxmargin:" +
                                             idx.pub_key(s_pub));
  Token start_pub = game->strings().intern("start!");
  std::vector<Token> picks;
  std::vector<size_t> live;
  for (size_t i = 0; i < d.opp_order.size(); ++i) {
    if (d.hists[i].empty()) {
      g.dropped.push_back(idx.info_key(opp, d.opp_order[i]));
      continue;
    }
    picks.push_back(game->strings().intern(
        "pick:" + idx.info_key(opp, d.opp_order[i])));
    live.push_back(i);
  }
  std::vector<Token> acts0(1, kNoop), acts1(1, kNoop);
  (own == 0 ? acts1 : acts0) = picks;
  int32_t root = game->add_node(acts0, acts1, -1);
  for (size_t j = 0; j < live.size(); ++j) {
    size_t i = live[j];
    std::array<double, 2> shift;
    shift[opp] = -opp_value[i];
    shift[own] = opp_value[i];
    for (const auto& [h, m] : d.hists[i]) {
      int32_t next = replicate(*game, idx, h, 1.0, shift);
      Obs obs;
      obs.pub = start_pub;
      obs.priv[own] = game->strings().intern(
          "d:" + idx.info_key(own, idx.hists[h].info[own]));
      std::pair<Token, Token> joint = {own == 0 ? kNoop : picks[j],
                                       own == 0 ? picks[j] : kNoop};
      game->node(root).next[joint].push_back(
          {next, m / d.k[i], obs, {0.0, 0.0}});
    }
  }
  g.game = game;
  return g;
}

std::vector<double> normalized_opp_values(const TreeIndex& idx, int32_t s_pub,
                                          int own,
                                          const BehaviorPolicy& own_policy) {
  std::vector<double> cbrv = opp_cbrv(idx, s_pub, own, own_policy);
  GadgetDeal d = gadget_deal(
      idx, s_pub, own,
      range_at(idx, own_policy, s_pub).w);
  std::vector<double> out(cbrv.size(), 0.0);
  for (size_t i = 0; i < cbrv.size(); ++i) {
    out[i] = d.k[i] > 0 ? cbrv[i] / d.k[i] : 0.0;
  }
  return out;
}

BehaviorPolicy map_gadget_policy(const GadgetGame& gadget,
                                 const TreeIndex& gadget_idx,
                                 const TreeIndex& idx,
                                 const BehaviorPolicy& gadget_policy,
                                 const BehaviorPolicy& base) {
  int own = gadget.own;
  std::unordered_map<int32_t, int32_t> gi2oi, oi2gi;
  for (size_t gh = 0; gh < gadget_idx.hists.size(); ++gh) {
    int32_t orig = gadget_idx.worlds[gh].size() > 1 ? gadget_idx.worlds[gh][1]
                                                    : -1;
    if (orig < 0) continue;
    if (idx.hists[orig].actor != own) continue;
    int32_t gi = gadget_idx.hists[gh].info[own];
    int32_t oi = idx.hists[orig].info[own];
    auto [it, inserted] = gi2oi.emplace(gi, oi);
    if (!inserted && it->second != oi) {
      throw std::logic_error("gadget map: infostate split across originals");
    }
    auto [it2, inserted2] = oi2gi.emplace(oi, gi);
    if (!inserted2 && it2->second != gi) {
      throw std::logic_error("gadget map: original infostate duplicated");
    }
  }
  BehaviorPolicy out = base;
  for (const auto& [gi, oi] : gi2oi) {
    size_t n = idx.infos[own][oi].actions.size();
    if (gadget_idx.infos[own][gi].actions.size() != n) {
      throw std::logic_error("gadget map: action list mismatch");
    }
    for (size_t a = 0; a < n; ++a) {
      out.probs[idx.act_offset[own][oi] + a] =
          gadget_policy.probs[gadget_idx.act_offset[own][gi] + a];
    }
  }
  return out;
}

double subgame_margin(const TreeIndex& idx, int32_t s_pub, int own,
                      const BehaviorPolicy& original,
                      const BehaviorPolicy& refined) {
  int opp = 1 - own;
  std::vector<double> own_range =
      sorted_to_members(idx, s_pub, own, range_at(idx, original, s_pub).w);
  std::vector<double> ones(idx.pubs[s_pub].members[opp].size(), 1.0);
  BehaviorPolicy opp_uniform = uniform_policy(idx, opp);
  Engine engine(idx);
  auto cbrv = [&](const BehaviorPolicy& own_policy) {
    Engine::Options opts;
    std::array<const double*, 2> pol;
    pol[own] = own_policy.probs.data();
    pol[opp] = opp_uniform.probs.data();
    opts.policy = pol;
    opts.responder[opp] = true;
    opts.root_pub = s_pub;
    std::array<const double*, 2> rr;
    rr[own] = own_range.data();
    rr[opp] = ones.data();
    opts.root_range = rr;
    const Engine::Result& res = engine.run(opts);
    std::vector<double> v;
    for (int32_t s : idx.sorted_members(s_pub, opp)) v.push_back(res.v[opp][s]);
    return v;
  };
  std::vector<double> v_orig = cbrv(original);
  std::vector<double> v_ref = cbrv(refined);
  double margin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < v_orig.size(); ++i) {
    margin = std::min(margin, v_orig[i] - v_ref[i]);
  }
  return margin;
}

BehaviorPolicy refine_subgame(const TreeIndex& idx, int32_t s_pub, int own,
                              const PolicyProfile& trunk,
                              const std::string& technique, int64_t iters) {
  if (technique == "unsafe") {
    return unsafe_resolve(idx, s_pub, trunk, iters, own).pi[own];
  }
  std::vector<double> own_range = range_at(idx, trunk.pi[own], s_pub).w;
  GadgetGame gadget;
  if (technique == "cfrd") {
    gadget = build_cfrd_gadget(idx, s_pub, own, own_range,
                               opp_cbrv(idx, s_pub, own, trunk.pi[own]));
  } else if (technique == "maxmargin") {
    gadget = build_maxmargin_gadget(
        idx, s_pub, own, own_range,
        normalized_opp_values(idx, s_pub, own, trunk.pi[own]));
  } else {
    throw std::runtime_error("refine_subgame: unknown technique '" +
                             technique + "'");
  }
  TreeIndex gidx = enumerate(gadget.game);
  CfrSolver solver(gidx, cfr_plus_config());
  solver.run(iters);
  return map_gadget_policy(gadget, gidx, idx, solver.average_policy(own),
                           trunk.pi[own]);
}

}  // namespace fosg
