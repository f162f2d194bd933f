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

#include "fosg/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fosg {
namespace {

// Intern key for an infostate or public-state node: (parent id, own action,
// private obs, public obs).  Perfect recall holds by construction because
// children are keyed by their parent node.
struct NodeKey {
  int32_t parent;
  Token action;
  Token opriv;
  Token opub;
  bool operator==(const NodeKey& o) const {
    return parent == o.parent && action == o.action && opriv == o.opriv &&
           opub == o.opub;
  }
};

struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    uint64_t h = 1469598103934665603ULL;
    for (uint64_t v : {static_cast<uint64_t>(static_cast<uint32_t>(k.parent)),
                       static_cast<uint64_t>(static_cast<uint32_t>(k.action)),
                       static_cast<uint64_t>(static_cast<uint32_t>(k.opriv)),
                       static_cast<uint64_t>(static_cast<uint32_t>(k.opub))}) {
      h = (h ^ v) * 1099511628211ULL;
    }
    return static_cast<size_t>(h);
  }
};

int index_of(const std::vector<Token>& actions, Token a) {
  for (size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] == a) return static_cast<int>(i);
  }
  throw std::runtime_error("action not in parent infostate's legal list");
}

}  // namespace

TreeIndex enumerate(std::shared_ptr<const Game> game,
                    const EnumerateOptions& opts) {
  TreeIndex ix;
  ix.game = game;

  std::array<std::unordered_map<NodeKey, int32_t, NodeKeyHash>, 2> info_ids;
  std::unordered_map<NodeKey, int32_t, NodeKeyHash> pub_ids;

  World w0 = game->initial_world();
  ix.worlds.push_back(w0);
  TreeIndex::Hist root;
  root.actor = static_cast<int8_t>(game->actor(w0));
  ix.hists.push_back(root);

  TreeIndex::Pub rpub;
  rpub.terminal = game->is_terminal(w0);
  ix.pubs.push_back(rpub);
  for (int p = 0; p < 2; ++p) {
    TreeIndex::Info ri;
    ri.player = static_cast<int8_t>(p);
    ri.actions = game->legal_actions(w0, p);
    ri.hists.push_back(0);
    ix.infos[p].push_back(ri);
    ix.pubs[0].members[p].push_back(0);
  }
  ix.pubs[0].hists.push_back(0);

  std::deque<int32_t> queue = {0};
  while (!queue.empty()) {
    int32_t hid = queue.front();
    queue.pop_front();
    // Copy scalar fields: ix.hists may reallocate while we append children.
    const World w = ix.worlds[hid];
    const double pc = ix.hists[hid].pc;
    const std::array<double, 2> ret = ix.hists[hid].ret;
    const int32_t depth = ix.hists[hid].depth;
    const std::array<int32_t, 2> hinfo = ix.hists[hid].info;
    const int32_t hpub = ix.hists[hid].pub;

    std::array<std::vector<Token>, 2> acts = {game->legal_actions(w, 0),
                                              game->legal_actions(w, 1)};
    if (acts[0].empty() != acts[1].empty()) {
      throw std::runtime_error(game->name() +
                               ": world with one empty and one non-empty "
                               "action set violates the terminal convention");
    }
    if (acts[0].empty()) {
      if (game->zero_sum() && std::abs(ret[0] + ret[1]) > 1e-12) {
        throw std::runtime_error(game->name() + ": terminal returns not zero-sum");
      }
      continue;
    }
    if (depth >= opts.max_depth) {
      throw std::runtime_error(
          game->name() + ": enumeration exceeded depth limit at history length " +
          std::to_string(depth));
    }

    for (Token a0 : acts[0]) {
      for (Token a1 : acts[1]) {
        std::vector<Outcome> outs = game->apply(w, a0, a1);
        double psum = 0;
        for (const Outcome& o : outs) {
          if (o.prob < 0 || o.prob > 1 + 1e-12) {
            throw std::runtime_error(game->name() + ": transition prob out of range");
          }
          psum += o.prob;
        }
        if (std::abs(psum - 1.0) > 1e-9) {
          throw std::runtime_error(game->name() + ": transition probs do not sum to 1");
        }
        const bool stochastic = outs.size() > 1;

        for (const Outcome& o : outs) {
          int32_t cid = static_cast<int32_t>(ix.hists.size());
          TreeIndex::Hist ch;
          ch.parent = hid;
          ch.depth = depth + 1;
          ch.joint = {a0, a1};
          ch.obs = o.obs;
          ch.step_prob = o.prob;
          ch.pc = pc * o.prob;
          ch.ret = {ret[0] + o.reward[0], ret[1] + o.reward[1]};
          ch.actor = static_cast<int8_t>(game->actor(o.world));
          const bool cterm = (ch.actor == -2);

          // Public state.
          NodeKey pk{hpub, kNoop, kNullToken, o.obs.pub};
          auto pit = pub_ids.find(pk);
          int32_t pubid;
          if (pit == pub_ids.end()) {
            pubid = static_cast<int32_t>(ix.pubs.size());
            pub_ids.emplace(pk, pubid);
            TreeIndex::Pub np;
            np.parent = hpub;
            np.obs = o.obs.pub;
            np.depth = ix.pubs[hpub].depth + 1;
            np.terminal = cterm;
            np.chance_event = stochastic;
            ix.pubs.push_back(np);
            ix.pubs[hpub].children.push_back(pubid);
          } else {
            pubid = pit->second;
            ix.pubs[pubid].chance_event =
                ix.pubs[pubid].chance_event || stochastic;
            if (ix.pubs[pubid].terminal != cterm) {
              throw std::runtime_error(
                  game->name() +
                  ": public state mixes terminal and non-terminal histories "
                  "(emit a distinguishing public token on terminal "
                  "transitions)");
            }
          }
          ch.pub = pubid;

          // Infostates.
          for (int p = 0; p < 2; ++p) {
            Token ap = (p == 0) ? a0 : a1;
            NodeKey k{hinfo[p], ap, o.obs.priv[p], o.obs.pub};
            auto iit = info_ids[p].find(k);
            int32_t sid;
            if (iit == info_ids[p].end()) {
              sid = static_cast<int32_t>(ix.infos[p].size());
              info_ids[p].emplace(k, sid);
              TreeIndex::Info ni;
              ni.player = static_cast<int8_t>(p);
              ni.parent = hinfo[p];
              ni.action = ap;
              ni.action_index = index_of(ix.infos[p][hinfo[p]].actions, ap);
              ni.opub = o.obs.pub;
              ni.opriv = o.obs.priv[p];
              ni.pub = pubid;
              ni.actions = game->legal_actions(o.world, p);
              ix.infos[p].push_back(ni);
              ix.pubs[pubid].members[p].push_back(sid);
            } else {
              sid = iit->second;
              if (ix.infos[p][sid].actions != game->legal_actions(o.world, p)) {
                throw std::runtime_error(
                    game->name() +
                    ": histories in one infostate expose different legal "
                    "actions");
              }
            }
            ch.info[p] = sid;
            ix.infos[p][sid].hists.push_back(cid);
          }

          ix.worlds.push_back(o.world);
          ix.hists.push_back(ch);
          ix.hists[hid].children.push_back(cid);
          ix.pubs[pubid].hists.push_back(cid);
          queue.push_back(cid);
        }
      }
    }
  }

  // Δ_R over terminal player-1 returns.
  double rmin = 0, rmax = 0;
  bool any = false;
  for (const auto& h : ix.hists) {
    if (h.actor != -2) continue;
    if (!any || h.ret[0] < rmin) rmin = h.ret[0];
    if (!any || h.ret[0] > rmax) rmax = h.ret[0];
    any = true;
  }
  ix.delta_r = any ? rmax - rmin : 0.0;

  for (int p = 0; p < 2; ++p) {
    ix.act_offset[p].resize(ix.infos[p].size());
    int32_t off = 0;
    for (size_t s = 0; s < ix.infos[p].size(); ++s) {
      ix.act_offset[p][s] = off;
      off += static_cast<int32_t>(ix.infos[p][s].actions.size());
    }
    ix.total_actions[p] = off;
  }
  return ix;
}

int TreeIndex::num_terminals() const {
  int n = 0;
  for (const auto& h : hists) n += (h.actor == -2);
  return n;
}

int TreeIndex::distinct_worlds() const {
  std::set<World> ws(worlds.begin(), worlds.end());
  return static_cast<int>(ws.size());
}

int TreeIndex::num_decision_infostates(int player) const {
  int n = 0;
  for (size_t s = 0; s < infos[player].size(); ++s) {
    n += is_decision(player, static_cast<int32_t>(s));
  }
  return n;
}

std::string TreeIndex::info_key(int player, int32_t s) const {
  std::vector<int32_t> chain;
  for (int32_t c = s; c >= 0; c = infos[player][c].parent) chain.push_back(c);
  std::reverse(chain.begin(), chain.end());
  const StringTable& st = game->strings();
  std::string out = player == 0 ? "P1|" : "P2|";
  for (size_t i = 1; i < chain.size(); ++i) {  // chain[0] is the root key
    const Info& n = infos[player][chain[i]];
    if (i > 1) out += "/";
    if (n.action != kNoop) out += st.name(n.action);
    out += "[" + st.name(n.opub) + ";" + st.name(n.opriv) + "]";
  }
  return out;
}

std::string TreeIndex::pub_key(int32_t p) const {
  std::vector<int32_t> chain;
  for (int32_t c = p; c >= 0; c = pubs[c].parent) chain.push_back(c);
  std::reverse(chain.begin(), chain.end());
  const StringTable& st = game->strings();
  std::string out = "pub|";
  for (size_t i = 1; i < chain.size(); ++i) {
    out += "[" + st.name(pubs[chain[i]].obs) + "]";
  }
  return out;
}

std::unordered_map<std::string, int32_t> TreeIndex::key_to_info(
    int player) const {
  std::unordered_map<std::string, int32_t> m;
  for (size_t s = 0; s < infos[player].size(); ++s) {
    m.emplace(info_key(player, static_cast<int32_t>(s)),
              static_cast<int32_t>(s));
  }
  return m;
}

std::vector<int32_t> TreeIndex::sorted_members(int32_t pub, int player) const {
  std::vector<int32_t> out = pubs[pub].members[player];
  std::sort(out.begin(), out.end(), [&](int32_t a, int32_t b) {
    return info_key(player, a) < info_key(player, b);
  });
  return out;
}

std::vector<int32_t> TreeIndex::consistent_states(int player, int32_t s) const {
  std::set<int32_t> out;
  for (int32_t h : infos[player][s].hists) out.insert(hists[h].info[1 - player]);
  return std::vector<int32_t>(out.begin(), out.end());
}

std::array<std::vector<int32_t>, 2> TreeIndex::common_info_closure(
    int player, int32_t s) const {
  std::array<std::set<int32_t>, 2> seen;
  std::deque<std::pair<int, int32_t>> queue = {{player, s}};
  seen[player].insert(s);
  while (!queue.empty()) {
    auto [p, cur] = queue.front();
    queue.pop_front();
    for (int32_t o : consistent_states(p, cur)) {
      if (seen[1 - p].insert(o).second) queue.push_back({1 - p, o});
    }
  }
  return {std::vector<int32_t>(seen[0].begin(), seen[0].end()),
          std::vector<int32_t>(seen[1].begin(), seen[1].end())};
}

namespace {
struct Writer {
  std::vector<uint8_t> buf;
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
  void f64(double v) {
    uint64_t b;
    std::memcpy(&b, &v, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<uint8_t>(b >> (8 * i)));
  }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    buf.insert(buf.end(), s.begin(), s.end());
  }
};
}  // namespace

std::vector<uint8_t> TreeIndex::serialize() const {
  Writer w;
  w.str("fosg-treeindex");
  w.u32(1);  // format version
  w.str(game->name());
  w.u32(static_cast<uint32_t>(hists.size()));
  for (const auto& h : hists) {
    w.i32(h.parent);
    w.i32(h.depth);
    w.i32(h.joint[0]);
    w.i32(h.joint[1]);
    w.i32(h.obs.pub);
    w.i32(h.obs.priv[0]);
    w.i32(h.obs.priv[1]);
    w.f64(h.step_prob);
    w.f64(h.pc);
    w.f64(h.ret[0]);
    w.f64(h.ret[1]);
    w.i32(h.info[0]);
    w.i32(h.info[1]);
    w.i32(h.pub);
    w.i32(h.actor);
  }
  for (int p = 0; p < 2; ++p) {
    w.u32(static_cast<uint32_t>(infos[p].size()));
    for (const auto& s : infos[p]) {
      w.i32(s.parent);
      w.i32(s.action);
      w.i32(s.action_index);
      w.i32(s.opub);
      w.i32(s.opriv);
      w.i32(s.pub);
      w.u32(static_cast<uint32_t>(s.actions.size()));
      for (Token a : s.actions) w.i32(a);
    }
  }
  w.u32(static_cast<uint32_t>(pubs.size()));
  for (const auto& p : pubs) {
    w.i32(p.parent);
    w.i32(p.obs);
    w.i32(p.depth);
    w.u32(p.terminal ? 1 : 0);
    w.u32(p.chance_event ? 1 : 0);
  }
  w.f64(delta_r);
  return w.buf;
}

}  // namespace fosg
