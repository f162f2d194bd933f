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
// TreeIndex: the materialized history tree of a game together with the
// derived per-player infostate trees (action-observation histories) and the
// public tree (public-observation sequences), fully cross-linked.  All
// solvers in this library run over a TreeIndex instead of re-walking the
// game; the index is immutable after enumeration and safe to share.

#ifndef FOSG_TREE_H_
#define FOSG_TREE_H_

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "fosg/game.hpp"

namespace fosg {

struct EnumerateOptions {
  // Guard against non-terminating games: enumeration fails loudly once a
  // history exceeds this many joint actions.
  int max_depth = 512;
};

class TreeIndex {
 public:
  struct Hist {
    int32_t parent = -1;
    int32_t depth = 0;
    std::array<Token, 2> joint = {kNoop, kNoop};  // incoming joint action
    Obs obs;                                      // incoming observations
    double step_prob = 1.0;  // probability of the incoming outcome
    double pc = 1.0;         // chance reach P_c(h) from the root
    std::array<double, 2> ret = {0.0, 0.0};  // cumulative returns R_i(h)
    std::array<int32_t, 2> info = {0, 0};
    int32_t pub = 0;
    int8_t actor = -2;  // 0/1, -1 chance step, -2 terminal
    std::vector<int32_t> children;
  };

  struct Info {
    int8_t player = 0;
    int32_t parent = -1;
    Token action = kNoop;  // own action on the incoming step
    int32_t action_index = 0;  // index of `action` in the parent's list
    Token opub = kNullToken;
    Token opriv = kNullToken;
    int32_t pub = 0;
    std::vector<Token> actions;  // legal actions here (empty iff terminal)
    std::vector<int32_t> hists;  // member histories
  };

  struct Pub {
    int32_t parent = -1;
    Token obs = kNullToken;
    int32_t depth = 0;
    bool terminal = false;
    // True when the incoming transition was stochastic (a chance reveal);
    // used by the "until_public_event" lookahead depth policy.
    bool chance_event = false;
    std::array<std::vector<int32_t>, 2> members;  // infostates per player
    std::vector<int32_t> hists;
    std::vector<int32_t> children;
  };

  std::shared_ptr<const Game> game;
  std::vector<Hist> hists;
  std::vector<World> worlds;  // parallel to hists
  std::array<std::vector<Info>, 2> infos;
  std::vector<Pub> pubs;
  double delta_r = 0.0;  // max - min terminal return of player 1

  // Flat per-(infostate, action) offsets used by solver tables.
  std::array<std::vector<int32_t>, 2> act_offset;
  std::array<int32_t, 2> total_actions = {0, 0};

  int num_histories() const { return static_cast<int>(hists.size()); }
  int num_infostates() const {
    return static_cast<int>(infos[0].size() + infos[1].size());
  }
  int num_public_states() const { return static_cast<int>(pubs.size()); }
  int num_terminals() const;
  int distinct_worlds() const;
  // Decision infostates: the player's own turn with >= 2 actions.
  int num_decision_infostates(int player) const;
  bool is_decision(int player, int32_t s) const {
    return infos[player][s].actions.size() >= 2 ||
           (infos[player][s].actions.size() == 1 &&
            infos[player][s].actions[0] != kNoop);
  }

  // Stable, human-readable, whitespace-free keys.  An infostate key renders
  // the player's alternating own-action / observation sequence; a public key
  // renders the public-observation sequence.
  std::string info_key(int player, int32_t s) const;
  std::string pub_key(int32_t p) const;
  std::unordered_map<std::string, int32_t> key_to_info(int player) const;

  // Member infostates of a public state in infostate-key order: the stable
  // order used for Range and value vectors exposed to callers.
  std::vector<int32_t> sorted_members(int32_t pub, int player) const;

  // Opponent infostates sharing at least one history with (player, s).
  std::vector<int32_t> consistent_states(int player, int32_t s) const;
  // Fixed point of repeated consistency expansion, as a per-player pair of
  // infostate sets.
  std::array<std::vector<int32_t>, 2> common_info_closure(int player,
                                                          int32_t s) const;

  // Versioned binary form; enumerate() is deterministic, so equal games give
  // byte-identical serializations (used as an on-disk cache format).
  std::vector<uint8_t> serialize() const;
};

// Materializes the complete TreeIndex of `game`.  Validates the FOSG
// contract: transition probabilities sum to 1, terminal worlds have empty
// action sets for both players, zero-sum terminal returns, identical legal
// actions across each infostate's member histories, and public states that
// are uniformly terminal or non-terminal.
TreeIndex enumerate(std::shared_ptr<const Game> game,
                    const EnumerateOptions& opts = {});

}  // namespace fosg

#endif  // FOSG_TREE_H_
