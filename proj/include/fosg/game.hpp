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
// Factored-observation stochastic game (FOSG) interface.  A game exposes
// world states, joint actions with stochastic transitions, per-step rewards,
// and observations factored into one public token plus one private token per
// player.  Sequential games are encoded by giving the non-acting player a
// single explicit "noop" action, so every step is a joint action and a world
// is terminal exactly when both action sets are empty.

#ifndef FOSG_GAME_H_
#define FOSG_GAME_H_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace fosg {

// Action and observation tokens are small integers interned in a per-game
// string table, for compact tree storage and stable serialization.
using Token = int32_t;
constexpr Token kNullToken = 0;  // the empty observation ""
constexpr Token kNoop = 1;       // the non-acting player's forced action

class StringTable {
 public:
  StringTable() {
    intern("");
    intern("noop");
  }

  Token intern(const std::string& s) {
    auto it = ids_.find(s);
    if (it != ids_.end()) return it->second;
    Token t = static_cast<Token>(strs_.size());
    strs_.push_back(s);
    ids_.emplace(s, t);
    return t;
  }

  // Returns -1 when the string was never interned.
  Token lookup(const std::string& s) const {
    auto it = ids_.find(s);
    return it == ids_.end() ? -1 : it->second;
  }

  const std::string& name(Token t) const { return strs_.at(t); }
  size_t size() const { return strs_.size(); }

 private:
  std::vector<std::string> strs_;
  std::unordered_map<std::string, Token> ids_;
};

// Game-specific world encoding; only the game interprets the contents.
using World = std::vector<int32_t>;

struct Obs {
  Token pub = kNullToken;
  std::array<Token, 2> priv = {kNullToken, kNullToken};
};

// One entry of the transition distribution T(w, a): successor world,
// probability, emitted observations and per-player step rewards.
struct Outcome {
  World world;
  double prob = 1.0;
  Obs obs;
  std::array<double, 2> reward = {0.0, 0.0};
};

class Game {
 public:
  virtual ~Game() = default;

  virtual std::string name() const = 0;
  virtual World initial_world() const = 0;

  // Ordered action list for `player` at `w`.  Exactly one of: real actions
  // (the acting player), {kNoop} (the waiting player, or both players at a
  // pure chance step), or empty for both players (terminal).
  virtual std::vector<Token> legal_actions(const World& w, int player) const = 0;

  // Transition distribution for the joint action (a0, a1).  Probabilities
  // must sum to 1; chance lives inside this distribution (no chance player).
  virtual std::vector<Outcome> apply(const World& w, Token a0, Token a1) const = 0;

  // Zero-sum games only; general-sum construction is gated behind an
  // explicit escape hatch in the matrix adapter (evaluation demos).
  virtual bool zero_sum() const { return true; }

  bool is_terminal(const World& w) const {
    return legal_actions(w, 0).empty() && legal_actions(w, 1).empty();
  }

  // 0/1 = acting player, -1 = pure chance step, -2 = terminal.
  int actor(const World& w) const {
    std::array<std::vector<Token>, 2> acts = {legal_actions(w, 0),
                                              legal_actions(w, 1)};
    if (acts[0].empty() && acts[1].empty()) return -2;
    for (int p = 0; p < 2; ++p) {
      if (acts[p].size() > 1 || (acts[p].size() == 1 && acts[p][0] != kNoop))
        return p;
    }
    return -1;
  }

  const StringTable& strings() const { return table_; }
  StringTable& strings() { return table_; }

 protected:
  mutable StringTable table_;
};

}  // namespace fosg

#endif  // FOSG_GAME_H_
