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
// Built-in games: a matrix-game adapter, limit poker variants (Kuhn, Leduc,
// an asymmetric-deal mini poker), coordinated matching pennies, and the
// "glasses" graph-chase game; plus the name-based factory used by the CLI.

#ifndef FOSG_GAMES_H_
#define FOSG_GAMES_H_

#include <array>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fosg/game.hpp"

namespace fosg {

struct MatrixGameSpec {
  std::string name = "matrix";
  // Row player's payoff, payoff[i][j] for row action i vs column action j.
  std::vector<std::vector<double>> payoff;
  // Column player's payoff; empty means zero-sum (the negation of payoff).
  std::vector<std::vector<double>> payoff2;
  // General-sum construction must be requested explicitly; it exists only
  // for the evaluation demos and is otherwise rejected.
  bool allow_general_sum = false;
  std::vector<std::string> row_labels;  // default a0, a1, ...
  std::vector<std::string> col_labels;  // default b0, b1, ...
};

// Sequential encoding of a matrix game: the row player commits privately,
// then the column player acts in a single infostate; terminal rewards come
// from the matrix.
std::shared_ptr<Game> matrix_to_fosg(const MatrixGameSpec& spec);

struct PokerSpec {
  std::string name = "poker";
  std::vector<std::string> rank_names;  // low to high
  std::vector<int> rank_counts;         // copies of each rank in the deck
  int ante = 1;
  std::vector<int> bet_sizes;  // one entry per betting round
  int max_raises = 1;          // bets/raises allowed per round
  int rounds = 1;              // 2 adds a public board card and a second round
  // Explicit joint deal distribution (rank index per player); empty means
  // uniform without replacement from the deck.
  struct Deal {
    int c1 = 0;
    int c2 = 0;
    double prob = 0.0;
  };
  std::vector<Deal> deals;
};

std::shared_ptr<Game> make_poker(const PokerSpec& spec);

struct GraphChaseSpec {
  std::string name = "glasses";
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // undirected
  int evader_start = 0;
  std::array<int, 2> chaser_start = {0, 0};
  int horizon = 1;  // evader survives this many full turns to win
};

std::shared_ptr<Game> make_graph_chase(const GraphChaseSpec& spec);

std::shared_ptr<Game> make_matching_pennies_coordinated();

// Factory keyed by name: rps, rps_water, matching_pennies_coordinated,
// kuhn, leduc, mini_poker_asym, glasses, or the inline matrix syntax
// "matrix:0,1,-1;-1,0,1;1,-1,0".  Throws on unknown names or bad input.
std::shared_ptr<Game> make_game(const std::string& name);

}  // namespace fosg

#endif  // FOSG_GAMES_H_
