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

#include "fosg/games.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fosg {
namespace {

// ---------------------------------------------------------------------------
// Matrix games, encoded sequentially: the row player commits privately, the
// column player then acts in a single infostate, and the step after the
// column action is terminal with the matrix payoffs.
// World: {phase, row, col} with -1 for not-yet-chosen.
class MatrixGame : public Game {
 public:
  explicit MatrixGame(MatrixGameSpec spec) : spec_(std::move(spec)) {
    if (spec_.payoff.empty() || spec_.payoff[0].empty()) {
      throw std::invalid_argument("matrix_to_fosg: empty payoff matrix");
    }
    size_t cols = spec_.payoff[0].size();
    for (const auto& row : spec_.payoff) {
      if (row.size() != cols) {
        throw std::invalid_argument("matrix_to_fosg: ragged payoff matrix");
      }
    }
    if (!spec_.payoff2.empty()) {
      if (!spec_.allow_general_sum) {
        throw std::invalid_argument(
            "matrix_to_fosg: general-sum payoffs require the explicit "
            "allow_general_sum escape hatch");
      }
      if (spec_.payoff2.size() != spec_.payoff.size() ||
          spec_.payoff2[0].size() != cols) {
        throw std::invalid_argument("matrix_to_fosg: payoff2 shape mismatch");
      }
    }
    if (spec_.row_labels.empty()) {
      for (size_t i = 0; i < spec_.payoff.size(); ++i) {
        spec_.row_labels.push_back("a" + std::to_string(i));
      }
    }
    if (spec_.col_labels.empty()) {
      for (size_t j = 0; j < cols; ++j) {
        spec_.col_labels.push_back("b" + std::to_string(j));
      }
    }
    if (spec_.row_labels.size() != spec_.payoff.size() ||
        spec_.col_labels.size() != cols) {
      throw std::invalid_argument("matrix_to_fosg: label count mismatch");
    }
    for (const auto& s : spec_.row_labels) row_acts_.push_back(table_.intern(s));
    for (const auto& s : spec_.col_labels) col_acts_.push_back(table_.intern(s));
  }

  std::string name() const override { return spec_.name; }
  World initial_world() const override { return {0, -1, -1}; }
  bool zero_sum() const override { return spec_.payoff2.empty(); }

  std::vector<Token> legal_actions(const World& w, int player) const override {
    switch (w[0]) {
      case 0:
        return player == 0 ? row_acts_ : std::vector<Token>{kNoop};
      case 1:
        return player == 1 ? col_acts_ : std::vector<Token>{kNoop};
      default:
        return {};
    }
  }

  std::vector<Outcome> apply(const World& w, Token a0, Token a1) const override {
    Outcome o;
    if (w[0] == 0) {
      int i = index_of(row_acts_, a0);
      o.world = {1, i, -1};
    } else {
      int i = w[1];
      int j = index_of(col_acts_, a1);
      o.world = {2, i, j};
      o.reward[0] = spec_.payoff[i][j];
      o.reward[1] =
          spec_.payoff2.empty() ? -spec_.payoff[i][j] : spec_.payoff2[i][j];
    }
    return {o};
  }

 private:
  static int index_of(const std::vector<Token>& acts, Token a) {
    auto it = std::find(acts.begin(), acts.end(), a);
    if (it == acts.end()) throw std::invalid_argument("matrix: illegal action");
    return static_cast<int>(it - acts.begin());
  }

  MatrixGameSpec spec_;
  std::vector<Token> row_acts_, col_acts_;
};

// ---------------------------------------------------------------------------
// Heads-up limit poker with configurable deck, deal distribution, antes,
// per-round bet sizes and raise cap.  Private cards are dealt in one chance
// transition per player; with two rounds a public board card is dealt
// between them.  Showdown: board pair beats high card, otherwise the higher
// rank wins, equal ranks split.
//
// World layout:
//   0 phase: 0 deal c1, 1 deal c2, 2 betting, 3 board deal, 4 terminal
//   1 c1, 2 c2, 3 board (rank indices, -1 unknown)
//   4 round, 5 raises this round, 6 amount pending for to_act
//   7 contrib p1, 8 contrib p2, 9 to_act, 10 checks this round, 11 folder
class PokerGame : public Game {
 public:
  explicit PokerGame(PokerSpec spec) : spec_(std::move(spec)) {
    if (spec_.rank_names.empty() ||
        spec_.rank_names.size() != spec_.rank_counts.size()) {
      throw std::invalid_argument(spec_.name + ": bad rank description");
    }
    if (spec_.rounds < 1 || spec_.rounds > 2 ||
        static_cast<int>(spec_.bet_sizes.size()) != spec_.rounds) {
      throw std::invalid_argument(spec_.name + ": bad betting rounds");
    }
    double total = 0;
    for (const auto& d : spec_.deals) {
      if (d.prob <= 0) {
        throw std::invalid_argument(spec_.name + ": non-positive deal prob");
      }
      total += d.prob;
    }
    if (!spec_.deals.empty() && std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument(spec_.name + ": deal probs must sum to 1");
    }
    for (const auto& r : spec_.rank_names) rank_tok_.push_back(table_.intern(r));
    for (const char* a : {"k", "b", "c", "f", "r"}) {
      act_tok_.push_back(table_.intern(a));
    }
  }

  std::string name() const override { return spec_.name; }

  World initial_world() const override {
    return {0, -1, -1, -1, 0, 0, 0, spec_.ante, spec_.ante, 0, 0, -1};
  }

  std::vector<Token> legal_actions(const World& w, int player) const override {
    switch (w[0]) {
      case 0:
      case 1:
      case 3:
        return {kNoop};  // chance step
      case 2: {
        if (player != w[9]) return {kNoop};
        std::vector<Token> acts;
        bool can_raise = w[5] < spec_.max_raises;
        if (w[6] == 0) {
          acts.push_back(tok('k'));
          if (can_raise) acts.push_back(tok('b'));
        } else {
          acts.push_back(tok('f'));
          acts.push_back(tok('c'));
          if (can_raise) acts.push_back(tok('r'));
        }
        return acts;
      }
      default:
        return {};
    }
  }

  std::vector<Outcome> apply(const World& w, Token a0, Token a1) const override {
    switch (w[0]) {
      case 0:
        return deal_private(w, 0);
      case 1:
        return deal_private(w, 1);
      case 3:
        return deal_board(w);
      case 2:
        return betting_step(w, w[9] == 0 ? a0 : a1);
      default:
        throw std::logic_error(spec_.name + ": apply at terminal");
    }
  }

 private:
  Token tok(char c) const {
    switch (c) {
      case 'k': return act_tok_[0];
      case 'b': return act_tok_[1];
      case 'c': return act_tok_[2];
      case 'f': return act_tok_[3];
      default:  return act_tok_[4];
    }
  }

  std::vector<Outcome> deal_private(const World& w, int player) const {
    std::vector<double> weight(spec_.rank_names.size(), 0.0);
    if (!spec_.deals.empty()) {
      for (const auto& d : spec_.deals) {
        if (player == 0) {
          weight[d.c1] += d.prob;
        } else if (d.c1 == w[1]) {
          weight[d.c2] += d.prob;
        }
      }
    } else {
      for (size_t r = 0; r < weight.size(); ++r) {
        weight[r] = spec_.rank_counts[r] - (player == 1 && w[1] == (int)r);
      }
    }
    return card_outcomes(w, weight, [&](World& nw, int r) {
      nw[0] = player == 0 ? 1 : 2;
      nw[1 + player] = r;
    }, /*priv_player=*/player);
  }

  std::vector<Outcome> deal_board(const World& w) const {
    std::vector<double> weight(spec_.rank_names.size(), 0.0);
    for (size_t r = 0; r < weight.size(); ++r) {
      weight[r] =
          spec_.rank_counts[r] - (w[1] == (int)r) - (w[2] == (int)r);
    }
    return card_outcomes(w, weight, [&](World& nw, int r) {
      nw[0] = 2;
      nw[3] = r;
      nw[4] = 1;   // second betting round
      nw[5] = 0;
      nw[6] = 0;
      nw[9] = 0;
      nw[10] = 0;
    }, /*priv_player=*/-1);
  }

  template <typename Fill>
  std::vector<Outcome> card_outcomes(const World& w,
                                     const std::vector<double>& weight,
                                     Fill fill, int priv_player) const {
    double total = 0;
    for (double x : weight) total += x;
    if (total <= 0) throw std::logic_error(spec_.name + ": empty deal");
    std::vector<Outcome> outs;
    for (size_t r = 0; r < weight.size(); ++r) {
      if (weight[r] <= 0) continue;
      Outcome o;
      o.world = w;
      fill(o.world, static_cast<int>(r));
      o.prob = weight[r] / total;
      if (priv_player >= 0) {
        o.obs.priv[priv_player] = rank_tok_[r];
      } else {
        o.obs.pub = rank_tok_[r];
      }
      outs.push_back(std::move(o));
    }
    return outs;
  }

  std::vector<Outcome> betting_step(const World& w, Token a) const {
    int me = w[9], opp = 1 - me;
    int bet = spec_.bet_sizes[w[4]];
    Outcome o;
    o.world = w;
    o.obs.pub = a;
    World& n = o.world;
    if (a == tok('k')) {
      if (++n[10] == 2) return end_round(std::move(o));
      n[9] = opp;
    } else if (a == tok('b')) {
      n[7 + me] += bet;
      n[6] = bet;
      n[5] = 1;
      n[9] = opp;
    } else if (a == tok('c')) {
      n[7 + me] += n[6];
      n[6] = 0;
      return end_round(std::move(o));
    } else if (a == tok('r')) {
      n[7 + me] += n[6] + bet;
      n[6] = bet;
      n[5] += 1;
      n[9] = opp;
    } else if (a == tok('f')) {
      n[0] = 4;
      n[11] = me;
      o.reward[opp] = n[7 + me];
      o.reward[me] = -n[7 + me];
    } else {
      throw std::invalid_argument(spec_.name + ": illegal betting action");
    }
    return {std::move(o)};
  }

  std::vector<Outcome> end_round(Outcome o) const {
    World& n = o.world;
    if (n[4] + 1 < spec_.rounds) {
      n[0] = 3;  // deal the board, then the next round
      return {std::move(o)};
    }
    n[0] = 4;
    int win = winner(n);
    if (win >= 0) {
      o.reward[win] = n[7 + (1 - win)];
      o.reward[1 - win] = -n[7 + (1 - win)];
    }
    return {std::move(o)};
  }

  // -1 for a split pot.
  int winner(const World& w) const {
    if (w[3] >= 0) {
      bool p0 = w[1] == w[3], p1 = w[2] == w[3];
      if (p0 != p1) return p0 ? 0 : 1;
    }
    if (w[1] != w[2]) return w[1] > w[2] ? 0 : 1;
    return -1;
  }

  PokerSpec spec_;
  std::vector<Token> rank_tok_;
  std::vector<Token> act_tok_;  // k b c f r
};

// ---------------------------------------------------------------------------
// Coordinated matching pennies: player 1 privately plays (H)eads or (T)ails,
// chance then publicly announces (L)eft or (R)ight, and player 2 — who knows
// only the public side — guesses the coin.  Player 2 wins the point exactly
// when the guess matches; any optimal policy must therefore coordinate
// between its two infostates (the guess probabilities sum to one).
// World: {phase, coin, side, guess}.
class CoordinatedMatchingPennies : public Game {
 public:
  CoordinatedMatchingPennies() {
    h_ = table_.intern("H");
    t_ = table_.intern("T");
    l_ = table_.intern("L");
    r_ = table_.intern("R");
  }

  std::string name() const override { return "matching_pennies_coordinated"; }
  World initial_world() const override { return {0, -1, -1, -1}; }

  std::vector<Token> legal_actions(const World& w, int player) const override {
    switch (w[0]) {
      case 0:
        return player == 0 ? std::vector<Token>{h_, t_}
                           : std::vector<Token>{kNoop};
      case 1:
        return {kNoop};  // chance
      case 2:
        return player == 1 ? std::vector<Token>{h_, t_}
                           : std::vector<Token>{kNoop};
      default:
        return {};
    }
  }

  std::vector<Outcome> apply(const World& w, Token a0, Token a1) const override {
    if (w[0] == 0) {
      Outcome o;
      o.world = {1, a0 == h_ ? 0 : 1, -1, -1};
      return {o};
    }
    if (w[0] == 1) {
      std::vector<Outcome> outs(2);
      for (int side = 0; side < 2; ++side) {
        outs[side].world = {2, w[1], side, -1};
        outs[side].prob = 0.5;
        outs[side].obs.pub = side == 0 ? l_ : r_;
      }
      return outs;
    }
    Outcome o;
    int guess = a1 == h_ ? 0 : 1;
    o.world = {3, w[1], w[2], guess};
    o.reward[1] = guess == w[1] ? 1.0 : -1.0;
    o.reward[0] = -o.reward[1];
    return {o};
  }

 private:
  Token h_, t_, l_, r_;
};

// ---------------------------------------------------------------------------
// Graph chase ("glasses"): an evader (player 1) moves privately along the
// graph; a chaser (player 2) moves two stones, seeing only its own stones.
// Stone moves are public, so the evader always knows where the stones are.
// Each turn the evader moves to an adjacent node, then the chaser moves each
// stone to an adjacent node or leaves it.  The chaser wins on reaching the
// evader's node (or if the evader steps onto a stone); the evader wins by
// surviving `horizon` full turns.  Terminal transitions emit a public "end"
// token so that game end is commonly known.
// World: {phase (0 evader, 1 chaser, 2 done), evader, stone0, stone1, turns}.
class GraphChaseGame : public Game {
 public:
  explicit GraphChaseGame(GraphChaseSpec spec) : spec_(std::move(spec)) {
    if (spec_.num_nodes <= 0 || spec_.horizon < 1) {
      throw std::invalid_argument("graph_chase: bad spec");
    }
    adj_.resize(spec_.num_nodes);
    for (auto [a, b] : spec_.edges) {
      if (a < 0 || b < 0 || a >= spec_.num_nodes || b >= spec_.num_nodes) {
        throw std::invalid_argument("graph_chase: edge out of range");
      }
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
    check_node(spec_.evader_start);
    check_node(spec_.chaser_start[0]);
    check_node(spec_.chaser_start[1]);
    for (int v = 0; v < spec_.num_nodes; ++v) {
      node_tok_.push_back(table_.intern("n" + std::to_string(v)));
    }
    end_tok_ = table_.intern("end");
    // Chaser actions: one token per (stone0 destination, stone1 destination).
    pair_tok_.assign(spec_.num_nodes,
                     std::vector<Token>(spec_.num_nodes, kNullToken));
    for (int a = 0; a < spec_.num_nodes; ++a) {
      for (int b = 0; b < spec_.num_nodes; ++b) {
        pair_tok_[a][b] =
            table_.intern("n" + std::to_string(a) + "-n" + std::to_string(b));
      }
    }
  }

  std::string name() const override { return spec_.name; }

  World initial_world() const override {
    return {0, spec_.evader_start, spec_.chaser_start[0], spec_.chaser_start[1],
            0};
  }

  std::vector<Token> legal_actions(const World& w, int player) const override {
    if (w[0] == 2) return {};
    if (w[0] == 0) {
      if (player != 0) return {kNoop};
      std::vector<Token> acts;
      for (int v : adj_[w[1]]) acts.push_back(node_tok_[v]);
      return acts;
    }
    if (player != 1) return {kNoop};
    std::vector<Token> acts;
    for (int a : stays(w[2])) {
      for (int b : stays(w[3])) acts.push_back(pair_tok_[a][b]);
    }
    return acts;
  }

  std::vector<Outcome> apply(const World& w, Token a0, Token a1) const override {
    Outcome o;
    o.world = w;
    World& n = o.world;
    if (w[0] == 0) {
      int dest = find_node(a0);
      n[1] = dest;
      if (dest == w[2] || dest == w[3]) {
        return {capture(std::move(o))};
      }
      n[0] = 1;
      return {std::move(o)};
    }
    auto [d0, d1] = find_pair(a1);
    n[2] = d0;
    n[3] = d1;
    o.obs.pub = a1;  // stone positions are public
    if (n[1] == d0 || n[1] == d1) {
      return {capture(std::move(o))};
    }
    if (++n[4] == spec_.horizon) {
      n[0] = 2;
      o.obs.pub = end_tok_;
      o.reward[0] = 1.0;  // evader survived
      o.reward[1] = -1.0;
      return {std::move(o)};
    }
    n[0] = 0;
    return {std::move(o)};
  }

 private:
  Outcome capture(Outcome o) const {
    o.world[0] = 2;
    o.obs.pub = end_tok_;
    o.reward[0] = -1.0;
    o.reward[1] = 1.0;
    return o;
  }

  void check_node(int v) const {
    if (v < 0 || v >= spec_.num_nodes) {
      throw std::invalid_argument("graph_chase: node out of range");
    }
  }

  std::vector<int> stays(int v) const {
    std::vector<int> dests = adj_[v];
    dests.insert(dests.begin(), v);
    return dests;
  }

  int find_node(Token t) const {
    for (int v = 0; v < spec_.num_nodes; ++v) {
      if (node_tok_[v] == t) return v;
    }
    throw std::invalid_argument("graph_chase: illegal evader action");
  }

  std::pair<int, int> find_pair(Token t) const {
    for (int a = 0; a < spec_.num_nodes; ++a) {
      for (int b = 0; b < spec_.num_nodes; ++b) {
        if (pair_tok_[a][b] == t) return {a, b};
      }
    }
    throw std::invalid_argument("graph_chase: illegal chaser action");
  }

  GraphChaseSpec spec_;
  std::vector<std::vector<int>> adj_;
  std::vector<Token> node_tok_;
  std::vector<std::vector<Token>> pair_tok_;
  Token end_tok_ = kNullToken;
};

MatrixGameSpec parse_inline_matrix(const std::string& body) {
  MatrixGameSpec spec;
  spec.name = "matrix:" + body;
  std::stringstream rows(body);
  std::string row;
  while (std::getline(rows, row, ';')) {
    std::vector<double> vals;
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      size_t used = 0;
      vals.push_back(std::stod(cell, &used));
      if (used != cell.size()) {
        throw std::invalid_argument("make_game: bad matrix entry '" + cell +
                                    "'");
      }
    }
    spec.payoff.push_back(std::move(vals));
  }
  return spec;
}

}  // namespace

std::shared_ptr<Game> matrix_to_fosg(const MatrixGameSpec& spec) {
  return std::make_shared<MatrixGame>(spec);
}

std::shared_ptr<Game> make_poker(const PokerSpec& spec) {
  return std::make_shared<PokerGame>(spec);
}

std::shared_ptr<Game> make_graph_chase(const GraphChaseSpec& spec) {
  return std::make_shared<GraphChaseGame>(spec);
}

std::shared_ptr<Game> make_matching_pennies_coordinated() {
  return std::make_shared<CoordinatedMatchingPennies>();
}

std::shared_ptr<Game> make_game(const std::string& name) {
  if (name.rfind("matrix:", 0) == 0) {
    return matrix_to_fosg(parse_inline_matrix(name.substr(7)));
  }
  if (name == "rps") {
    MatrixGameSpec spec;
    spec.name = "rps";
    spec.payoff = {{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}};
    spec.row_labels = spec.col_labels = {"r", "p", "s"};
    return matrix_to_fosg(spec);
  }
  if (name == "rps_water") {
    MatrixGameSpec spec;
    spec.name = "rps_water";
    spec.payoff = {
        {1, 0, -1, 0}, {-1, 1, 0, 0}, {0, -1, 1, 0}, {0, 0, 0, 0}};
    spec.row_labels = spec.col_labels = {"r", "p", "s", "w"};
    return matrix_to_fosg(spec);
  }
  if (name == "matching_pennies_coordinated") {
    return make_matching_pennies_coordinated();
  }
  if (name == "kuhn") {
    PokerSpec spec;
    spec.name = "kuhn";
    spec.rank_names = {"J", "Q", "K"};
    spec.rank_counts = {1, 1, 1};
    spec.ante = 1;
    spec.bet_sizes = {1};
    spec.max_raises = 1;
    spec.rounds = 1;
    return make_poker(spec);
  }
  if (name == "leduc") {
    PokerSpec spec;
    spec.name = "leduc";
    spec.rank_names = {"J", "Q", "K"};
    spec.rank_counts = {2, 2, 2};
    spec.ante = 1;
    spec.bet_sizes = {2, 4};
    spec.max_raises = 2;
    spec.rounds = 2;
    return make_poker(spec);
  }
  if (name == "mini_poker_asym") {
    PokerSpec spec;
    spec.name = "mini_poker_asym";
    spec.rank_names = {"Q", "K", "A"};
    spec.rank_counts = {1, 1, 1};  // unused: the deal set below is explicit
    spec.ante = 1;
    spec.bet_sizes = {1};
    spec.max_raises = 1;
    spec.rounds = 1;
    spec.deals = {{2, 2, 0.25}, {1, 2, 0.25}, {1, 1, 0.25}, {0, 0, 0.25}};
    return make_poker(spec);
  }
  if (name == "glasses") {
    // Two 4-cycles joined by a 3-node path; the evader starts mid-path, the
    // chaser's stones start at the far side of each cycle.
    GraphChaseSpec spec;
    spec.num_nodes = 11;
    spec.edges = {{0, 1}, {1, 2}, {2, 3}, {0, 3},   // left cycle
                  {3, 4}, {4, 5}, {5, 6}, {6, 7},   // bridge path 4-5-6
                  {7, 8}, {8, 9}, {9, 10}, {7, 10}};  // right cycle
    spec.evader_start = 5;
    spec.chaser_start = {1, 9};
    spec.horizon = 3;
    return make_graph_chase(spec);
  }
  throw std::invalid_argument("make_game: unknown game '" + name + "'");
}

}  // namespace fosg
