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

#include "fosg/regret.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fosg {
namespace {

void check_zero_sum(const MatrixGameSpec& a) {
  if (!a.payoff2.empty()) {
    throw std::invalid_argument("matrix dynamics: zero-sum matrix required");
  }
  if (a.payoff.empty() || a.payoff[0].empty()) {
    throw std::invalid_argument("matrix dynamics: empty matrix");
  }
}

int argmax(const std::vector<double>& x) {
  return static_cast<int>(std::max_element(x.begin(), x.end()) - x.begin());
}

std::vector<double> pure(int n, int a) {
  std::vector<double> p(n, 0.0);
  p[a] = 1.0;
  return p;
}

void accumulate(std::vector<double>& acc, const std::vector<double>& x) {
  for (size_t i = 0; i < x.size(); ++i) acc[i] += x[i];
}

std::vector<double> scaled(std::vector<double> x, double f) {
  for (double& v : x) v *= f;
  return x;
}

bool is_checkpoint(int64_t t, int64_t steps) {
  return (t & (t - 1)) == 0 || t == steps;  // powers of two and the end
}

}  // namespace

RegretState make_regret_state(MinimizerKind kind, int num_actions,
                              double beta) {
  RegretState s;
  s.kind = kind;
  s.beta = beta;
  s.regret.assign(num_actions, 0.0);
  return s;
}

double hedge_beta(int num_actions, int64_t horizon) {
  return std::sqrt(2.0 * std::log(static_cast<double>(num_actions)) /
                   static_cast<double>(horizon));
}

std::vector<double> next_policy(const RegretState& state) {
  size_t n = state.regret.size();
  std::vector<double> p(n, 0.0);
  switch (state.kind) {
    case MinimizerKind::kGreedy: {
      p[argmax(state.regret)] = 1.0;
      return p;
    }
    case MinimizerKind::kRm:
    case MinimizerKind::kRmPlus: {
      double sum = 0;
      for (size_t a = 0; a < n; ++a) sum += std::max(0.0, state.regret[a]);
      if (sum <= 0) return std::vector<double>(n, 1.0 / n);
      for (size_t a = 0; a < n; ++a) {
        p[a] = std::max(0.0, state.regret[a]) / sum;
      }
      return p;
    }
    case MinimizerKind::kHedge: {
      double mx = *std::max_element(state.regret.begin(), state.regret.end());
      double sum = 0;
      for (size_t a = 0; a < n; ++a) {
        p[a] = std::exp(state.beta * (state.regret[a] - mx));
        sum += p[a];
      }
      for (double& x : p) x /= sum;
      return p;
    }
  }
  throw std::logic_error("next_policy: unknown minimizer");
}

void observe(RegretState& state, const std::vector<double>& reward,
             const std::vector<double>& played) {
  if (reward.size() != state.regret.size() ||
      played.size() != state.regret.size()) {
    throw std::invalid_argument("observe: length mismatch");
  }
  double value = 0;
  for (size_t a = 0; a < reward.size(); ++a) value += played[a] * reward[a];
  for (size_t a = 0; a < reward.size(); ++a) {
    state.regret[a] += reward[a] - value;
    if (state.kind == MinimizerKind::kRmPlus) {
      state.regret[a] = std::max(0.0, state.regret[a]);
    }
  }
  ++state.t;
}

double max_regret(const RegretState& state) {
  return std::max(0.0, *std::max_element(state.regret.begin(),
                                         state.regret.end()));
}

std::vector<double> row_rewards(const MatrixGameSpec& a,
                                const std::vector<double>& y) {
  std::vector<double> u(a.payoff.size(), 0.0);
  for (size_t i = 0; i < a.payoff.size(); ++i) {
    for (size_t j = 0; j < y.size(); ++j) u[i] += a.payoff[i][j] * y[j];
  }
  return u;
}

std::vector<double> col_rewards(const MatrixGameSpec& a,
                                const std::vector<double>& x) {
  std::vector<double> u(a.payoff[0].size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = 0; j < u.size(); ++j) u[j] -= x[i] * a.payoff[i][j];
  }
  return u;
}

double matrix_value(const MatrixGameSpec& a, const std::vector<double>& x,
                    const std::vector<double>& y) {
  std::vector<double> ay = row_rewards(a, y);
  double v = 0;
  for (size_t i = 0; i < x.size(); ++i) v += x[i] * ay[i];
  return v;
}

double matrix_nashconv(const MatrixGameSpec& a, const std::vector<double>& x,
                       const std::vector<double>& y) {
  std::vector<double> u1 = row_rewards(a, y);
  std::vector<double> u2 = col_rewards(a, x);
  return *std::max_element(u1.begin(), u1.end()) +
         *std::max_element(u2.begin(), u2.end());
}

SelfplayResult matrix_selfplay(const MatrixGameSpec& a, MinimizerKind kind,
                               int64_t steps, UpdateMode mode) {
  check_zero_sum(a);
  int m = static_cast<int>(a.payoff.size());
  int n = static_cast<int>(a.payoff[0].size());
  SelfplayResult out;
  double beta_m = hedge_beta(m, steps), beta_n = hedge_beta(n, steps);
  out.state = {make_regret_state(kind, m, beta_m),
               make_regret_state(kind, n, beta_n)};
  out.avg = {std::vector<double>(m, 0.0), std::vector<double>(n, 0.0)};

  for (int64_t t = 1; t <= steps; ++t) {
    std::vector<double> pi1 = next_policy(out.state[0]);
    std::vector<double> pi2 = next_policy(out.state[1]);
    if (mode == UpdateMode::kSimultaneous) {
      observe(out.state[0], row_rewards(a, pi2), pi1);
      observe(out.state[1], col_rewards(a, pi1), pi2);
    } else {
      observe(out.state[0], row_rewards(a, pi2), pi1);
      pi1 = next_policy(out.state[0]);
      observe(out.state[1], col_rewards(a, pi1), pi2);
    }
    accumulate(out.avg[0], pi1);
    accumulate(out.avg[1], pi2);
    if (is_checkpoint(t, steps)) {
      TracePoint tp;
      tp.iter = t;
      tp.nashconv =
          matrix_nashconv(a, scaled(out.avg[0], 1.0 / static_cast<double>(t)),
                          scaled(out.avg[1], 1.0 / static_cast<double>(t)));
      tp.r1 = max_regret(out.state[0]);
      tp.r2 = max_regret(out.state[1]);
      out.trace.push_back(tp);
    }
  }
  out.avg[0] = scaled(out.avg[0], 1.0 / static_cast<double>(steps));
  out.avg[1] = scaled(out.avg[1], 1.0 / static_cast<double>(steps));
  return out;
}

BrSequenceResult best_respond_sequence(const MatrixGameSpec& a, int64_t steps,
                                       const MatrixTieBreak* tie_break) {
  check_zero_sum(a);
  int m = static_cast<int>(a.payoff.size());
  int n = static_cast<int>(a.payoff[0].size());
  BrSequenceResult out;
  out.avg = {std::vector<double>(m, 0.0), std::vector<double>(n, 0.0)};
  std::array<int, 2> cur = {0, 0};
  auto pick = [&](int player, const std::vector<double>& rewards) {
    if (tie_break) return (*tie_break)(player, rewards);
    return argmax(rewards);
  };
  for (int64_t t = 0; t < steps; ++t) {
    std::array<int, 2> next;
    next[0] = pick(0, row_rewards(a, pure(n, cur[1])));
    next[1] = pick(1, col_rewards(a, pure(m, cur[0])));
    cur = next;
    out.actions.push_back(cur);
    out.avg[0][cur[0]] += 1.0;
    out.avg[1][cur[1]] += 1.0;
  }
  for (int p = 0; p < 2; ++p) {
    out.avg[p] = scaled(out.avg[p], 1.0 / static_cast<double>(steps));
  }
  // Current policies converge if the tail is constant; averages converge if
  // the half-run and full-run averages agree in infinity norm.
  int64_t window = std::min<int64_t>(10, steps);
  out.current_converged = true;
  for (int64_t t = steps - window; t < steps; ++t) {
    if (out.actions[t] != out.actions[steps - 1]) out.current_converged = false;
  }
  std::array<std::vector<double>, 2> half = {std::vector<double>(m, 0.0),
                                             std::vector<double>(n, 0.0)};
  for (int64_t t = 0; t < steps / 2; ++t) {
    half[0][out.actions[t][0]] += 2.0 / static_cast<double>(steps);
    half[1][out.actions[t][1]] += 2.0 / static_cast<double>(steps);
  }
  double diff = 0;
  for (int p = 0; p < 2; ++p) {
    for (size_t i = 0; i < out.avg[p].size(); ++i) {
      diff = std::max(diff, std::abs(out.avg[p][i] - half[p][i]));
    }
  }
  out.average_converged = diff < 1e-2;
  return out;
}

FictitiousPlayResult fictitious_play(const MatrixGameSpec& a, int64_t steps) {
  check_zero_sum(a);
  int m = static_cast<int>(a.payoff.size());
  int n = static_cast<int>(a.payoff[0].size());
  FictitiousPlayResult out;
  out.avg = {std::vector<double>(m, 0.0), std::vector<double>(n, 0.0)};
  std::array<int, 2> cur = {0, 0};
  for (int64_t t = 1; t <= steps; ++t) {
    out.avg[0][cur[0]] += 1.0;
    out.avg[1][cur[1]] += 1.0;
    std::vector<double> a1 = scaled(out.avg[0], 1.0 / static_cast<double>(t));
    std::vector<double> a2 = scaled(out.avg[1], 1.0 / static_cast<double>(t));
    cur[0] = argmax(row_rewards(a, a2));
    cur[1] = argmax(col_rewards(a, a1));
    if (is_checkpoint(t, steps)) {
      TracePoint tp;
      tp.iter = t;
      tp.nashconv = matrix_nashconv(a, a1, a2);
      out.trace.push_back(tp);
    }
  }
  for (int p = 0; p < 2; ++p) {
    out.avg[p] = scaled(out.avg[p], 1.0 / static_cast<double>(steps));
  }
  return out;
}

DoubleOracleResult double_oracle(const MatrixGameSpec& a, int64_t inner_steps,
                                 std::array<std::vector<int>, 2> start) {
  check_zero_sum(a);
  int m = static_cast<int>(a.payoff.size());
  int n = static_cast<int>(a.payoff[0].size());
  DoubleOracleResult out;
  out.actions = std::move(start);
  const double tol = 1e-3;

  while (true) {
    ++out.rounds;
    // Solve the restricted game.
    MatrixGameSpec sub;
    sub.name = "restricted";
    for (int i : out.actions[0]) {
      std::vector<double> row;
      for (int j : out.actions[1]) row.push_back(a.payoff[i][j]);
      sub.payoff.push_back(std::move(row));
    }
    SelfplayResult inner = matrix_selfplay(sub, MinimizerKind::kRmPlus,
                                           inner_steps,
                                           UpdateMode::kAlternating);
    // Embed into the full action space.
    out.profile = {std::vector<double>(m, 0.0), std::vector<double>(n, 0.0)};
    for (size_t k = 0; k < out.actions[0].size(); ++k) {
      out.profile[0][out.actions[0][k]] = inner.avg[0][k];
    }
    for (size_t k = 0; k < out.actions[1].size(); ++k) {
      out.profile[1][out.actions[1][k]] = inner.avg[1][k];
    }
    double value = matrix_value(a, out.profile[0], out.profile[1]);

    // Expand with full-game best responses that strictly improve.
    bool grew = false;
    std::vector<double> u1 = row_rewards(a, out.profile[1]);
    int br1 = argmax(u1);
    if (u1[br1] > value + tol &&
        !std::count(out.actions[0].begin(), out.actions[0].end(), br1)) {
      out.actions[0].push_back(br1);
      grew = true;
    }
    std::vector<double> u2 = col_rewards(a, out.profile[0]);
    int br2 = argmax(u2);
    if (u2[br2] > -value + tol &&
        !std::count(out.actions[1].begin(), out.actions[1].end(), br2)) {
      out.actions[1].push_back(br2);
      grew = true;
    }
    if (!grew) break;
  }
  out.residual = matrix_nashconv(a, out.profile[0], out.profile[1]);
  return out;
}

}  // namespace fosg
