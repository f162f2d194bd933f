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
// Command-line surface.  Output is line-record formatted: space-separated
// key=value pairs with keys sorted, one record per line, and every command
// ends with a one-line machine-readable summary record.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fosg/bestresponse.hpp"
#include "fosg/cfr.hpp"
#include "fosg/cli.hpp"
#include "fosg/evalkit.hpp"
#include "fosg/games.hpp"
#include "fosg/mccfr.hpp"
#include "fosg/policy.hpp"
#include "fosg/regret.hpp"
#include "fosg/resolve.hpp"
#include "fosg/rng.hpp"
#include "fosg/subgame.hpp"
#include "fosg/tree.hpp"

namespace fosg {
namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// One output record: sorted key=value pairs on a single line.
void emit(const std::map<std::string, std::string>& kv) {
  std::printf("%s\n", line_record(kv).c_str());
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

// --- strategy files --------------------------------------------------------
// A profile file is both players' policy_to_text output concatenated; the
// per-player key prefixes keep the lines unambiguous.

void save_profile(const TreeIndex& idx, const PolicyProfile& prof,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << policy_to_text(idx, prof.pi[0]) << policy_to_text(idx, prof.pi[1]);
}

PolicyProfile load_profile(const TreeIndex& idx, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::array<std::string, 2> text;
  std::array<std::set<std::string>, 2> seen;
  std::array<std::unordered_map<std::string, int32_t>, 2> keys = {
      idx.key_to_info(0), idx.key_to_info(1)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::string key = line.substr(0, line.find(' '));
    int player = keys[0].count(key) ? 0 : keys[1].count(key) ? 1 : -1;
    if (player < 0) {
      throw std::runtime_error("strategy has unknown infostate key " + key);
    }
    text[player] += line + "\n";
    seen[player].insert(key);
  }
  std::vector<std::string> missing;
  for (int p = 0; p < 2; ++p) {
    for (size_t s = 0; s < idx.infos[p].size(); ++s) {
      if (!idx.is_decision(p, static_cast<int32_t>(s))) continue;
      std::string key = idx.info_key(p, static_cast<int32_t>(s));
      if (!seen[p].count(key)) missing.push_back(key);
    }
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    std::string msg = "strategy missing " + std::to_string(missing.size()) +
                      " infostates:";
    for (size_t i = 0; i < missing.size() && i < 10; ++i) {
      msg += " " + missing[i];
    }
    throw std::runtime_error(msg);
  }
  PolicyProfile prof;
  for (int p = 0; p < 2; ++p) prof.pi[p] = policy_from_text(idx, p, text[p]);
  return prof;
}

// --- solve -----------------------------------------------------------------

MatrixGameSpec parse_matrix(const std::string& game) {
  MatrixGameSpec spec;
  if (game == "rps") {
    spec.payoff = {{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}};
    return spec;
  }
  if (game.rfind("matrix:", 0) != 0) {
    throw std::runtime_error("solver rm_selfplay needs a matrix game "
                             "(\"matrix:...\" or \"rps\"), got " + game);
  }
  for (const std::string& row : split(game.substr(7), ';')) {
    std::vector<double> r;
    for (const std::string& cell : split(row, ',')) r.push_back(std::stod(cell));
    spec.payoff.push_back(r);
  }
  return spec;
}

std::string join_probs(const std::vector<double>& p) {
  std::string out;
  for (double x : p) out += (out.empty() ? "" : ",") + fmt(x);
  return out;
}

int cmd_solve(const RunConfig& cfg) {
  if (cfg.iters <= 0) throw std::runtime_error("--iters must be positive");

  if (cfg.solver == "rm_selfplay") {
    MatrixGameSpec spec = parse_matrix(cfg.game);
    SelfplayResult res = matrix_selfplay(spec, MinimizerKind::kRm, cfg.iters);
    if (cfg.checkpoints) {
      for (const TracePoint& tp : res.trace) {
        emit({{"cmd", "solve"},
              {"iter", std::to_string(tp.iter)},
              {"nashconv", fmt(tp.nashconv)}});
      }
    }
    emit({{"cmd", "solve"},
          {"game", cfg.game},
          {"solver", cfg.solver},
          {"iters", std::to_string(cfg.iters)},
          {"row", join_probs(res.avg[0])},
          {"col", join_probs(res.avg[1])},
          {"nashconv", fmt(matrix_nashconv(spec, res.avg[0], res.avg[1]))}});
    return 0;
  }

  TreeIndex idx = enumerate(make_game(cfg.game));
  PolicyProfile prof;
  if (cfg.solver == "cfr" || cfg.solver == "cfr+") {
    CfrConfig cc = cfg.solver == "cfr+" ? cfr_plus_config() : CfrConfig{};
    CfrSolver solver(idx, cc);
    solver.run(cfg.iters, cfg.checkpoints);
    if (cfg.checkpoints) {
      for (const auto& pt : solver.diagnostics().points) {
        emit({{"cmd", "solve"},
              {"iter", std::to_string(pt.iter)},
              {"nashconv", fmt(pt.nashconv)}});
      }
    }
    prof = solver.average();
  } else if (cfg.solver == "mccfr_os" || cfg.solver == "mccfr_vr") {
    MccfrVariant variant = cfg.solver == "mccfr_os" ? MccfrVariant::kOs
                                                    : MccfrVariant::kVr;
    SampleScheme scheme;
    scheme.seed = cfg.seed;
    auto [avg, diag] = run_mccfr(idx, variant, scheme, cfg.iters);
    if (cfg.checkpoints) {
      for (const auto& pt : diag.points) {
        emit({{"cmd", "solve"},
              {"iter", std::to_string(pt.iter)},
              {"node_touches", std::to_string(pt.node_touches)},
              {"nashconv", fmt(pt.nashconv)}});
      }
    }
    prof = avg;
  } else {
    throw std::runtime_error("unknown solver " + cfg.solver);
  }

  if (!cfg.out.empty()) save_profile(idx, prof, cfg.out);
  emit({{"cmd", "solve"},
        {"game", cfg.game},
        {"solver", cfg.solver},
        {"iters", std::to_string(cfg.iters)},
        {"seed", std::to_string(cfg.seed)},
        {"out", cfg.out},
        {"nashconv", fmt(nashconv(idx, prof).nashconv)}});
  return 0;
}

// --- evaluate --------------------------------------------------------------

int cmd_evaluate(const RunConfig& cfg) {
  TreeIndex idx = enumerate(make_game(cfg.game));
  PolicyProfile prof = load_profile(idx, cfg.strategy);
  NashConvResult res = nashconv(idx, prof, cached_game_value(idx));
  emit({{"cmd", "evaluate"},
        {"game", cfg.game},
        {"strategy", cfg.strategy},
        {"delta1", fmt(res.delta[0])},
        {"delta2", fmt(res.delta[1])},
        {"nashconv", fmt(res.nashconv)},
        {"exploitability", fmt(res.exploitability)}});
  return 0;
}

// --- match -----------------------------------------------------------------

PolicyProfile solve_for_match(const TreeIndex& idx, int64_t iters) {
  CfrSolver solver(idx, cfr_plus_config());
  solver.run(iters);
  return solver.average();
}

int human_match(const TreeIndex& idx, const PolicyProfile& prof,
                uint64_t seed) {
  Rng rng(seed);
  std::vector<int32_t> next;
  std::vector<double> prob;
  int32_t h = 0;
  while (idx.hists[h].actor != -2) {
    int decider = idx.hists[h].actor;
    Token tok = kNoop;
    if (decider >= 0) {
      int32_t s = idx.hists[h].info[decider];
      const auto& actions = idx.infos[decider][s].actions;
      int64_t off = idx.act_offset[decider][s];
      if (decider == 0) {
        std::printf("public %s\n", idx.pub_key(idx.hists[h].pub).c_str());
        std::printf("you    %s\n", idx.info_key(0, s).c_str());
        for (size_t a = 0; a < actions.size(); ++a) {
          std::printf("  %zu: %s\n", a,
                      idx.game->strings().name(actions[a]).c_str());
        }
        std::printf("choose> ");
        std::fflush(stdout);
        long choice = -1;
        if (!(std::cin >> choice) || choice < 0 ||
            choice >= static_cast<long>(actions.size())) {
          throw std::runtime_error("invalid or missing action choice");
        }
        tok = actions[choice];
      } else {
        std::vector<double> row(prof.pi[1].probs.begin() + off,
                                prof.pi[1].probs.begin() + off +
                                    actions.size());
        tok = actions[rng.sample(row)];
        std::printf("opponent acts\n");
      }
    }
    next.clear();
    prob.clear();
    for (int32_t c : idx.hists[h].children) {
      if (decider >= 0 && idx.hists[c].joint[decider] != tok) continue;
      next.push_back(c);
      prob.push_back(idx.hists[c].step_prob);
    }
    h = next.size() == 1 ? next[0] : next[rng.sample(prob)];
    std::printf("state  %s\n", idx.pub_key(idx.hists[h].pub).c_str());
  }
  emit({{"cmd", "match"},
        {"mode", "human"},
        {"payoff1", fmt(idx.hists[h].ret[0])},
        {"payoff2", fmt(idx.hists[h].ret[1])},
        {"terminal", idx.pub_key(idx.hists[h].pub)}});
  return 0;
}

int cmd_match(const RunConfig& cfg) {
  TreeIndex idx = enumerate(make_game(cfg.game));
  PolicyProfile prof = cfg.strategy.empty()
                           ? solve_for_match(idx, cfg.iters)
                           : load_profile(idx, cfg.strategy);
  if (cfg.human) return human_match(idx, prof, cfg.seed);

  std::vector<MatchRecord> recs =
      simulate_matches(idx, prof, 0, cfg.matches, cfg.seed);
  HistoryValues base = exact_history_values(idx, prof);
  const Estimator kAll[] = {Estimator::kMc, Estimator::kImaginary,
                            Estimator::kMivat, Estimator::kMivatImaginary,
                            Estimator::kAivat};
  double mc_mean = 0;
  for (Estimator method : kAll) {
    EstimatorReport rep = estimate(idx, recs, method, &base);
    if (method == Estimator::kMc) mc_mean = rep.mean;
    emit({{"cmd", "match"},
          {"estimator", rep.name},
          {"mean", fmt(rep.mean)},
          {"sd", fmt(rep.sd)},
          {"n", std::to_string(rep.count)}});
  }
  emit({{"cmd", "match"},
        {"game", cfg.game},
        {"matches", std::to_string(cfg.matches)},
        {"seed", std::to_string(cfg.seed)},
        {"mean", fmt(mc_mean)}});
  return 0;
}

// --- resolve-play ----------------------------------------------------------

int cmd_resolve_play(const RunConfig& cfg) {
  TreeIndex idx = enumerate(make_game(cfg.game));
  ResolveConfig rc;
  rc.iters = cfg.iters;
  rc.seed = cfg.seed;
  std::array<std::unique_ptr<ResolvingAgent>, 2> agents;
  for (int p = 0; p < 2; ++p) {
    rc.seed = cfg.seed + p;
    agents[p] = std::make_unique<ResolvingAgent>(idx, p, rc);
  }
  Rng rng(cfg.seed);
  std::array<double, 2> total = {0, 0};
  std::vector<int32_t> next;
  std::vector<double> prob;
  for (int64_t m = 0; m < cfg.matches; ++m) {
    agents[0]->new_game();
    agents[1]->new_game();
    int32_t h = 0;
    while (idx.hists[h].actor != -2) {
      int decider = idx.hists[h].actor;
      Token tok = kNoop;
      if (decider >= 0) {
        tok = agents[decider]->act(idx.hists[h].info[decider]).action;
      }
      next.clear();
      prob.clear();
      for (int32_t c : idx.hists[h].children) {
        if (decider >= 0 && idx.hists[c].joint[decider] != tok) continue;
        next.push_back(c);
        prob.push_back(idx.hists[c].step_prob);
      }
      h = next.size() == 1 ? next[0] : next[rng.sample(prob)];
    }
    total[0] += idx.hists[h].ret[0];
    total[1] += idx.hists[h].ret[1];
    emit({{"cmd", "resolve-play"},
          {"match", std::to_string(m)},
          {"payoff1", fmt(idx.hists[h].ret[0])},
          {"payoff2", fmt(idx.hists[h].ret[1])}});
  }
  emit({{"cmd", "resolve-play"},
        {"game", cfg.game},
        {"matches", std::to_string(cfg.matches)},
        {"mean1", fmt(total[0] / cfg.matches)},
        {"mean2", fmt(total[1] / cfg.matches)},
        {"solves", std::to_string(agents[0]->solves() + agents[1]->solves())},
        {"range_fallbacks",
         std::to_string(agents[0]->range_fallbacks() +
                        agents[1]->range_fallbacks())}});
  return 0;
}

// --- tabularize ------------------------------------------------------------

int cmd_tabularize(const RunConfig& cfg) {
  if (cfg.agent != "continual") {
    throw std::runtime_error("unknown agent " + cfg.agent);
  }
  TreeIndex idx = enumerate(make_game(cfg.game));
  ResolveConfig rc;
  rc.iters = cfg.iters;
  PolicyProfile prof;
  for (int p = 0; p < 2; ++p) {
    rc.seed = cfg.seed + p;
    ResolvingAgent agent(idx, p, rc);
    prof.pi[p] = tabularize(idx, agent);
  }
  if (!cfg.out.empty()) save_profile(idx, prof, cfg.out);
  emit({{"cmd", "tabularize"},
        {"agent", cfg.agent},
        {"game", cfg.game},
        {"iters", std::to_string(cfg.iters)},
        {"out", cfg.out},
        {"nashconv", fmt(nashconv(idx, prof).nashconv)}});
  return 0;
}

// --- variance-bench --------------------------------------------------------

int cmd_variance_bench(const RunConfig& cfg) {
  TreeIndex idx = enumerate(make_game(cfg.game));
  PolicyProfile prof = solve_for_match(idx, cfg.iters);
  std::vector<MatchRecord> recs =
      simulate_matches(idx, prof, 0, cfg.matches, cfg.seed);
  HistoryValues base = exact_history_values(idx, prof);
  const Estimator kAll[] = {Estimator::kMc, Estimator::kImaginary,
                            Estimator::kMivat, Estimator::kMivatImaginary,
                            Estimator::kAivat};
  double sd_mc = 0, sd_aivat = 0;
  for (Estimator method : kAll) {
    EstimatorReport rep = estimate(idx, recs, method, &base);
    if (method == Estimator::kMc) sd_mc = rep.sd;
    if (method == Estimator::kAivat) sd_aivat = rep.sd;
    emit({{"cmd", "variance-bench"},
          {"estimator", rep.name},
          {"mean", fmt(rep.mean)},
          {"sd", fmt(rep.sd)},
          {"n", std::to_string(rep.count)}});
  }
  emit({{"cmd", "variance-bench"},
        {"game", cfg.game},
        {"matches", std::to_string(cfg.matches)},
        {"sd_mc", fmt(sd_mc)},
        {"sd_aivat", fmt(sd_aivat)},
        {"ratio", fmt(sd_mc > 0 ? sd_aivat / sd_mc : 0)}});
  return 0;
}

// --- margins-bench ---------------------------------------------------------

// Bench sub-games: every non-terminal public state strictly after a public
// chance reveal (the last betting street); if the game has no public
// reveals, every non-terminal public state below the initial deal.
std::vector<int32_t> bench_pubs(const TreeIndex& idx) {
  std::vector<char> after(idx.pubs.size(), 0);
  bool any_reveal = false;
  for (size_t q = 0; q < idx.pubs.size(); ++q) {
    if (idx.pubs[q].chance_event && idx.pubs[q].depth >= 2) any_reveal = true;
  }
  std::vector<int32_t> out;
  for (size_t q = 0; q < idx.pubs.size(); ++q) {
    const auto& pub = idx.pubs[q];
    int32_t par = pub.parent;
    bool reveal = pub.chance_event && pub.depth >= 2;
    after[q] = par >= 0 && (after[par] || reveal);
    bool in_bench = any_reveal ? after[q] : pub.depth >= 2;
    if (in_bench && !pub.terminal) out.push_back(static_cast<int32_t>(q));
  }
  return out;
}

// Halfway-to-uniform blend: a deliberately weakened trunk whose sub-games
// the refinement techniques can improve on.
PolicyProfile weaken(const TreeIndex& idx, PolicyProfile prof) {
  for (int p = 0; p < 2; ++p) {
    for (size_t s = 0; s < idx.infos[p].size(); ++s) {
      if (!idx.is_decision(p, static_cast<int32_t>(s))) continue;
      int64_t off = idx.act_offset[p][s];
      size_t n = idx.infos[p][s].actions.size();
      for (size_t a = 0; a < n; ++a) {
        prof.pi[p].probs[off + a] =
            0.5 * prof.pi[p].probs[off + a] + 0.5 / n;
      }
    }
  }
  return prof;
}

int cmd_margins_bench(const RunConfig& cfg) {
  TreeIndex idx = enumerate(make_game(cfg.game));
  std::vector<std::string> techniques = split(cfg.techniques, ',');
  PolicyProfile trunk = weaken(idx, solve_for_match(idx, cfg.iters));
  std::map<std::string, std::vector<double>> margins;
  int64_t entries = 0, skipped = 0;
  for (int32_t pub : bench_pubs(idx)) {
    for (int own = 0; own < 2; ++own) {
      std::map<std::string, std::string> kv = {
          {"cmd", "margins-bench"},
          {"pub", idx.pub_key(pub)},
          {"own", std::to_string(own + 1)}};
      try {
        for (const std::string& tech : techniques) {
          BehaviorPolicy refined =
              refine_subgame(idx, pub, own, trunk, tech, cfg.iters);
          double margin =
              subgame_margin(idx, pub, own, trunk.pi[own], refined);
          margins[tech].push_back(margin);
          kv["margin_" + tech] = fmt(margin);
        }
      } catch (const std::exception& e) {
        // Zero-mass sub-games under the trunk cannot be dealt; skip them.
        ++skipped;
        continue;
      }
      ++entries;
      emit(kv);
    }
  }
  std::map<std::string, std::string> summary = {
      {"cmd", "margins-bench"},
      {"game", cfg.game},
      {"entries", std::to_string(entries)},
      {"skipped", std::to_string(skipped)}};
  for (auto& [tech, values] : margins) {
    std::sort(values.begin(), values.end());
    double median = values.empty()
                        ? 0
                        : values[values.size() / 2];
    summary["median_" + tech] = fmt(median);
  }
  emit(summary);
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"imperfect-information game solving toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--game", cfg.game, "game name");
    sub->add_option("--iters", cfg.iters, "iteration budget");
    sub->add_option("--seed", cfg.seed, "rng seed");
    sub->add_option("--out", cfg.out, "output file");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve a game offline");
  add_common(solve);
  solve->add_option("--solver", cfg.solver,
                    "cfr | cfr+ | mccfr_os | mccfr_vr | rm_selfplay");
  solve->add_flag("--checkpoints", cfg.checkpoints, "emit progress records");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a strategy file");
  add_common(evaluate);
  evaluate->add_option("--strategy", cfg.strategy, "strategy file")
      ->required();

  CLI::App* match = app.add_subcommand("match", "simulate or play matches");
  add_common(match);
  match->add_option("--matches", cfg.matches, "number of matches");
  match->add_option("--strategy", cfg.strategy, "strategy file to play");
  match->add_flag("--human", cfg.human, "interactive play as player 1");

  CLI::App* resolve_play =
      app.add_subcommand("resolve-play", "continual re-solving self-play");
  add_common(resolve_play);
  resolve_play->add_option("--matches", cfg.matches, "number of matches");

  CLI::App* tabularize =
      app.add_subcommand("tabularize", "expand an online agent to a file");
  add_common(tabularize);
  tabularize->add_option("--agent", cfg.agent, "continual");

  CLI::App* variance =
      app.add_subcommand("variance-bench", "estimator variance benchmark");
  add_common(variance);
  variance->add_option("--matches", cfg.matches, "number of matches");

  CLI::App* margins =
      app.add_subcommand("margins-bench", "sub-game refinement margins");
  add_common(margins);
  margins->add_option("--techniques", cfg.techniques,
                      "comma list: unsafe,cfrd,maxmargin");

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) return cmd_solve(cfg);
    if (evaluate->parsed()) return cmd_evaluate(cfg);
    if (match->parsed()) return cmd_match(cfg);
    if (resolve_play->parsed()) return cmd_resolve_play(cfg);
    if (tabularize->parsed()) return cmd_tabularize(cfg);
    if (variance->parsed()) return cmd_variance_bench(cfg);
    if (margins->parsed()) return cmd_margins_bench(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace fosg

int main(int argc, char** argv) { return fosg::run(argc, argv); }
