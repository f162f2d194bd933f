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
// Exercises the fosg binary end to end (ctest runs with the build directory
// as the working directory) plus the shared CLI pieces and the published
// RNG test vectors.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "fosg/cli.hpp"
#include "fosg/rng.hpp"

namespace fosg {
namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
  CmdResult res;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) res.out.append(buf, n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string last_line(const std::string& out) {
  std::istringstream in(out);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  return last;
}

// Value of `key` in a line record; empty if absent.
std::string field(const std::string& line, const std::string& key) {
  std::istringstream in(line);
  std::string pair;
  while (in >> pair) {
    if (pair.rfind(key + "=", 0) == 0) return pair.substr(key.size() + 1);
  }
  return "";
}

TEST_CASE("rng matches its published test vectors") {
  // The documented counter-based generator, seeds 0 and 42 (see README.md).
  Rng r0(0);
  CHECK(r0.next_u64() == 16294208416658607535ULL);
  CHECK(r0.next_u64() == 7960286522194355700ULL);
  CHECK(r0.next_u64() == 487617019471545679ULL);
  CHECK(r0.next_u64() == 17909611376780542444ULL);
  Rng r42(42);
  CHECK(r42.next_u64() == 13679457532755275413ULL);
  CHECK(r42.next_u64() == 2949826092126892291ULL);
  CHECK(Rng(0).next_double() ==
        doctest::Approx(0.88331080821364261).epsilon(1e-15));
  CHECK(Rng(42).next_double() ==
        doctest::Approx(0.74156487877182331).epsilon(1e-15));
  // Counter-based access replays any position without advancing state.
  CHECK(Rng::at(42, 0) == 13679457532755275413ULL);
  CHECK(Rng::at(42, 1) == 2949826092126892291ULL);
}

TEST_CASE("run configuration round-trips through its textual form") {
  RunConfig cfg;
  cfg.game = "leduc";
  cfg.solver = "mccfr_vr";
  cfg.agent = "continual";
  cfg.strategy = "in.strat";
  cfg.out = "out.strat";
  cfg.techniques = "cfrd,maxmargin";
  cfg.iters = 12345;
  cfg.seed = 99;
  cfg.matches = 7;
  cfg.checkpoints = true;
  cfg.human = false;
  RunConfig back = RunConfig::from_text(cfg.to_text());
  CHECK(back.to_text() == cfg.to_text());
  CHECK(back.game == cfg.game);
  CHECK(back.iters == cfg.iters);
  CHECK(back.seed == cfg.seed);
  CHECK(back.checkpoints == cfg.checkpoints);
  CHECK_THROWS(RunConfig::from_text("bogus_key=1"));
}

TEST_CASE("line records are sorted key=value pairs") {
  CHECK(line_record({{"b", "2"}, {"a", "1"}, {"c", "x"}}) == "a=1 b=2 c=x");
}

TEST_CASE("solve writes a strategy that evaluate scores as near-optimal") {
  CmdResult solve = run_cmd(
      "./fosg solve --game kuhn --solver cfr+ --iters 2000 "
      "--out cli_test_kuhn.strat");
  REQUIRE(solve.exit_code == 0);
  std::string summary = last_line(solve.out);
  CHECK(field(summary, "cmd") == "solve");
  CHECK(std::stod(field(summary, "nashconv")) < 1e-3);

  CmdResult eval = run_cmd(
      "./fosg evaluate --game kuhn --strategy cli_test_kuhn.strat");
  REQUIRE(eval.exit_code == 0);
  std::string line = last_line(eval.out);
  CHECK(field(line, "cmd") == "evaluate");
  CHECK(std::stod(field(line, "nashconv")) < 1e-3);
  CHECK(field(line, "delta1") != "");
  CHECK(field(line, "delta2") != "");
}

TEST_CASE("rm self-play on the rps matrix averages to uniform") {
  CmdResult res = run_cmd(
      "./fosg solve --game \"matrix:0,1,-1;-1,0,1;1,-1,0\" "
      "--solver rm_selfplay --iters 5000");
  REQUIRE(res.exit_code == 0);
  std::string row = field(last_line(res.out), "row");
  std::istringstream probs(row);
  std::string p;
  while (std::getline(probs, p, ',')) {
    CHECK(std::stod(p) == doctest::Approx(1.0 / 3).epsilon(0.05));
  }
}

TEST_CASE("bad inputs exit nonzero") {
  CHECK(run_cmd("./fosg solve --game kuhn --iters 0").exit_code != 0);
  CHECK(run_cmd("./fosg solve --game no_such_game --iters 10").exit_code != 0);
  CHECK(run_cmd("./fosg solve --game kuhn --solver no_such_solver "
                "--iters 10").exit_code != 0);
  CHECK(run_cmd("./fosg evaluate --game kuhn --strategy /no/such/file")
            .exit_code != 0);
}

TEST_CASE("evaluate lists missing infostates") {
  REQUIRE(run_cmd("./fosg solve --game kuhn --iters 100 "
                  "--out cli_test_full.strat").exit_code == 0);
  std::ifstream in("cli_test_full.strat");
  std::string line, truncated;
  int kept = 0;
  while (std::getline(in, line)) {
    if (kept++ >= 3) break;
    truncated += line + "\n";
  }
  std::ofstream("cli_test_partial.strat") << truncated;
  CmdResult res = run_cmd(
      "./fosg evaluate --game kuhn --strategy cli_test_partial.strat");
  CHECK(res.exit_code != 0);
  // Mismatched game: kuhn keys are unknown to rps.
  CmdResult mismatch = run_cmd(
      "./fosg evaluate --game rps --strategy cli_test_full.strat");
  CHECK(mismatch.exit_code != 0);
}

TEST_CASE("randomized commands are reproducible byte for byte") {
  std::string cmd =
      "./fosg match --game kuhn --iters 200 --matches 200 --seed 11";
  CmdResult a = run_cmd(cmd);
  CmdResult b = run_cmd(cmd);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CmdResult c = run_cmd(
      "./fosg match --game kuhn --iters 200 --matches 200 --seed 12");
  CHECK(a.out != c.out);
}

TEST_CASE("scripted human matches replay identically") {
  std::string cmd =
      "printf '0\\n0\\n0\\n' | ./fosg match --game kuhn --human "
      "--iters 100 --seed 5";
  CmdResult a = run_cmd(cmd);
  CmdResult b = run_cmd(cmd);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(field(last_line(a.out), "mode") == "human");
}

TEST_CASE("margins bench emits per-subgame records and medians") {
  CmdResult res = run_cmd(
      "./fosg margins-bench --game kuhn --iters 300 "
      "--techniques cfrd,maxmargin");
  REQUIRE(res.exit_code == 0);
  std::string summary = last_line(res.out);
  CHECK(field(summary, "median_cfrd") != "");
  CHECK(field(summary, "median_maxmargin") != "");
  CHECK(std::stoll(field(summary, "entries")) > 0);
}

TEST_CASE("tabularize writes a strategy evaluate can score") {
  CmdResult tab = run_cmd(
      "./fosg tabularize --game kuhn --agent continual --iters 400 "
      "--out cli_test_tab.strat");
  REQUIRE(tab.exit_code == 0);
  double reported = std::stod(field(last_line(tab.out), "nashconv"));
  CmdResult eval = run_cmd(
      "./fosg evaluate --game kuhn --strategy cli_test_tab.strat");
  REQUIRE(eval.exit_code == 0);
  double scored = std::stod(field(last_line(eval.out), "nashconv"));
  CHECK(scored == doctest::Approx(reported).epsilon(1e-6));
}

}  // namespace
}  // namespace fosg
