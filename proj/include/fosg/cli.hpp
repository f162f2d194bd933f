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
// Shared pieces of the command-line surface: the run configuration with its
// lossless textual form, and the sorted key=value line-record format.

#ifndef FOSG_CLI_H_
#define FOSG_CLI_H_

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fosg {

// One line: space-separated key=value pairs, keys sorted.
inline std::string line_record(const std::map<std::string, std::string>& kv) {
  std::string line;
  for (const auto& [k, v] : kv) {
    line += (line.empty() ? "" : " ") + k + "=" + v;
  }
  return line;
}

// Every flag of every subcommand, with a lossless textual form.
struct RunConfig {
  std::string game = "kuhn";
  std::string solver = "cfr+";
  std::string agent = "continual";
  std::string strategy;  // input strategy file
  std::string out;       // output file
  std::string techniques = "unsafe,cfrd,maxmargin";
  int64_t iters = 1000;
  uint64_t seed = 0;
  int64_t matches = 1000;
  bool checkpoints = false;
  bool human = false;

  std::string to_text() const {
    return line_record({{"agent", agent},
                        {"checkpoints", checkpoints ? "1" : "0"},
                        {"game", game},
                        {"human", human ? "1" : "0"},
                        {"iters", std::to_string(iters)},
                        {"matches", std::to_string(matches)},
                        {"out", out},
                        {"seed", std::to_string(seed)},
                        {"solver", solver},
                        {"strategy", strategy},
                        {"techniques", techniques}});
  }

  static RunConfig from_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string pair;
    while (in >> pair) {
      size_t eq = pair.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("RunConfig: bad field " + pair);
      }
      std::string k = pair.substr(0, eq), v = pair.substr(eq + 1);
      if (k == "agent") cfg.agent = v;
      else if (k == "checkpoints") cfg.checkpoints = v == "1";
      else if (k == "game") cfg.game = v;
      else if (k == "human") cfg.human = v == "1";
      else if (k == "iters") cfg.iters = std::stoll(v);
      else if (k == "matches") cfg.matches = std::stoll(v);
      else if (k == "out") cfg.out = v;
      else if (k == "seed") cfg.seed = std::stoull(v);
      else if (k == "solver") cfg.solver = v;
      else if (k == "strategy") cfg.strategy = v;
      else if (k == "techniques") cfg.techniques = v;
      else throw std::runtime_error("RunConfig: unknown key " + k);
    }
    return cfg;
  }
};

}  // namespace fosg

#endif  // FOSG_CLI_H_
