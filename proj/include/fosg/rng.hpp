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

#ifndef FOSG_RNG_H_
#define FOSG_RNG_H_

#include <cstdint>
#include <vector>

namespace fosg {

// Counter-based 64-bit generator: output n is the SplitMix64 finalizer
// applied to seed + n * golden_gamma.  Stateless apart from the counter, so
// streams can be split, replayed and compared across runs.  Test vectors for
// seed 0 and seed 42 live in tests/test_cli.cpp and README.md.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : seed_(seed), counter_(0) {}

  static uint64_t at(uint64_t seed, uint64_t counter) {
    uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t next_u64() { return at(seed_, counter_++); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Index sampled from an unnormalized non-negative weight vector.
  int sample(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double u = next_double() * total;
    double acc = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  uint64_t seed() const { return seed_; }
  uint64_t counter() const { return counter_; }
  void set_counter(uint64_t c) { counter_ = c; }

  // Derives an independent stream (e.g. one per match) from this seed.
  Rng split(uint64_t stream) const { return Rng(at(seed_, ~stream)); }

 private:
  uint64_t seed_;
  uint64_t counter_;
};

}  // namespace fosg

#endif  // FOSG_RNG_H_
