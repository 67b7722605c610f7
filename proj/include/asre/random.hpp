// Copyright 2026 The ASRE Authors.
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

#ifndef ASRE_RANDOM_HPP_
#define ASRE_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace asre {

// One splitmix64 step. Used to expand a user seed into engine state and to
// derive independent substreams, so that nearby integer seeds (0, 1, 2, ...)
// still produce uncorrelated streams.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random source. All stochastic code in the library draws from
// an Rng passed in by the caller; nothing reads the wall clock or a global
// generator, so a fixed seed reproduces a run bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    engine_.seed(splitmix64(x));
  }

  // Independent stream keyed by (seed, stream). Deriving does not advance
  // this generator, so evaluation draws cannot perturb a training stream.
  Rng derive(std::uint64_t stream) const {
    std::uint64_t x = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return Rng(splitmix64(x));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    return static_cast<int>(uniform01() * n);
  }

  // Samples an index from an unnormalized-tolerant nonnegative weight vector.
  // Walks the cumulative sum once; a draw past the accumulated mass (possible
  // when the weights sum slightly below 1) falls back to the last positive
  // entry so the result is always a valid, supported index.
  int sample_discrete(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("sample_discrete: empty distribution");
    double total = 0.0;
    for (double p : probs) total += p;
    if (!(total > 0.0)) throw std::invalid_argument("sample_discrete: total mass is not positive");
    double u = uniform01() * total;
    double cum = 0.0;
    int last_positive = -1;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      if (probs[i] > 0.0) last_positive = i;
      cum += probs[i];
      if (u < cum) return probs[i] > 0.0 ? i : last_positive;
    }
    return last_positive;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace asre

#endif  // ASRE_RANDOM_HPP_
