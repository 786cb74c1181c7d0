// Copyright 2026 The Infoseek Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INFOSEEK_RANDOM_HPP_
#define INFOSEEK_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace infoseek {

using Rng = std::mt19937_64;

// Mixes a master seed with stream coordinates (update index, episode
// index, ...) so that parallel workers draw from independent streams.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> coords) {
  // splitmix64 finalizer applied per coordinate.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master);
  for (std::uint64_t c : coords) h = mix(h ^ mix(c + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t master,
                    std::initializer_list<std::uint64_t> coords = {}) {
  return Rng(derive_seed(master, coords));
}

// Uniform double in [0, 1) from the top 53 bits; identical on every
// standard library, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace infoseek

#endif  // INFOSEEK_RANDOM_HPP_
