// Copyright 2026 The ADFAR Authors
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
//

#ifndef ADFAR_RANDOM_H_
#define ADFAR_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace adfar {

// mt19937_64 output is fixed by the standard. The distribution helpers below
// are defined here instead of using <random> distributions, whose outputs
// differ between standard library implementations; golden files depend on
// bit-stable draws.
using Rng = std::mt19937_64;

// Uniform integer in [0, n). n must be positive.
inline std::size_t UniformIndex(Rng& rng, std::size_t n) {
  const std::uint64_t bound = n;
  // 2^64 - threshold is a multiple of bound.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t x = rng();
  while (x < threshold) x = rng();
  return static_cast<std::size_t>(x % bound);
}

// Uniform double in [0, 1) with 53 random bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformReal(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * UniformUnit(rng);
}

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a run seed and two coordinates
// (typically an example index and a stream tag).
inline std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a,
                                std::uint64_t b = 0) {
  return SplitMix64(SplitMix64(SplitMix64(base) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

}  // namespace adfar

#endif  // ADFAR_RANDOM_H_
