//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace motifdiff {

inline std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for an independent stream; parallel units use their index.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL * (stream + 1));
  return splitmix64(s);
}

// mt19937_64 with a fixed uniform conversion, so draws are identical across
// standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed): engine_(seed) { }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Index drawn from unnormalized non-negative weights; the last positive
  // weight absorbs rounding.
  int categorical(std::span<const double> weights) {
    double total = 0;
    for (double w: weights)
      total += w;
    double u = uniform() * total;
    int last = -1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0)
        continue;
      last = static_cast<int>(i);
      if (u < weights[i])
        return last;
      u -= weights[i];
    }
    return last;
  }

  Rng split(std::uint64_t stream) { return Rng(stream_seed(next(), stream)); }

private:
  std::mt19937_64 engine_;
};

}  // namespace motifdiff
