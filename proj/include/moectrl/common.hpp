// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace moectrl {

// Error taxonomy. Shape errors are programming/contract bugs, numeric errors
// are bad data (NaN/Inf), usage errors are caller mistakes (empty batch,
// mismatched run ids, invalid config). The CLI maps UsageError -> exit 2 and
// RuntimeFault -> exit 3.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct RuntimeFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic RNG. Wraps a fixed-algorithm 64-bit generator and hand-rolled
// uniform/normal transforms so streams are reproducible bit-for-bit across
// standard libraries (std::normal_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed)) {}

  // xoshiro256** would be fine too; splitmix-seeded mt19937_64 keeps it simple.
  std::uint64_t next_u64() {
    // splitmix64 stream: fully portable, passes BigCrush for our purposes.
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection-free enough for n << 2^64 at our scales.
    return next_u64() % n;
  }

  // Standard normal via Box-Muller with a cached spare.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Derive an independent stream for worker `stream` of a run seeded `seed`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + (stream + 1) * 0xd1b54a32d192ed03ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace moectrl
