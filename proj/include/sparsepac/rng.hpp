#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

namespace sparsepac {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for stream `stream` of a run seeded with `seed`. Distinct streams give
// statistically independent engines, so work units (chains, grid nodes, data
// points) can be scheduled in any order without changing results.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Deterministic random source. The variate transforms are written out here
// instead of using <random> distributions so that draws are identical across
// standard library implementations.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform on {0, ..., n-1}; n must be positive.
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform01() < p; }

  // Text snapshot of the engine state, restorable with restore().
  std::string state() const;
  void restore(const std::string& snapshot);

 private:
  engine_type engine_;
};

}  // namespace sparsepac
