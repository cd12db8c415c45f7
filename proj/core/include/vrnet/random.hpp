#pragma once

// Seeded random streams. Every sampler is built on the raw 64-bit output of
// std::mt19937_64 so sequences are identical across standard libraries.

#include <cstdint>
#include <random>
#include <string_view>

namespace vrnet {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over the bytes of `text`. Stable across platforms and releases.
std::uint64_t fnv1a64(std::string_view text);

/// Combine a parent seed with a child key into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view key);

/// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Uniform on [lo, hi).
double uniform(Rng& rng, double lo, double hi);

/// Unit-mean exponential variate, strictly positive.
double exponential1(Rng& rng);

/// Uniform integer in [0, n). n must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

bool bernoulli(Rng& rng, double p);

}  // namespace vrnet
