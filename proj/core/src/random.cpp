#include "vrnet/random.hpp"

#include <cmath>
#include <stdexcept>

namespace vrnet {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) {
    return mix64(mix64(parent) ^ (key * 0xD6E8FEB86659FD93ULL + 0x632BE59BD9B4E019ULL));
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view key) {
    return derive_seed(parent, fnv1a64(key));
}

double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

double exponential1(Rng& rng) {
    // 1 - U lies in (0, 1], so the log is finite and the result is >= 0;
    // U == 0 maps to exactly 0 which we nudge off the boundary.
    const double u = uniform01(rng);
    const double e = -std::log1p(-u);
    return e > 0.0 ? e : 0x1.0p-53;
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index needs n > 0");
    // Rejection sampling keeps the result unbiased for any n.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    return r % n;
}

bool bernoulli(Rng& rng, double p) {
    return uniform01(rng) < p;
}

}  // namespace vrnet
