#ifndef DRIFTLAB_RNG_HPP
#define DRIFTLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace driftlab::rng {

/// SplitMix64 mixing step. Used to derive independent sub-stream seeds from
/// one root seed so that toggling one randomness channel (labels, noise,
/// label flips) never perturbs the others.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a named channel of a root seed.
inline std::uint64_t channel_seed(std::uint64_t root, std::uint64_t tag) {
    return splitmix64(root ^ splitmix64(tag));
}

/// One Poisson(lambda) draw; lambda <= 0 yields 0.
inline unsigned poisson_draw(std::mt19937_64& engine, double lambda) {
    if (!(lambda > 0.0)) return 0;
    std::poisson_distribution<unsigned> dist(lambda);
    return dist(engine);
}

}  // namespace driftlab::rng

#endif  // DRIFTLAB_RNG_HPP
