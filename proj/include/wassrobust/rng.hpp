#pragma once

#include <cstdint>
#include <random>

namespace wassrobust {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for an independent stream of a run.
///
/// Stream 0 initializes model parameters. Stream k >= 1 drives the batch
/// sampler of worker k; a centralized trainer uses stream 1, which is what
/// makes a single-worker federated run replay the centralized trajectory.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stream) {
    return splitmix64(splitmix64(run_seed) ^ (stream * 0xD1B54A32D192ED03ULL));
}

}  // namespace wassrobust
