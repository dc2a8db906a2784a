#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mcmon {

using Rng = std::mt19937_64;

// Seed of an independent substream identified by `keys` under a master seed.
// Each key is folded in with the splitmix64 finalizer, so substream seeds
// depend only on (seed, keys) and never on how many other streams exist.
std::uint64_t substream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return Rng(substream_seed(seed, keys));
}

} // namespace mcmon
