#pragma once

#include <cstdint>

namespace nfq {

// splitmix64; used to derive independent sub-seeds from the master seed so
// results do not depend on how many draws any one consumer makes.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed streams keep the net-init, episode, and hint RNGs decoupled.
enum class SeedStream : std::uint64_t {
    NetInit = 1,
    Episode = 2,
    Hint = 3,
    Collect = 4,
    Eval = 5,
    Compare = 6,
};

inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                 std::uint64_t index) {
    return splitmix64(splitmix64(master ^ static_cast<std::uint64_t>(stream)) + index);
}

} // namespace nfq
