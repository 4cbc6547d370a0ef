#pragma once

#include <cstdint>

namespace snnarm {

/// Independent RNG streams carved out of one scenario seed.
enum class Stream : std::uint64_t {
    targets = 1,
    ensemble = 2,
    evaluation = 3,
    bootstrap = 4,
    sweep_cell = 5,
};

/// splitmix64 finalizer over (seed, stream, index).
constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stream) * 0x100000001ULL + index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace snnarm
