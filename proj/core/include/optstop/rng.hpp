#pragma once

#include <cstdint>

namespace optstop {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Per-path key derived from (master seed, path index, stream id). Paths get
/// their random numbers from this key alone, so results do not depend on the
/// order in which paths are simulated or on the number of workers.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t path_index,
                                    std::uint64_t stream = 0) noexcept {
    std::uint64_t k = mix64(master + 0x9e3779b97f4a7c15ULL);
    k = mix64(k ^ (path_index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
    return mix64(k ^ (stream * 0xaef17502108ef2d9ULL + 0x2545f4914f6cdd1dULL));
}

/// Counter-based generator: the i-th draw is mix64(key + i * gamma).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; both variates of a pair are used.
    double normal() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace optstop
