#pragma once

#include <cstdint>

namespace contbell {

/// Counter-based random stream: one independent SplitMix64 sequence per
/// (seed, stream id). Simulations open one stream per pair index, so any
/// partition of the pair range across workers draws identical numbers.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : state_(mix(seed ^ mix(stream_id + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform on (0, 1] with 53-bit resolution, so u <= 0 never holds and
    // u <= 1 always does.
    double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return next_u64(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace contbell
