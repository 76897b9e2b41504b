#ifndef MATCON_RNG_HPP
#define MATCON_RNG_HPP

#include <cstdint>
#include <limits>

namespace matcon {

inline constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// SplitMix64: output k is mix64(state + k·γ), so a stream is fully
/// determined by its starting state. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        state_ += kGamma;
        return mix64(state_);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t state_;
};

/// Identifies one independent substream: (master seed, replicate, entry,
/// purpose). Streams for distinct keys never share state.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t replicate = 0;

    SplitMix64 stream(std::uint64_t entry, std::uint64_t salt = 0) const
    {
        std::uint64_t h = mix64(master_seed ^ 0x6a09e667f3bcc909ULL);
        h = mix64(h ^ (replicate + 0x3c6ef372fe94f82bULL));
        h = mix64(h ^ (entry + 0xa54ff53a5f1d36f1ULL));
        h = mix64(h ^ (salt + 0x510e527fade682d1ULL));
        return SplitMix64(h);
    }
};

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(SplitMix64& g)
{
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

} // namespace matcon

#endif
