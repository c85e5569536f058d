#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>

namespace sdfsim {

/// SplitMix64 finalizer. Used to derive independent seeds from a base seed
/// plus counters, so a stream depends only on its own coordinates.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) noexcept
{
    return mix64(mix64(base) ^ mix64(a + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept
{
    return derive_seed(derive_seed(base, a), b);
}

/// 64-bit FNV-1a, for hashing textual keys into seed space.
constexpr std::uint64_t fnv1a(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stream tags for derive_seed; stable across releases (they feed stored seeds).
enum class StreamTag : std::uint64_t
{
    Arena = 1,
    FlawedAssignment = 2,
    Placement = 3,
    Robot = 4,
};

/// Random stream with platform-independent draws. The standard distributions
/// are implementation-defined, so uniform doubles and bounded integers are
/// derived from the raw mt19937_64 output here.
class RandomStream
{
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    RandomStream(std::uint64_t base, StreamTag tag, std::uint64_t index = 0)
        : engine_(derive_seed(base, static_cast<std::uint64_t>(tag), index))
    {
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t r;
        do
        {
            r = engine_();
        } while (r >= limit);
        return r % bound;
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64 &engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by RandomStream::below (std::shuffle is not
/// reproducible across standard library implementations).
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, RandomStream &rng)
{
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i)
    {
        const auto j = rng.below(i);
        std::iter_swap(first + (i - 1), first + j);
    }
}

} // namespace sdfsim
