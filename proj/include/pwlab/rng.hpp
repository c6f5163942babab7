#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace pwlab {

/// One step of the splitmix64 generator. Used to expand a (seed, index)
/// pair into independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for stream `index` derived from `seed`: two splitmix64 rounds over
/// seed + golden-ratio * (index + 1).
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    splitmix64(state);
    return splitmix64(state);
}

/// Portable deterministic RNG. The engine is std::mt19937_64 (its output
/// sequence is fixed by the standard); the distributions are implemented
/// here because the std:: ones are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % bound;
    }

    /// Uniform integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace pwlab
