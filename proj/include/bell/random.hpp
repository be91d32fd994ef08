#ifndef BELL_RANDOM_HPP
#define BELL_RANDOM_HPP

#include "bell/types.hpp"

#include <initializer_list>
#include <span>

namespace bell {

// Purpose tags for keyed streams; part of the replay contract, do not reorder.
enum class StreamPurpose : std::uint64_t {
    TermDraw = 1,
    InputDraw = 2,
    TimingDraw = 3,
};

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Stateless counter-based pseudorandom stream, keyed by (seed, key words).
/// The n-th output is a pure function of the key, so replays are bit-identical
/// under any evaluation order or parallelism.
class KeyedStream {
public:
    KeyedStream(std::uint64_t seed, std::initializer_list<std::uint64_t> words) : state_(seed) {
        for (std::uint64_t w : words) {
            state_ = detail::mix64(state_ ^ detail::mix64(w));
        }
    }

    std::uint64_t next_u64() {
        counter_ += 0x9e3779b97f4a7c15ull;
        return detail::mix64(state_ + counter_);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    Real next_double() { return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53; }

    Real next_uniform(Real lo, Real hi) { return lo + (hi - lo) * next_double(); }

    /// Index drawn from the distribution with the given cumulative weights.
    std::size_t next_discrete(std::span<const Real> cdf) {
        const Real u = next_double();
        for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
            if (u < cdf[i]) return i;
        }
        return cdf.empty() ? 0 : cdf.size() - 1;
    }

private:
    std::uint64_t state_;
    std::uint64_t counter_ = 0;
};

}  // namespace bell

#endif  // BELL_RANDOM_HPP
