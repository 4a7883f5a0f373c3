#pragma once

// Counter-based, splittable 64-bit generator. Output n of a stream is a pure
// function of (key, n), so substreams can be addressed directly by
// (seed, stream ids...) without sequential state.

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace blochgrass {

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class CounterRng {
  public:
    using result_type = std::uint64_t;
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

    explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

    /// Stream addressed by a path of ids below a seed.
    static constexpr CounterRng keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
        std::uint64_t key = mix64(seed + kGolden);
        for (auto id : path) key = mix64(key ^ mix64(id + kGolden));
        return CounterRng(key);
    }

    constexpr CounterRng split(std::uint64_t stream) const noexcept {
        return CounterRng(mix64(key_ ^ mix64(stream + kGolden)));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept { return mix64(key_ + kGolden * ++counter_); }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1].
    double uniform_open() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t index(std::uint64_t n) noexcept {
        if (n <= 1) return 0;
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t r;
        do r = (*this)();
        while (r >= limit);
        return r % n;
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double a = 6.283185307179586476925 * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly-symmetric complex normal with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0) noexcept {
        const double s = std::sqrt(0.5 * variance);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    constexpr std::uint64_t key() const noexcept { return key_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace blochgrass
