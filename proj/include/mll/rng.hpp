#pragma once

#include <cassert>
#include <cstdint>

namespace mll {

/// SplitMix64 generator. Sample-level streams are derived from
/// (seed, sample index) so that results do not depend on which worker
/// thread processes a sample.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng for_sample(std::uint64_t seed, std::uint64_t index) {
        Rng r(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
        r.next();
        r.next();
        return r;
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n) without modulo bias.
    std::uint64_t below(std::uint64_t n) {
        assert(n > 0);
        std::uint64_t rej = (UINT64_MAX % n) + 1;  // 2^64 mod n, with n meaning 0
        if (rej == n) rej = 0;
        std::uint64_t v = next();
        if (rej != 0) {
            while (v >= std::uint64_t(0) - rej) v = next();
        }
        return v % n;
    }

private:
    std::uint64_t state_;
};

}  // namespace mll
