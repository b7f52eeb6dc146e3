#pragma once

#include <cstdint>
#include <random>

namespace bsb {

// Seeded generator with a fully specified output sequence. std::mt19937_64 is
// pinned by the standard; the distribution helpers below are written out here
// because the std:: distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) from the top 53 bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n >= 1, by rejection on the low range.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    // +1 or -1 with equal probability.
    int sign() { return (engine_() >> 63) ? 1 : -1; }

private:
    std::mt19937_64 engine_;
};

}  // namespace bsb
