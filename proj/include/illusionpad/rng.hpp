#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace illusionpad {

/// Seeded random source with a platform-independent bounded draw, so the
/// same seed yields the same shuffles on every standard library.
/// Single consumer: do not share one instance across threads.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound) by rejection sampling.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace illusionpad
