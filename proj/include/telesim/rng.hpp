// rng.hpp
// Counter-based seedable random stream for reproducible simulation runs.

#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

namespace telesim {

// Pseudorandom stream built from the splitmix64 finalizer applied to an
// incrementing counter. A (seed, stream) pair fully determines the output
// sequence, so per-trial substreams are replayable and order-independent:
// trial i always sees RandomStream(seed, i) regardless of execution order.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed + kGolden * (mix(stream + kGolden) | 1))) {}

    std::uint64_t next_u64() {
        counter_ += kGolden;
        return mix(key_ ^ counter_);
    }

    // uniform on [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal, Box-Muller
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double();  // (0, 1]
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace telesim
