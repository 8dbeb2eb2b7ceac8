#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mdrl {

// Counter-based splittable generator built on splitmix64. Every random
// decision in the library is derived from one root seed through next()/split(),
// so runs are reproducible bit-for-bit across platforms and thread schedules.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(mix(seed ^ kGamma)) {}

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform over {0, ..., n-1}. Modulo bias is below 2^-50 for desk-scale n.
    int next_int(int n) {
        if (n <= 0) throw std::invalid_argument("Rng::next_int: n must be positive");
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

    // Draw an index from an (unnormalized is fine) nonnegative weight vector.
    int categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::invalid_argument("Rng::categorical: weights sum to zero");
        double u = next_double() * total;
        double acc = 0.0;
        int last_positive = -1;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] > 0.0) last_positive = static_cast<int>(i);
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return last_positive;
    }

    // Independent stream derived from this generator's current state; does not
    // advance the parent. Distinct tags give statistically independent streams.
    Rng split(std::uint64_t tag) const {
        Rng child(0);
        child.state_ = mix(state_ ^ mix(tag * kGamma + 0x632be59bd9b4e019ULL));
        return child;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace mdrl
