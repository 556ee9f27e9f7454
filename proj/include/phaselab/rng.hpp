#pragma once
// Deterministic random numbers. We do not use std::normal_distribution or
// std::shuffle because their output sequences are implementation-defined;
// byte-identical reruns are a hard requirement for exported artifacts.

#include <cmath>
#include <cstdint>
#include <vector>

namespace phaselab {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53-bit mantissa
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, bound), unbiased (rejection)
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // standard normal via Box-Muller; caches the second deviate
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Fisher-Yates with the unbiased bounded draw above.
template <typename T>
void shuffle_in_place(std::vector<T>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace phaselab
