#pragma once

// Deterministic random streams. Every stochastic routine in the library takes an
// explicit 64-bit seed and derives independent substreams from it, so results are
// reproducible bit-for-bit regardless of call order or worker count.

#include <cmath>
#include <cstdint>
#include <random>

namespace qfslab {

// splitmix64 step; used only to mix seeds, never as the sampling engine.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Collapse (seed, stream tag) into one engine seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(0x5851f42d4c957f2dULL + stream));
}

// mt19937_64 is pinned by the standard, so streams are identical across platforms.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(mix_seed(seed, stream));
}

// Uniform double in [0,1) with 53 random bits. Avoids std::uniform_real_distribution,
// whose output is not pinned by the standard.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (frozen generation algorithm: one uniform pair
// yields the cos/sin branch values in that order; the second value is cached).
class GaussianStream {
  public:
    explicit GaussianStream(std::mt19937_64 eng) : eng_(eng) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1]: guard the log.
        double u1 = 1.0 - uniform01(eng_);
        double u2 = uniform01(eng_);
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qfslab
