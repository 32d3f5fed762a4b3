#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ccfoe {

// SplitMix64 finalizer. Used to derive independent stream seeds from a master
// seed; the full avalanche keeps sibling streams decorrelated even for
// adjacent inputs.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Child seed for stream `stream` under `base`. Deterministic, order-free.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream));
}

// Seeded generator with uniform and gaussian draws. Gaussians come from
// Box-Muller on top of the raw 64-bit stream rather than
// std::normal_distribution, whose output sequence is implementation-defined;
// this keeps captures and CSV output byte-identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Standard normal. Pairs are generated eagerly and handed out one at a time.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // 1 - u in (0, 1] keeps the log argument away from zero.
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream identifiers for per-realization seed derivation. Values are arbitrary
// but frozen: changing them changes every derived sequence.
namespace seed_stream {
inline constexpr std::uint64_t kFMeanDraw = 0x01;
inline constexpr std::uint64_t kPrbs = 0x02;
inline constexpr std::uint64_t kNoise = 0x03;
}  // namespace seed_stream

}  // namespace ccfoe
