#pragma once

#include <cmath>
#include <cstdint>

namespace tndkit {

// splitmix64 step (Steele, Lea, Flood 2014). Used both as a stream mixer and
// as the per-stream generator: every draw is a pure function of
// (seed, stream, draw index), so chunked/parallel generation produces the
// same values as a sequential pass.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based substream: state is derived by hashing the (seed, stream ids)
// tuple, after which the generator walks the splitmix64 sequence.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed, 0x6a09e667f3bcc909ULL)) {}
    Rng(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(mix(seed, 0x6a09e667f3bcc909ULL), stream)) {}
    Rng(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b)
        : state_(mix(mix(mix(seed, 0x6a09e667f3bcc909ULL), stream_a), stream_b)) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform on [0, 1) with 53 random mantissa bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
        return splitmix64(s);
    }

  private:
    std::uint64_t state_;
};

// Derive a child seed from a parent seed and up to three indices
// (rep index, sample size, scenario id, ...). Pure and collision-mixed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    return Rng::mix(Rng::mix(Rng::mix(seed, a), b), c);
}

inline double expit(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace tndkit
