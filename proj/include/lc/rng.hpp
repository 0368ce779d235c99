#pragma once

#include <cstdint>
#include <random>

namespace lc {

/// Deterministic random stream. The generator is mt19937_64, whose output
/// sequence is fixed by the C++ standard, and all distributions are sampled
/// by hand from its raw output, so a seed reproduces bit-identical values on
/// any platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed), seed_(seed) {}

    static constexpr const char* algorithm() { return "mt19937_64 + Box-Muller"; }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (pair cached).
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        // rejection sampling keeps the draw unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = gen_(); } while (x >= limit);
        return x % n;
    }

    /// Derive an independent stream for worker/shard `index`.
    RngStream substream(std::uint64_t index) const;

    std::uint64_t seed_used() const { return seed_; }

private:
    std::mt19937_64 gen_;
    std::uint64_t seed_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// splitmix64 finalizer, used for seed mixing.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace lc
