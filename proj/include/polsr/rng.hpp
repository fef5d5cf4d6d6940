#ifndef POLSR_RNG_HPP
#define POLSR_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace polsr {

/// Seeded generator with draws defined bit-for-bit on top of mt19937_64,
/// so results do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Independent stream derived from a seed and a tuple of keys.
    static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal (Box-Muller, cached pair).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace polsr

#endif  // POLSR_RNG_HPP
