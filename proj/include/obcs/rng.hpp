#ifndef OBCS_RNG_HPP
#define OBCS_RNG_HPP

#include <cstdint>
#include <random>

namespace obcs {

// Generator identity string recorded in output metadata. Bump the suffix if
// the sampling scheme below ever changes.
inline constexpr const char* kRngIdentity = "mt19937_64/polar-v1";

// splitmix64 finalizer (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x);

// Per-trial seed derivation: hash(base_seed, index). Distinct indices give
// statistically disjoint mt19937_64 streams.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

// Deterministic standard-normal stream. Uses the Marsaglia polar method on
// top of mt19937_64 so the same seed yields the same values on every
// platform; std::normal_distribution is implementation-defined and is
// deliberately avoided.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double next();

    // Uniform double in [0, 1) with 53 random bits.
    double next_uniform();

    // Uniform integer in [0, bound) via rejection; bound >= 1.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace obcs

#endif
