#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace semguide {

std::uint64_t splitmix64(std::uint64_t x);

/// Combines a base seed with stream labels into a new seed. Used to derive
/// independent, reproducible streams (one per window / sweep cell) so that
/// parallel evaluation order cannot change results.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// Deterministic RNG: an mt19937_64 core (bit-exact per the C++ standard) with
/// hand-rolled uniform/normal transforms, so streams do not depend on
/// library-specific distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64();

    /// Unbiased integer in [0, n). Rejection sampling; n must be > 0.
    std::uint64_t next_below(std::uint64_t n);

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform();

    /// Standard normal via Box-Muller. Consumes exactly two uniforms per call
    /// (no cached spare) so the draw count per call site is fixed.
    double normal();

    std::vector<double> normal_vector(std::size_t n);

    /// Independent stream derived from this generator's seed (not its state).
    Rng fork(std::uint64_t stream_id) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Deterministic Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

}  // namespace semguide
