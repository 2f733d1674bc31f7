#pragma once

#include <cstddef>
#include <vector>

namespace semguide {

/// Sinusoidal timestep embedding. dim must be even; layout is interleaved
/// (sin, cos) pairs from the highest frequency (w = 1) downward, so the
/// embedding is injective over integer steps for dim >= 2. Values in [-1, 1].
std::vector<double> timestep_embedding(std::size_t t, std::size_t dim,
                                       std::size_t max_steps);

}  // namespace semguide
