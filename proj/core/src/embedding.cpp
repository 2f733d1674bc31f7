#include "semguide/embedding.hpp"

#include <cmath>
#include <stdexcept>

namespace semguide {

std::vector<double> timestep_embedding(std::size_t t, std::size_t dim,
                                       std::size_t max_steps) {
    if (dim == 0 || dim % 2 != 0) {
        throw std::invalid_argument("timestep_embedding: dim must be even and > 0");
    }
    const std::size_t half = dim / 2;
    const double base = static_cast<double>(max_steps < 2 ? 2 : max_steps);
    std::vector<double> emb(dim);
    for (std::size_t k = 0; k < half; ++k) {
        const double freq =
            std::exp(-std::log(base) * static_cast<double>(k) /
                     static_cast<double>(half));
        const double arg = static_cast<double>(t) * freq;
        emb[2 * k] = std::sin(arg);
        emb[2 * k + 1] = std::cos(arg);
    }
    return emb;
}

}  // namespace semguide
