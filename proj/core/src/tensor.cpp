#include "semguide/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace semguide {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> v)
    : shape(std::move(s)), values(std::move(v)) {
    if (shape_numel(shape) != values.size()) {
        throw std::invalid_argument("Tensor: shape does not match value count");
    }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

bool Tensor::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace semguide
