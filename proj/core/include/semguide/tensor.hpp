#pragma once

#include <cstddef>
#include <vector>

namespace semguide {

std::size_t shape_numel(const std::vector<std::size_t>& shape);

/// Flat row-major value store. Most of the pipeline works on flattened
/// vectors; Tensor keeps a shape only where layer geometry matters.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> v);

    static Tensor zeros(std::vector<std::size_t> shape);

    std::size_t numel() const { return values.size(); }
    bool all_finite() const;
};

}  // namespace semguide
