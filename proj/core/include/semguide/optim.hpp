#pragma once

#include <cstdint>

#include "semguide/mlp.hpp"

namespace semguide {

/// AdamW with bias correction and decoupled weight decay.
struct OptimState {
    double learning_rate = 1e-4;
    double weight_decay = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t step_count = 0;

    std::vector<Tensor> m_weights, v_weights;
    std::vector<Tensor> m_biases, v_biases;
};

OptimState make_optim_state(const Mlp& net, double learning_rate, double weight_decay);

void adamw_step(OptimState& state, Mlp& net, const Gradients& grads);

}  // namespace semguide
