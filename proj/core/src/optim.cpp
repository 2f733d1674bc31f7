#include "semguide/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace semguide {

OptimState make_optim_state(const Mlp& net, double learning_rate, double weight_decay) {
    OptimState st;
    st.learning_rate = learning_rate;
    st.weight_decay = weight_decay;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        st.m_weights.push_back(Tensor::zeros(net.weights[l].shape));
        st.v_weights.push_back(Tensor::zeros(net.weights[l].shape));
        st.m_biases.push_back(Tensor::zeros(net.biases[l].shape));
        st.v_biases.push_back(Tensor::zeros(net.biases[l].shape));
    }
    return st;
}

namespace {

void update_tensor(const OptimState& st, double bc1, double bc2, Tensor& param,
                   const Tensor& grad, Tensor& m, Tensor& v, bool decay) {
    if (param.numel() != grad.numel()) {
        throw std::invalid_argument("adamw_step: parameter/gradient shape mismatch");
    }
    const std::size_t n = param.numel();
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad.values[i];
        m.values[i] = st.beta1 * m.values[i] + (1.0 - st.beta1) * g;
        v.values[i] = st.beta2 * v.values[i] + (1.0 - st.beta2) * g * g;
        const double m_hat = m.values[i] / bc1;
        const double v_hat = v.values[i] / bc2;
        double p = param.values[i];
        if (decay) p -= st.learning_rate * st.weight_decay * p;
        p -= st.learning_rate * m_hat / (std::sqrt(v_hat) + st.epsilon);
        param.values[i] = p;
    }
}

}  // namespace

void adamw_step(OptimState& state, Mlp& net, const Gradients& grads) {
    if (state.m_weights.size() != net.num_layers() ||
        grads.weights.size() != net.num_layers()) {
        throw std::invalid_argument("adamw_step: state/network layer count mismatch");
    }
    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        update_tensor(state, bc1, bc2, net.weights[l], grads.weights[l],
                      state.m_weights[l], state.v_weights[l], /*decay=*/true);
        update_tensor(state, bc1, bc2, net.biases[l], grads.biases[l],
                      state.m_biases[l], state.v_biases[l], /*decay=*/true);
    }
}

}  // namespace semguide
