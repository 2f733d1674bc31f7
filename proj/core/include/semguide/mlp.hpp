#pragma once

#include <string>
#include <vector>

#include "semguide/rng.hpp"
#include "semguide/tensor.hpp"

namespace semguide {

enum class Activation { identity, relu, silu, tanh, sigmoid };

Activation activation_from_name(const std::string& name);
const char* activation_name(Activation a);

double apply_activation(Activation a, double x);
/// Derivative at pre-activation x, given the already-computed activation y.
double activation_derivative(Activation a, double x, double y);

/// Fully connected network. weights[l] has shape [out, in]; biases[l] [out].
struct Mlp {
    std::vector<std::size_t> layer_dims;
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;
    Activation hidden_activation = Activation::silu;
    Activation output_activation = Activation::identity;

    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t output_dim() const { return layer_dims.back(); }
    std::size_t num_layers() const { return weights.size(); }
    std::size_t parameter_count() const;
};

/// Kaiming-style uniform fan-in initialization, seeded.
Mlp make_mlp(const std::vector<std::size_t>& layer_dims, Activation hidden,
             Activation output, Rng& rng);

/// Activation record from a forward pass, sufficient for exact reverse-mode
/// gradients. activations[0] is the input; preacts[l] is layer l's z = Wx + b.
struct ForwardCache {
    std::vector<std::vector<double>> activations;
    std::vector<std::vector<double>> preacts;
};

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input,
                                ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;

    void scale(double s);
    bool all_finite() const;
};

Gradients zero_gradients(const Mlp& net);

/// Exact reverse-mode gradients of the forward map. Accumulates parameter
/// gradients into grads (so minibatch sums happen in a fixed caller-defined
/// order) and returns the gradient with respect to the input.
std::vector<double> mlp_backward(const Mlp& net, const ForwardCache& cache,
                                 const std::vector<double>& output_grad,
                                 Gradients& grads);

}  // namespace semguide
