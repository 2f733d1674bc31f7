#include "semguide/mlp.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace semguide {

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "silu") return Activation::silu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    throw std::invalid_argument("unknown activation: " + name);
}

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::silu: return "silu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    return "identity";
}

double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::identity: return x;
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::silu: return x / (1.0 + std::exp(-x));
        case Activation::tanh: return std::tanh(x);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    }
    return x;
}

double activation_derivative(Activation a, double x, double y) {
    switch (a) {
        case Activation::identity: return 1.0;
        case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::silu: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 + x * (1.0 - s));
        }
        case Activation::tanh: return 1.0 - y * y;
        case Activation::sigmoid: return y * (1.0 - y);
    }
    return 1.0;
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        n += weights[l].numel() + biases[l].numel();
    }
    return n;
}

Mlp make_mlp(const std::vector<std::size_t>& layer_dims, Activation hidden,
             Activation output, Rng& rng) {
    if (layer_dims.size() < 2) {
        throw std::invalid_argument("make_mlp: need at least input and output dims");
    }
    for (auto d : layer_dims) {
        if (d == 0) throw std::invalid_argument("make_mlp: zero layer width");
    }
    Mlp net;
    net.layer_dims = layer_dims;
    net.hidden_activation = hidden;
    net.output_activation = output;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const std::size_t in = layer_dims[l];
        const std::size_t out = layer_dims[l + 1];
        const double bound = std::sqrt(1.0 / static_cast<double>(in));
        Tensor w = Tensor::zeros({out, in});
        for (auto& v : w.values) v = (2.0 * rng.uniform() - 1.0) * bound;
        Tensor b = Tensor::zeros({out});
        for (auto& v : b.values) v = (2.0 * rng.uniform() - 1.0) * bound;
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input,
                                ForwardCache* cache) {
    if (input.size() != net.input_dim()) {
        throw std::invalid_argument("mlp_forward: input width mismatch");
    }
    if (cache) {
        cache->activations.clear();
        cache->preacts.clear();
        cache->activations.push_back(input);
    }
    std::vector<double> cur = input;
    const std::size_t layers = net.num_layers();
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = net.layer_dims[l];
        const std::size_t out = net.layer_dims[l + 1];
        const double* w = net.weights[l].values.data();
        const double* b = net.biases[l].values.data();
        std::vector<double> z(out);
        for (std::size_t o = 0; o < out; ++o) {
            double acc = b[o];
            const double* row = w + o * in;
            for (std::size_t i = 0; i < in; ++i) acc += row[i] * cur[i];
            z[o] = acc;
        }
        const Activation act =
            (l + 1 == layers) ? net.output_activation : net.hidden_activation;
        std::vector<double> a(out);
        for (std::size_t o = 0; o < out; ++o) a[o] = apply_activation(act, z[o]);
        if (cache) {
            cache->preacts.push_back(z);
            cache->activations.push_back(a);
        }
        cur = std::move(a);
    }
    assert([&] {
        for (double v : cur)
            if (!std::isfinite(v)) return false;
        return true;
    }());
    return cur;
}

Gradients zero_gradients(const Mlp& net) {
    Gradients g;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        g.weights.push_back(Tensor::zeros(net.weights[l].shape));
        g.biases.push_back(Tensor::zeros(net.biases[l].shape));
    }
    return g;
}

void Gradients::scale(double s) {
    for (auto& t : weights)
        for (auto& v : t.values) v *= s;
    for (auto& t : biases)
        for (auto& v : t.values) v *= s;
}

bool Gradients::all_finite() const {
    for (const auto& t : weights)
        if (!t.all_finite()) return false;
    for (const auto& t : biases)
        if (!t.all_finite()) return false;
    return true;
}

std::vector<double> mlp_backward(const Mlp& net, const ForwardCache& cache,
                                 const std::vector<double>& output_grad,
                                 Gradients& grads) {
    const std::size_t layers = net.num_layers();
    if (cache.preacts.size() != layers || cache.activations.size() != layers + 1) {
        throw std::invalid_argument("mlp_backward: cache does not match network");
    }
    if (output_grad.size() != net.output_dim()) {
        throw std::invalid_argument("mlp_backward: output_grad width mismatch");
    }
    if (grads.weights.size() != layers || grads.biases.size() != layers) {
        throw std::invalid_argument("mlp_backward: gradient accumulator mismatch");
    }
    for (std::size_t l = 0; l < layers; ++l) {
        if (cache.activations[l].size() != net.layer_dims[l] ||
            cache.preacts[l].size() != net.layer_dims[l + 1]) {
            throw std::invalid_argument("mlp_backward: stale cache shapes");
        }
    }

    std::vector<double> delta = output_grad;
    for (std::size_t li = layers; li-- > 0;) {
        const std::size_t in = net.layer_dims[li];
        const std::size_t out = net.layer_dims[li + 1];
        const Activation act =
            (li + 1 == layers) ? net.output_activation : net.hidden_activation;
        const auto& z = cache.preacts[li];
        const auto& a = cache.activations[li + 1];
        const auto& x = cache.activations[li];

        // delta <- dL/dz for this layer
        for (std::size_t o = 0; o < out; ++o) {
            delta[o] *= activation_derivative(act, z[o], a[o]);
        }

        double* gw = grads.weights[li].values.data();
        double* gb = grads.biases[li].values.data();
        for (std::size_t o = 0; o < out; ++o) {
            const double d = delta[o];
            gb[o] += d;
            double* row = gw + o * in;
            for (std::size_t i = 0; i < in; ++i) row[i] += d * x[i];
        }

        std::vector<double> prev(in, 0.0);
        const double* w = net.weights[li].values.data();
        for (std::size_t o = 0; o < out; ++o) {
            const double d = delta[o];
            const double* row = w + o * in;
            for (std::size_t i = 0; i < in; ++i) prev[i] += d * row[i];
        }
        delta = std::move(prev);
    }
    return delta;
}

}  // namespace semguide
