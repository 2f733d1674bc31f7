#include <doctest.h>

#include <cmath>

#include "semguide/embedding.hpp"
#include "semguide/mlp.hpp"
#include "semguide/optim.hpp"
#include "test_util.hpp"

using namespace semguide;

namespace {

Mlp linear_net(std::size_t in, std::size_t out) {
    Mlp net;
    net.layer_dims = {in, out};
    net.weights.push_back(Tensor::zeros({out, in}));
    net.biases.push_back(Tensor::zeros({out}));
    net.hidden_activation = Activation::identity;
    net.output_activation = Activation::identity;
    return net;
}

}  // namespace

TEST_CASE("identity-initialized linear layer passes input through") {
    Mlp net = linear_net(3, 3);
    for (std::size_t i = 0; i < 3; ++i) net.weights[0].values[i * 3 + i] = 1.0;
    CHECK(mlp_forward(net, {1.0, 2.0, 3.0}) == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("zero weights yield the bias for any input") {
    Mlp net = linear_net(4, 2);
    net.biases[0].values = {0.5, -1.25};
    Rng rng(1);
    for (int k = 0; k < 5; ++k) {
        const auto out = mlp_forward(net, rng.normal_vector(4));
        CHECK(out == std::vector<double>{0.5, -1.25});
    }
}

TEST_CASE("fixed 2-2-1 tanh net matches hand evaluation") {
    Mlp net;
    net.layer_dims = {2, 2, 1};
    net.hidden_activation = Activation::tanh;
    net.output_activation = Activation::identity;
    net.weights.push_back(Tensor({2, 2}, {0.3, -0.5, 0.8, 0.1}));
    net.biases.push_back(Tensor({2}, {0.1, -0.2}));
    net.weights.push_back(Tensor({1, 2}, {1.5, -0.7}));
    net.biases.push_back(Tensor({1}, {0.25}));

    const double x0 = 0.6, x1 = -1.2;
    // Independent scalar walk through the same arithmetic.
    const double z0 = 0.3 * x0 + (-0.5) * x1 + 0.1;
    const double z1 = 0.8 * x0 + 0.1 * x1 + (-0.2);
    const double h0 = std::tanh(z0), h1 = std::tanh(z1);
    const double expected = 1.5 * h0 + (-0.7) * h1 + 0.25;

    const auto out = mlp_forward(net, {x0, x1});
    CHECK(out.size() == 1);
    CHECK(out[0] == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("linear net with squared loss matches the closed-form gradient") {
    Mlp net = linear_net(3, 1);
    net.weights[0].values = {0.4, -0.3, 0.9};
    net.biases[0].values = {0.2};
    const std::vector<double> x = {1.0, -2.0, 0.5};
    const double y = 0.7;

    ForwardCache cache;
    const auto out = mlp_forward(net, x, &cache);
    const double resid = out[0] - y;  // L = (Wx + b - y)^2
    Gradients grads = zero_gradients(net);
    mlp_backward(net, cache, {2.0 * resid}, grads);

    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(grads.weights[0].values[i] ==
              doctest::Approx(2.0 * resid * x[i]).epsilon(1e-12));
    }
    CHECK(grads.biases[0].values[0] == doctest::Approx(2.0 * resid).epsilon(1e-12));
}

TEST_CASE("zero output gradient produces all-zero gradients") {
    Rng rng(2);
    Mlp net = make_mlp({4, 5, 2}, Activation::silu, Activation::identity, rng);
    ForwardCache cache;
    mlp_forward(net, rng.normal_vector(4), &cache);
    Gradients grads = zero_gradients(net);
    mlp_backward(net, cache, {0.0, 0.0}, grads);
    for (const auto& t : grads.weights) {
        for (double v : t.values) CHECK(v == 0.0);
    }
    for (const auto& t : grads.biases) {
        for (double v : t.values) CHECK(v == 0.0);
    }
}

TEST_CASE("stale or mismatched cache is rejected") {
    Rng rng(3);
    Mlp net = make_mlp({3, 4, 2}, Activation::tanh, Activation::identity, rng);
    Mlp other = make_mlp({3, 5, 2}, Activation::tanh, Activation::identity, rng);
    ForwardCache cache;
    mlp_forward(other, {1.0, 2.0, 3.0}, &cache);
    Gradients grads = zero_gradients(net);
    CHECK_THROWS(mlp_backward(net, cache, {1.0, 0.0}, grads));
}

TEST_CASE("gradients match central finite differences on random nets") {
    // Mix of activations and shapes, all under 200 parameters.
    const std::vector<std::vector<std::size_t>> shapes = {
        {3, 5, 2}, {4, 8, 1}, {2, 6, 6, 1}, {5, 4, 3}, {1, 9, 1}};
    const std::vector<Activation> hiddens = {Activation::silu, Activation::tanh,
                                             Activation::relu};
    const std::vector<Activation> outputs = {Activation::identity, Activation::sigmoid,
                                             Activation::tanh};
    Rng rng(17);
    int checked = 0;
    double worst = 0.0;
    for (int rep = 0; rep < 21; ++rep) {
        const auto& dims = shapes[rep % shapes.size()];
        Mlp net = make_mlp(dims, hiddens[rep % hiddens.size()],
                           outputs[rep % outputs.size()], rng);
        REQUIRE(net.parameter_count() <= 200);
        const auto input = rng.normal_vector(dims.front());
        const auto c = rng.normal_vector(dims.back());
        const auto d = rng.normal_vector(dims.back());
        auto loss = [&](const std::vector<double>& out, std::vector<double>& dout) {
            double acc = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i) {
                acc += c[i] * out[i] + 0.5 * d[i] * out[i] * out[i];
                dout[i] = c[i] + d[i] * out[i];
            }
            return acc;
        };
        worst = std::max(worst, testutil::gradient_check(net, input, loss));
        ++checked;
    }
    CHECK(checked >= 20);
    CHECK(worst < 1e-4);
}

TEST_CASE("adamw leaves parameters alone with zero gradient and zero decay") {
    Rng rng(4);
    Mlp net = make_mlp({2, 3, 1}, Activation::silu, Activation::identity, rng);
    const Mlp before = net;
    OptimState opt = make_optim_state(net, 0.1, 0.0);
    adamw_step(opt, net, zero_gradients(net));
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        CHECK(net.weights[l].values == before.weights[l].values);
        CHECK(net.biases[l].values == before.biases[l].values);
    }
}

TEST_CASE("first adamw step with unit gradient moves by about lr") {
    Mlp net;
    net.layer_dims = {1, 1};
    net.weights.push_back(Tensor({1, 1}, {1.0}));
    net.biases.push_back(Tensor({1}, {0.0}));
    OptimState opt = make_optim_state(net, 0.1, 0.0);
    Gradients grads = zero_gradients(net);
    grads.weights[0].values[0] = 1.0;
    adamw_step(opt, net, grads);
    // Bias-corrected first step: m_hat = v_hat = 1, so the move is
    // lr / (1 + eps).
    CHECK(net.weights[0].values[0] == doctest::Approx(1.0 - 0.1).epsilon(1e-7));
}

TEST_CASE("decoupled decay shrinks parameters with zero gradients") {
    Mlp net;
    net.layer_dims = {1, 1};
    net.weights.push_back(Tensor({1, 1}, {2.0}));
    net.biases.push_back(Tensor({1}, {-1.5}));
    OptimState opt = make_optim_state(net, 0.05, 0.01);
    double prev_w = 2.0, prev_b = -1.5;
    for (int step = 0; step < 50; ++step) {
        adamw_step(opt, net, zero_gradients(net));
        CHECK(std::abs(net.weights[0].values[0]) < std::abs(prev_w));
        CHECK(std::abs(net.biases[0].values[0]) < std::abs(prev_b));
        prev_w = net.weights[0].values[0];
        prev_b = net.biases[0].values[0];
    }
}

TEST_CASE("timestep embedding basics") {
    const auto at_zero = timestep_embedding(0, 8, 200);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(at_zero[2 * k] == 0.0);
        CHECK(at_zero[2 * k + 1] == 1.0);
    }
    CHECK(timestep_embedding(17, 8, 200) == timestep_embedding(17, 8, 200));
    CHECK_THROWS(timestep_embedding(1, 7, 200));

    for (std::size_t t = 0; t <= 200; ++t) {
        for (double v : timestep_embedding(t, 8, 200)) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("timestep embedding is injective over the step range") {
    // Exhaustive pairwise check for t in [1, 200], dim 8.
    std::vector<std::vector<double>> embs;
    for (std::size_t t = 1; t <= 200; ++t) {
        embs.push_back(timestep_embedding(t, 8, 200));
    }
    for (std::size_t a = 0; a < embs.size(); ++a) {
        for (std::size_t b = a + 1; b < embs.size(); ++b) {
            CHECK(embs[a] != embs[b]);
        }
    }
}

TEST_CASE("seeded initialization is bit-reproducible") {
    Rng r1(99), r2(99);
    Mlp a = make_mlp({6, 16, 3}, Activation::silu, Activation::identity, r1);
    Mlp b = make_mlp({6, 16, 3}, Activation::silu, Activation::identity, r2);
    for (std::size_t l = 0; l < a.num_layers(); ++l) {
        CHECK(a.weights[l].values == b.weights[l].values);
        CHECK(a.biases[l].values == b.biases[l].values);
    }
}
