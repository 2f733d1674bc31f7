#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "semguide/mlp.hpp"

namespace testutil {

/// Scratch directory unique to this process, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("semguide_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string str(const std::string& name = "") const {
        return name.empty() ? path.string() : (path / name).string();
    }
};

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Loss over the network output; returns the loss and fills dL/d(output).
using OutputLoss =
    std::function<double(const std::vector<double>&, std::vector<double>&)>;

/// Central finite differences (h = 1e-5) over every parameter of `net`
/// against the analytic gradients from mlp_backward. Returns the max
/// relative error, with denominator max(|a|, |n|, 1e-6).
inline double gradient_check(semguide::Mlp net, const std::vector<double>& input,
                             const OutputLoss& loss) {
    using namespace semguide;
    ForwardCache cache;
    const auto out = mlp_forward(net, input, &cache);
    std::vector<double> dout(out.size());
    loss(out, dout);
    Gradients analytic = zero_gradients(net);
    mlp_backward(net, cache, dout, analytic);

    const double h = 1e-5;
    double max_rel = 0.0;
    std::vector<double> scratch;
    auto eval_loss = [&]() {
        const auto o = mlp_forward(net, input);
        scratch.assign(o.size(), 0.0);
        return loss(o, scratch);
    };
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        for (int which = 0; which < 2; ++which) {
            auto& params = which == 0 ? net.weights[l] : net.biases[l];
            const auto& grad = which == 0 ? analytic.weights[l] : analytic.biases[l];
            for (std::size_t i = 0; i < params.numel(); ++i) {
                const double saved = params.values[i];
                params.values[i] = saved + h;
                const double up = eval_loss();
                params.values[i] = saved - h;
                const double down = eval_loss();
                params.values[i] = saved;
                const double numeric = (up - down) / (2.0 * h);
                const double a = grad.values[i];
                const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
                max_rel = std::max(max_rel, std::abs(a - numeric) / denom);
            }
        }
    }
    return max_rel;
}

}  // namespace testutil
