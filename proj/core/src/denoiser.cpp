#include "semguide/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "semguide/csv.hpp"
#include "semguide/embedding.hpp"
#include "semguide/errors.hpp"
#include "semguide/optim.hpp"

namespace semguide {

void write_train_log(const std::string& path, const TrainReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("write_train_log: cannot write " + path);
    out << "epoch,loss,val_loss\n";
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
        out << (e + 1) << ',' << format_double(report.epoch_loss[e]) << ','
            << format_double(report.epoch_val_loss[e]) << "\n";
    }
}

Conditioning build_conditioning(const Window& normalized_window, bool use_history) {
    if (normalized_window.covariates.numel() == 0) {
        throw DataError("build_conditioning: window has no covariates");
    }
    Conditioning cond;
    cond.covariate_len = normalized_window.covariates.numel();
    cond.values = normalized_window.covariates.values;
    if (use_history) {
        cond.values.insert(cond.values.end(), normalized_window.history.values.begin(),
                           normalized_window.history.values.end());
    }
    return cond;
}

Denoiser make_denoiser(const DenoiserConfig& cfg, const Dataset& ds,
                       const ScheduleParams& schedule, Rng& rng) {
    Denoiser model;
    model.horizon = ds.horizon;
    model.target_channels = ds.target_channels;
    model.covariate_channels = ds.covariate_channels;
    model.history_len = ds.history_len;
    model.embed_dim = cfg.embed_dim;
    model.use_history = cfg.use_history;
    model.schedule_ref = schedule;

    std::vector<std::size_t> dims;
    dims.push_back(model.input_dim());
    for (auto d : cfg.hidden_dims) dims.push_back(d);
    dims.push_back(model.state_dim());
    model.net = make_mlp(dims, Activation::silu, Activation::identity, rng);
    return model;
}

namespace {

std::vector<double> assemble_input(const Denoiser& model, const std::vector<double>& x_t,
                                   const Conditioning& cond, std::size_t t) {
    if (x_t.size() != model.state_dim()) {
        throw std::invalid_argument("predict_noise: x_t dimension mismatch");
    }
    if (cond.values.size() != model.cond_dim()) {
        throw std::invalid_argument("predict_noise: conditioning dimension mismatch");
    }
    std::vector<double> input;
    input.reserve(model.input_dim());
    input.insert(input.end(), x_t.begin(), x_t.end());
    input.insert(input.end(), cond.values.begin(), cond.values.end());
    const auto emb = timestep_embedding(t, model.embed_dim, model.schedule_ref.num_steps);
    input.insert(input.end(), emb.begin(), emb.end());
    return input;
}

}  // namespace

std::vector<double> predict_noise(const Denoiser& model, const std::vector<double>& x_t,
                                  const Conditioning& cond, std::size_t t) {
    if (t < 1 || t > model.schedule_ref.num_steps) {
        throw std::invalid_argument("predict_noise: t out of [1, T]");
    }
    return mlp_forward(model.net, assemble_input(model, x_t, cond, t));
}

double denoising_loss(const Denoiser& model, const NoiseSchedule& schedule,
                      const std::vector<Window>& normalized_batch, Rng& rng,
                      Gradients* grads) {
    if (normalized_batch.empty()) {
        throw std::invalid_argument("denoising_loss: empty batch");
    }
    const double inv_b = 1.0 / static_cast<double>(normalized_batch.size());
    double loss = 0.0;
    ForwardCache cache;
    for (const auto& w : normalized_batch) {
        const std::size_t t = 1 + static_cast<std::size_t>(
                                      rng.next_below(schedule.num_steps));
        const auto z = rng.normal_vector(model.state_dim());
        const auto x_t = forward_noise(schedule, w.target.values, t, z);
        const auto cond = build_conditioning(w, model.use_history);
        const auto input = assemble_input(model, x_t, cond, t);
        const auto out = mlp_forward(model.net, input, grads ? &cache : nullptr);

        std::vector<double> dout(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double r = out[i] - z[i];
            loss += r * r * inv_b;
            dout[i] = 2.0 * r * inv_b;
        }
        if (grads) mlp_backward(model.net, cache, dout, *grads);
    }
    return loss;
}

namespace {

struct ValExample {
    std::size_t window;  // index into the validation window vector
    std::size_t t;
    std::vector<double> z;
};

double validation_loss(const Denoiser& model, const NoiseSchedule& schedule,
                       const std::vector<Window>& val_windows,
                       const std::vector<ValExample>& examples) {
    if (examples.empty()) return 0.0;
    double loss = 0.0;
    for (const auto& ex : examples) {
        const auto& w = val_windows[ex.window];
        const auto x_t = forward_noise(schedule, w.target.values, ex.t, ex.z);
        const auto cond = build_conditioning(w, model.use_history);
        const auto out = predict_noise(model, x_t, cond, ex.t);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double r = out[i] - ex.z[i];
            loss += r * r;
        }
    }
    return loss / static_cast<double>(examples.size());
}

}  // namespace

std::pair<Denoiser, TrainReport> train_denoiser(const DenoiserConfig& cfg,
                                                const Dataset& ds,
                                                const NoiseSchedule& schedule,
                                                Rng& rng) {
    const auto train_windows = ds.normalized_subset(ds.train_indices());
    const auto val_windows = ds.normalized_subset(ds.val_indices());
    if (train_windows.empty()) throw TrainError("train_denoiser: empty training split");

    Denoiser model = make_denoiser(cfg, ds, schedule.params, rng);

    TrainReport report;
    report.seed = rng.seed();

    // Fixed validation noise so epoch-to-epoch comparisons are exact.
    std::vector<ValExample> val_examples;
    for (std::size_t i = 0; i < val_windows.size(); ++i) {
        ValExample ex;
        ex.window = i;
        ex.t = 1 + static_cast<std::size_t>(rng.next_below(schedule.num_steps));
        ex.z = rng.normal_vector(model.state_dim());
        val_examples.push_back(std::move(ex));
    }

    OptimState opt = make_optim_state(model.net, cfg.learning_rate, cfg.weight_decay);
    const std::size_t batch = cfg.batch_size == 0 ? 1 : cfg.batch_size;

    Mlp best_net = model.net;
    double best_val = validation_loss(model, schedule, val_windows, val_examples);
    bool have_val = !val_examples.empty();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = shuffled_indices(train_windows.size(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            std::vector<Window> minibatch;
            minibatch.reserve(end - start);
            for (std::size_t k = start; k < end; ++k) {
                minibatch.push_back(train_windows[order[k]]);
            }
            Gradients grads = zero_gradients(model.net);
            const double loss = denoising_loss(model, schedule, minibatch, rng, &grads);
            if (!std::isfinite(loss)) {
                std::ostringstream os;
                os << "train_denoiser: non-finite loss at epoch " << (epoch + 1);
                throw TrainError(os.str());
            }
            adamw_step(opt, model.net, grads);
            epoch_loss += loss;
            ++batches;
        }
        epoch_loss /= static_cast<double>(batches);
        const double val =
            have_val ? validation_loss(model, schedule, val_windows, val_examples)
                     : epoch_loss;
        if (!std::isfinite(val)) {
            std::ostringstream os;
            os << "train_denoiser: non-finite validation loss at epoch " << (epoch + 1);
            throw TrainError(os.str());
        }
        report.epoch_loss.push_back(epoch_loss);
        report.epoch_val_loss.push_back(val);
        if (val < best_val) {
            best_val = val;
            best_net = model.net;
        }
    }

    if (cfg.epochs > 0) model.net = best_net;
    report.final_val_loss = best_val;
    report.epochs_run = cfg.epochs;
    return {std::move(model), std::move(report)};
}

}  // namespace semguide
