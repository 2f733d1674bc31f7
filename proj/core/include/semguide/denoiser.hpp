#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "semguide/data.hpp"
#include "semguide/mlp.hpp"
#include "semguide/rng.hpp"
#include "semguide/schedule.hpp"
#include "semguide/train_report.hpp"

namespace semguide {

struct DenoiserConfig {
    std::vector<std::size_t> hidden_dims = {256, 256};
    std::size_t embed_dim = 64;
    std::size_t epochs = 500;
    double learning_rate = 1e-4;
    double weight_decay = 1e-5;
    std::size_t batch_size = 64;
    bool use_history = true;
};

/// Conditioning vector for the denoiser: [flatten(covariates); flatten(history)],
/// covariates first. covariate_len marks the boundary so samplers can hand the
/// covariate block alone to the score network.
struct Conditioning {
    std::vector<double> values;
    std::size_t covariate_len = 0;

    std::vector<double> covariate_part() const {
        return {values.begin(), values.begin() + static_cast<std::ptrdiff_t>(covariate_len)};
    }
};

Conditioning build_conditioning(const Window& normalized_window, bool use_history);

/// Conditional noise-prediction network: input [x_t; cond; embed(t)],
/// output one value per x_t component.
struct Denoiser {
    Mlp net;
    std::size_t horizon = 0;
    std::size_t target_channels = 0;
    std::size_t covariate_channels = 0;
    std::size_t history_len = 0;
    std::size_t embed_dim = 0;
    bool use_history = true;
    ScheduleParams schedule_ref;

    std::size_t state_dim() const { return horizon * target_channels; }
    std::size_t cond_dim() const {
        return horizon * covariate_channels +
               (use_history ? history_len * target_channels : 0);
    }
    std::size_t input_dim() const { return state_dim() + cond_dim() + embed_dim; }
};

Denoiser make_denoiser(const DenoiserConfig& cfg, const Dataset& ds,
                       const ScheduleParams& schedule, Rng& rng);

std::vector<double> predict_noise(const Denoiser& model, const std::vector<double>& x_t,
                                  const Conditioning& cond, std::size_t t);

/// Mean over the batch of ||z - eps_theta(x_t, cond, t)||^2 with t uniform in
/// [1, T] and z standard normal, drawn per example. Fills grads when non-null.
double denoising_loss(const Denoiser& model, const NoiseSchedule& schedule,
                      const std::vector<Window>& normalized_batch, Rng& rng,
                      Gradients* grads);

/// Trains on the dataset's train split with AdamW, tracking a fixed-noise
/// validation loss each epoch; returns the best-validation parameters.
std::pair<Denoiser, TrainReport> train_denoiser(const DenoiserConfig& cfg,
                                                const Dataset& ds,
                                                const NoiseSchedule& schedule,
                                                Rng& rng);

}  // namespace semguide
