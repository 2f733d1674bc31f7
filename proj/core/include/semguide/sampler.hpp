#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "semguide/denoiser.hpp"
#include "semguide/rng.hpp"
#include "semguide/schedule.hpp"
#include "semguide/score_net.hpp"

namespace semguide {

/// eps = f(x_t, t); the model-and-conditioning adapter or a test stub.
using NoiseFn =
    std::function<std::vector<double>(const std::vector<double>&, std::size_t)>;

/// s = f(denoised_state, t_of_state); t is the noise level of the state
/// being scored (t-1 inside the reverse loop at step t).
using ScoreFn = std::function<double(const std::vector<double>&, std::size_t)>;

/// N candidate latent states at one reverse step, with scores and
/// normalized weights.
struct ParticleSet {
    std::vector<std::vector<double>> states;    // x_t per particle
    std::vector<std::vector<double>> denoised;  // x~_{t-1} candidates
    std::vector<double> scores;
    std::vector<double> weights;
    std::size_t step = 0;
};

struct SamplerStep {
    std::size_t t = 0;
    std::vector<double> scores;
    std::vector<double> weights;
    double ess = 0.0;          // 1 / sum(w^2)
    double center_norm = 0.0;  // L2 norm of the weighted center
    double center_mean_gap = 0.0;  // Linf gap between center and plain mean
};

struct SamplerTrace {
    std::size_t particle_count = 0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::vector<SamplerStep> steps;  // length T when tracing is enabled
};

/// Called after each reverse step with the updated particle set (states
/// already re-noised around the center) and the step's weighted center.
using SemguideObserver =
    std::function<void(std::size_t t, const ParticleSet&, const std::vector<double>&)>;
/// Called after each reverse step of the plain sampler with x_{t-1}.
using DdpmObserver = std::function<void(std::size_t t, const std::vector<double>&)>;

/// Vanilla ancestral sampling: x_T ~ N(0,I), then per step
/// x_{t-1} = denoise_estimate(x_t, eps, t) + sigma_t * z.
std::vector<double> ddpm_sample(const NoiseFn& noise_fn, const NoiseSchedule& schedule,
                                std::size_t dim, Rng& rng,
                                const DdpmObserver& observer = nullptr);
std::vector<double> ddpm_sample(const Denoiser& model, const NoiseSchedule& schedule,
                                const Conditioning& cond, Rng& rng);

/// Elementwise median over num_samples independent ancestral samples
/// (mean of the two middle order statistics for even counts).
std::vector<double> median_forecast(const NoiseFn& noise_fn,
                                    const NoiseSchedule& schedule, std::size_t dim,
                                    std::size_t num_samples, Rng& rng);
std::vector<double> median_forecast(const Denoiser& model, const NoiseSchedule& schedule,
                                    const Conditioning& cond, std::size_t num_samples,
                                    Rng& rng);

/// w_i = s_i / sum(s). Scores must be nonnegative, finite, not all zero.
std::vector<double> importance_weights(const std::vector<double>& scores);

/// Convex combination sum_i w_i * x_i, accumulated in particle order.
std::vector<double> weighted_center(const std::vector<std::vector<double>>& denoised,
                                    const std::vector<double>& weights);

struct SemguideOptions {
    std::size_t num_particles = 10;
    bool trace = false;
    /// Ablation: multinomial-resample denoised candidates by weight instead
    /// of collapsing every particle onto the weighted center. Deviates from
    /// the reference procedure; off by default.
    bool resample = false;
};

/// Stepwise importance-reweighted particle sampler. Per reverse step:
/// predict noise and denoise each particle, score the candidates against the
/// covariates, normalize scores into weights, form the weighted center, and
/// re-noise all particles around it with sigma_t. Returns the final weighted
/// center x-bar_0 (sigma_1 = 0, so no noise is injected on the way out).
std::pair<std::vector<double>, SamplerTrace> semguide_sample(
    const NoiseFn& noise_fn, const ScoreFn& score_fn, const NoiseSchedule& schedule,
    std::size_t dim, const SemguideOptions& options, Rng& rng,
    const SemguideObserver& observer = nullptr);
std::pair<std::vector<double>, SamplerTrace> semguide_sample(
    const Denoiser& model, const ScoreNet& score_model, const NoiseSchedule& schedule,
    const Conditioning& cond, std::size_t num_particles, Rng& rng, bool trace = false);

/// Adapters used by the forecast pipeline (and handy in tests).
NoiseFn make_noise_fn(const Denoiser& model, const Conditioning& cond);
ScoreFn make_score_fn(const ScoreNet& model, const std::vector<double>& covariates);

/// Trace CSV: `t,particle,score,weight,ess`.
void trace_to_csv(const std::string& path, const SamplerTrace& trace);

}  // namespace semguide
