#include "semguide/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "semguide/csv.hpp"
#include "semguide/errors.hpp"

namespace semguide {

std::vector<double> ddpm_sample(const NoiseFn& noise_fn, const NoiseSchedule& schedule,
                                std::size_t dim, Rng& rng,
                                const DdpmObserver& observer) {
    std::vector<double> x = rng.normal_vector(dim);
    for (std::size_t t = schedule.num_steps; t >= 1; --t) {
        const auto eps = noise_fn(x, t);
        x = denoise_estimate(schedule, x, eps, t);
        const double sigma = schedule.sigma_at(t);
        if (sigma > 0.0) {
            for (std::size_t i = 0; i < dim; ++i) x[i] += sigma * rng.normal();
        }
        if (observer) observer(t, x);
    }
    return x;
}

std::vector<double> ddpm_sample(const Denoiser& model, const NoiseSchedule& schedule,
                                const Conditioning& cond, Rng& rng) {
    return ddpm_sample(make_noise_fn(model, cond), schedule, model.state_dim(), rng);
}

std::vector<double> median_forecast(const NoiseFn& noise_fn,
                                    const NoiseSchedule& schedule, std::size_t dim,
                                    std::size_t num_samples, Rng& rng) {
    if (num_samples == 0) {
        throw std::invalid_argument("median_forecast: num_samples must be >= 1");
    }
    std::vector<std::vector<double>> samples;
    samples.reserve(num_samples);
    for (std::size_t k = 0; k < num_samples; ++k) {
        samples.push_back(ddpm_sample(noise_fn, schedule, dim, rng));
    }
    std::vector<double> out(dim);
    std::vector<double> column(num_samples);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t k = 0; k < num_samples; ++k) column[k] = samples[k][i];
        std::sort(column.begin(), column.end());
        const std::size_t mid = num_samples / 2;
        out[i] = (num_samples % 2 == 1) ? column[mid]
                                        : 0.5 * (column[mid - 1] + column[mid]);
    }
    return out;
}

std::vector<double> median_forecast(const Denoiser& model, const NoiseSchedule& schedule,
                                    const Conditioning& cond, std::size_t num_samples,
                                    Rng& rng) {
    return median_forecast(make_noise_fn(model, cond), schedule, model.state_dim(),
                           num_samples, rng);
}

std::vector<double> importance_weights(const std::vector<double>& scores) {
    if (scores.empty()) throw std::invalid_argument("importance_weights: empty scores");
    double sum = 0.0;
    for (double s : scores) {
        if (!std::isfinite(s) || s < 0.0) {
            throw std::invalid_argument("importance_weights: scores must be finite and >= 0");
        }
        sum += s;
    }
    if (sum <= 0.0) {
        throw std::invalid_argument("importance_weights: all scores are zero");
    }
    std::vector<double> w(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) w[i] = scores[i] / sum;
    return w;
}

std::vector<double> weighted_center(const std::vector<std::vector<double>>& denoised,
                                    const std::vector<double>& weights) {
    if (denoised.size() != weights.size() || denoised.empty()) {
        throw std::invalid_argument("weighted_center: length mismatch");
    }
    std::vector<double> center(denoised.front().size(), 0.0);
    for (std::size_t i = 0; i < denoised.size(); ++i) {
        if (denoised[i].size() != center.size()) {
            throw std::invalid_argument("weighted_center: particle dimension mismatch");
        }
        const double w = weights[i];
        for (std::size_t d = 0; d < center.size(); ++d) center[d] += w * denoised[i][d];
    }
    return center;
}

std::pair<std::vector<double>, SamplerTrace> semguide_sample(
    const NoiseFn& noise_fn, const ScoreFn& score_fn, const NoiseSchedule& schedule,
    std::size_t dim, const SemguideOptions& options, Rng& rng,
    const SemguideObserver& observer) {
    const std::size_t n = options.num_particles;
    if (n == 0) throw std::invalid_argument("semguide_sample: num_particles must be >= 1");

    const auto start_time = std::chrono::steady_clock::now();

    SamplerTrace trace;
    trace.particle_count = n;
    trace.seed = rng.seed();

    ParticleSet set;
    set.states.resize(n);
    set.denoised.assign(n, std::vector<double>(dim, 0.0));
    set.scores.assign(n, 0.0);
    set.weights.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) set.states[i] = rng.normal_vector(dim);

    std::vector<double> center(dim, 0.0);
    for (std::size_t t = schedule.num_steps; t >= 1; --t) {
        set.step = t;
        for (std::size_t i = 0; i < n; ++i) {
            const auto eps = noise_fn(set.states[i], t);
            set.denoised[i] = denoise_estimate(schedule, set.states[i], eps, t);
            set.scores[i] = score_fn(set.denoised[i], t - 1);
        }
        set.weights = importance_weights(set.scores);
        center = weighted_center(set.denoised, set.weights);

        const double sigma = schedule.sigma_at(t);
        if (options.resample && t > 1) {
            // Ablation path: multinomial draw over candidates by weight.
            std::vector<std::vector<double>> picked(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double u = rng.uniform();
                double acc = 0.0;
                std::size_t pick = n - 1;
                for (std::size_t j = 0; j < n; ++j) {
                    acc += set.weights[j];
                    if (u < acc) {
                        pick = j;
                        break;
                    }
                }
                picked[i] = set.denoised[pick];
            }
            for (std::size_t i = 0; i < n; ++i) {
                set.states[i] = std::move(picked[i]);
                if (sigma > 0.0) {
                    for (std::size_t d = 0; d < dim; ++d) {
                        set.states[i][d] += sigma * rng.normal();
                    }
                }
            }
        } else {
            // Reference path: every particle collapses onto the weighted
            // center, then diversifies with fresh sigma_t noise.
            for (std::size_t i = 0; i < n; ++i) {
                set.states[i] = center;
                if (sigma > 0.0) {
                    for (std::size_t d = 0; d < dim; ++d) {
                        set.states[i][d] += sigma * rng.normal();
                    }
                }
            }
        }

        if (options.trace) {
            SamplerStep step;
            step.t = t;
            step.scores = set.scores;
            step.weights = set.weights;
            double w2 = 0.0;
            for (double w : set.weights) w2 += w * w;
            step.ess = 1.0 / w2;
            double norm2 = 0.0;
            for (double v : center) norm2 += v * v;
            step.center_norm = std::sqrt(norm2);
            double gap = 0.0;
            const double inv_n = 1.0 / static_cast<double>(n);
            for (std::size_t d = 0; d < dim; ++d) {
                double mean = 0.0;
                for (std::size_t i = 0; i < n; ++i) mean += set.denoised[i][d];
                mean *= inv_n;
                gap = std::max(gap, std::abs(center[d] - mean));
            }
            step.center_mean_gap = gap;
            trace.steps.push_back(std::move(step));
        }
        if (observer) observer(t, set, center);
    }

    trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
            .count();
    return {std::move(center), std::move(trace)};
}

std::pair<std::vector<double>, SamplerTrace> semguide_sample(
    const Denoiser& model, const ScoreNet& score_model, const NoiseSchedule& schedule,
    const Conditioning& cond, std::size_t num_particles, Rng& rng, bool trace) {
    if (score_model.state_len != model.state_dim()) {
        throw std::invalid_argument(
            "semguide_sample: score network state width does not match the denoiser");
    }
    SemguideOptions options;
    options.num_particles = num_particles;
    options.trace = trace;
    return semguide_sample(make_noise_fn(model, cond),
                           make_score_fn(score_model, cond.covariate_part()), schedule,
                           model.state_dim(), options, rng);
}

NoiseFn make_noise_fn(const Denoiser& model, const Conditioning& cond) {
    return [&model, cond](const std::vector<double>& x_t, std::size_t t) {
        return predict_noise(model, x_t, cond, t);
    };
}

ScoreFn make_score_fn(const ScoreNet& model, const std::vector<double>& covariates) {
    return [&model, covariates](const std::vector<double>& state, std::size_t t) {
        return score(model, state, covariates,
                     model.use_timestep ? std::optional<std::size_t>(t) : std::nullopt);
    };
}

void trace_to_csv(const std::string& path, const SamplerTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("trace_to_csv: cannot write " + path);
    out << "t,particle,score,weight,ess\n";
    for (const auto& step : trace.steps) {
        for (std::size_t i = 0; i < step.scores.size(); ++i) {
            out << step.t << ',' << i << ',' << format_double(step.scores[i]) << ','
                << format_double(step.weights[i]) << ',' << format_double(step.ess)
                << "\n";
        }
    }
}

}  // namespace semguide
