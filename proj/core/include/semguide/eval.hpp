#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semguide/data.hpp"
#include "semguide/denoiser.hpp"
#include "semguide/score_net.hpp"
#include "semguide/synthetic.hpp"

namespace semguide {

/// Mean over all elements of squared / absolute error.
double mse(const std::vector<double>& pred, const std::vector<double>& truth);
double mae(const std::vector<double>& pred, const std::vector<double>& truth);

/// Pooled over windows: mean over all horizon x channel x window elements.
double mse(const std::vector<std::vector<double>>& pred,
           const std::vector<std::vector<double>>& truth);
double mae(const std::vector<std::vector<double>>& pred,
           const std::vector<std::vector<double>>& truth);

/// Rank-statistic AUC (Mann-Whitney, ties counted half). labels in {0,1}.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Fraction of forecasts (raw units) whose nearest oracle mode matches the
/// covariate-specified regime. Ties break toward the lower regime index.
double regime_accuracy(const std::vector<std::vector<double>>& forecasts_raw,
                       const std::vector<Window>& windows,
                       const SyntheticOracle& oracle);

struct MetricsReport {
    std::string method;
    std::size_t sample_count = 0;  // N used by the sampler
    std::size_t num_windows = 0;
    double mse_norm = 0.0;
    double mae_norm = 0.0;
    double mse_raw = 0.0;
    double mae_raw = 0.0;
    std::vector<double> per_window_mse;
    std::vector<double> per_window_mae;
    std::optional<double> regime_accuracy;
    std::optional<double> mean_consistency_score;
};

/// Forecast-vs-truth metrics in normalized space plus exact denormalized
/// counterparts. Forecasts are given in normalized units, one per window
/// index in `window_indices`.
MetricsReport compute_metrics(const Dataset& ds,
                              const std::vector<std::size_t>& window_indices,
                              const std::vector<std::vector<double>>& forecasts_norm,
                              const std::string& method, std::size_t sample_count,
                              const ScoreNet* score_model = nullptr);

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsReport>& reports);

struct SweepCell {
    std::string method;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double mse = 0.0;
    double mae = 0.0;
    double wall_seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // every (method, n, seed) combination
};

/// Forecasts the test split for each (method, N, seed) cell and reports
/// pooled metrics. Per-window seeds are derived from (seed, N, window), so
/// results are independent of evaluation order and thread count, and both
/// methods share the exact RNG stream at equal (seed, N).
SweepResult sample_efficiency_sweep(const Denoiser& model, const ScoreNet& score_model,
                                    const NoiseSchedule& schedule, const Dataset& ds,
                                    const std::vector<std::size_t>& n_grid,
                                    const std::vector<std::uint64_t>& seeds,
                                    std::size_t threads = 0);

/// `method,n,seed,mse,mae,wall_s`.
void write_sweep_csv(const std::string& path, const SweepResult& result);

/// Forecast one window (normalized units) with the given method and N.
std::vector<double> forecast_window(const Denoiser& model, const ScoreNet* score_model,
                                    const NoiseSchedule& schedule, const Window& normalized,
                                    const std::string& method, std::size_t n, Rng& rng);

}  // namespace semguide
