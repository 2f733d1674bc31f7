#include "semguide/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "semguide/csv.hpp"
#include "semguide/errors.hpp"
#include "semguide/sampler.hpp"

namespace semguide {

namespace {

void check_same_shape(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("metrics: shape mismatch");
    }
}

}  // namespace

double mse(const std::vector<double>& pred, const std::vector<double>& truth) {
    check_same_shape(pred, truth);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - truth[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
    check_same_shape(pred, truth);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        acc += std::abs(pred[i] - truth[i]);
    }
    return acc / static_cast<double>(pred.size());
}

namespace {

double pooled_metric(const std::vector<std::vector<double>>& pred,
                     const std::vector<std::vector<double>>& truth, bool squared) {
    if (pred.size() != truth.size() || pred.empty()) {
        throw std::invalid_argument("metrics: window count mismatch");
    }
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t w = 0; w < pred.size(); ++w) {
        check_same_shape(pred[w], truth[w]);
        for (std::size_t i = 0; i < pred[w].size(); ++i) {
            const double d = pred[w][i] - truth[w][i];
            acc += squared ? d * d : std::abs(d);
        }
        count += pred[w].size();
    }
    return acc / static_cast<double>(count);
}

}  // namespace

double mse(const std::vector<std::vector<double>>& pred,
           const std::vector<std::vector<double>>& truth) {
    return pooled_metric(pred, truth, true);
}

double mae(const std::vector<std::vector<double>>& pred,
           const std::vector<std::vector<double>>& truth) {
    return pooled_metric(pred, truth, false);
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw std::invalid_argument("auc: scores/labels mismatch");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tied score groups.
    std::vector<double> rank(scores.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double pos_rank_sum = 0.0;
    std::size_t pos = 0, neg = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] == 1) {
            pos_rank_sum += rank[k];
            ++pos;
        } else {
            ++neg;
        }
    }
    if (pos == 0 || neg == 0) throw std::invalid_argument("auc: need both classes");
    const double u = pos_rank_sum - static_cast<double>(pos) *
                                        (static_cast<double>(pos) + 1.0) / 2.0;
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

double regime_accuracy(const std::vector<std::vector<double>>& forecasts_raw,
                       const std::vector<Window>& windows,
                       const SyntheticOracle& oracle) {
    if (forecasts_raw.size() != windows.size() || windows.empty()) {
        throw std::invalid_argument("regime_accuracy: forecast/window count mismatch");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (windows[i].regime_label < 0) {
            throw std::invalid_argument("regime_accuracy: window lacks a regime label");
        }
        const double intensity = covariate_intensity(windows[i]);
        const std::size_t nearest = oracle.nearest_regime(forecasts_raw[i], intensity);
        if (nearest == static_cast<std::size_t>(windows[i].regime_label)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(windows.size());
}

MetricsReport compute_metrics(const Dataset& ds,
                              const std::vector<std::size_t>& window_indices,
                              const std::vector<std::vector<double>>& forecasts_norm,
                              const std::string& method, std::size_t sample_count,
                              const ScoreNet* score_model) {
    if (window_indices.size() != forecasts_norm.size() || window_indices.empty()) {
        throw std::invalid_argument("compute_metrics: forecast/index count mismatch");
    }
    MetricsReport rep;
    rep.method = method;
    rep.sample_count = sample_count;
    rep.num_windows = window_indices.size();

    std::vector<std::vector<double>> truth_norm, pred_raw, truth_raw;
    std::vector<std::vector<double>> forecasts_raw_for_oracle;
    std::vector<Window> raw_windows;
    double consistency_sum = 0.0;

    for (std::size_t k = 0; k < window_indices.size(); ++k) {
        const std::size_t idx = window_indices[k];
        const Window normalized = ds.normalized(idx);
        truth_norm.push_back(normalized.target.values);
        rep.per_window_mse.push_back(mse(forecasts_norm[k], normalized.target.values));
        rep.per_window_mae.push_back(mae(forecasts_norm[k], normalized.target.values));

        const auto raw_forecast =
            ds.target_norm.invert_flat(forecasts_norm[k], ds.horizon);
        pred_raw.push_back(raw_forecast);
        truth_raw.push_back(ds.windows[idx].target.values);
        forecasts_raw_for_oracle.push_back(raw_forecast);
        raw_windows.push_back(ds.windows[idx]);

        if (score_model) {
            consistency_sum += score(
                *score_model, forecasts_norm[k], normalized.covariates.values,
                score_model->use_timestep ? std::optional<std::size_t>(0) : std::nullopt);
        }
    }

    rep.mse_norm = mse(forecasts_norm, truth_norm);
    rep.mae_norm = mae(forecasts_norm, truth_norm);
    rep.mse_raw = mse(pred_raw, truth_raw);
    rep.mae_raw = mae(pred_raw, truth_raw);
    if (score_model) {
        rep.mean_consistency_score =
            consistency_sum / static_cast<double>(window_indices.size());
    }
    if (ds.oracle && ds.target_channels == 1) {
        rep.regime_accuracy =
            regime_accuracy(forecasts_raw_for_oracle, raw_windows, *ds.oracle);
    }
    return rep;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsReport>& reports) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("write_metrics_csv: cannot write " + path);
    out << "method,n,num_windows,mse,mae,mse_raw,mae_raw,regime_accuracy,"
           "mean_consistency_score\n";
    for (const auto& r : reports) {
        out << r.method << ',' << r.sample_count << ',' << r.num_windows << ','
            << format_double(r.mse_norm) << ',' << format_double(r.mae_norm) << ','
            << format_double(r.mse_raw) << ',' << format_double(r.mae_raw) << ',';
        if (r.regime_accuracy) out << format_double(*r.regime_accuracy);
        out << ',';
        if (r.mean_consistency_score) out << format_double(*r.mean_consistency_score);
        out << "\n";
    }
}

std::vector<double> forecast_window(const Denoiser& model, const ScoreNet* score_model,
                                    const NoiseSchedule& schedule,
                                    const Window& normalized, const std::string& method,
                                    std::size_t n, Rng& rng) {
    const auto cond = build_conditioning(normalized, model.use_history);
    if (method == "baseline") {
        return median_forecast(model, schedule, cond, n, rng);
    }
    if (method == "semguide") {
        if (!score_model) {
            throw std::invalid_argument("forecast_window: semguide needs a score network");
        }
        return semguide_sample(model, *score_model, schedule, cond, n, rng).first;
    }
    throw ConfigError("unknown method '" + method + "' (valid: baseline, semguide, both)");
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers; results land in
/// caller-owned slots so ordering is fixed regardless of scheduling.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

SweepResult sample_efficiency_sweep(const Denoiser& model, const ScoreNet& score_model,
                                    const NoiseSchedule& schedule, const Dataset& ds,
                                    const std::vector<std::size_t>& n_grid,
                                    const std::vector<std::uint64_t>& seeds,
                                    std::size_t threads) {
    if (n_grid.empty() || seeds.empty()) {
        throw std::invalid_argument("sample_efficiency_sweep: empty grid or seeds");
    }
    const auto test_idx = ds.test_indices();
    if (test_idx.empty()) throw DataError("sample_efficiency_sweep: empty test split");
    if (threads == 0) threads = std::thread::hardware_concurrency();

    std::vector<Window> normalized;
    std::vector<std::vector<double>> truth_norm;
    for (auto idx : test_idx) {
        normalized.push_back(ds.normalized(idx));
        truth_norm.push_back(normalized.back().target.values);
    }

    SweepResult result;
    for (const char* method : {"baseline", "semguide"}) {
        for (std::size_t n : n_grid) {
            for (std::uint64_t seed : seeds) {
                const auto start = std::chrono::steady_clock::now();
                std::vector<std::vector<double>> forecasts(test_idx.size());
                parallel_for(test_idx.size(), threads, [&](std::size_t k) {
                    Rng rng(derive_seed(seed, n, k));
                    forecasts[k] = forecast_window(model, &score_model, schedule,
                                                   normalized[k], method, n, rng);
                });
                SweepCell cell;
                cell.method = method;
                cell.n = n;
                cell.seed = seed;
                cell.mse = mse(forecasts, truth_norm);
                cell.mae = mae(forecasts, truth_norm);
                cell.wall_seconds = std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - start)
                                        .count();
                result.cells.push_back(std::move(cell));
            }
        }
    }
    return result;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("write_sweep_csv: cannot write " + path);
    out << "method,n,seed,mse,mae,wall_s\n";
    for (const auto& c : result.cells) {
        out << c.method << ',' << c.n << ',' << c.seed << ',' << format_double(c.mse)
            << ',' << format_double(c.mae) << ',' << format_double(c.wall_seconds)
            << "\n";
    }
}

}  // namespace semguide
