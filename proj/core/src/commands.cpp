#include "semguide/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "semguide/checkpoint.hpp"
#include "semguide/csv.hpp"
#include "semguide/errors.hpp"
#include "semguide/eval.hpp"
#include "semguide/sampler.hpp"

namespace semguide {

namespace {

// Fixed stream labels so every command derives the same per-phase RNG from
// the run seed, independent of which commands ran before it.
constexpr std::uint64_t kStreamSynth = 11;
constexpr std::uint64_t kStreamDenoiser = 22;
constexpr std::uint64_t kStreamScore = 33;

void ensure_out_dir(const RunPaths& paths) {
    std::filesystem::create_directories(paths.out_dir);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << text;
}

void append_run_info(const RunPaths& paths, const std::string& command,
                     double wall_seconds) {
    std::ofstream out(paths.run_info(), std::ios::binary | std::ios::app);
    out << command << " wall_s=" << wall_seconds << "\n";
}

void echo_config(const RunConfig& cfg, const RunPaths& paths) {
    write_text(paths.resolved_config(), resolved_config_json(cfg));
}

Dataset load_dataset_or_fail(const RunPaths& paths) {
    if (!std::filesystem::exists(paths.dataset())) {
        throw DataError("dataset not found at " + paths.dataset() +
                        "; run the `synth` command first");
    }
    return load_dataset(paths.dataset());
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

}  // namespace

RunPaths run_paths(const RunConfig& cfg) { return RunPaths{resolve_output_dir(cfg)}; }

void cmd_synth(const RunConfig& cfg) {
    Timer timer;
    const RunPaths paths = run_paths(cfg);
    ensure_out_dir(paths);
    echo_config(cfg, paths);

    Dataset ds;
    if (cfg.dataset.kind == "synthetic") {
        const std::uint64_t seed = cfg.dataset.synthetic.seed != 0
                                       ? cfg.dataset.synthetic.seed
                                       : derive_seed(cfg.seed, kStreamSynth);
        Rng rng(seed);
        ds = synth_generate(cfg.dataset.synthetic, rng);
    } else {
        const auto& cc = cfg.dataset.csv;
        const RawSeries series = load_csv(cc.path, cc.schema);
        for (const auto& r : series.rejected) {
            std::cerr << "[synth] rejected row " << r.line_number << ": " << r.reason
                      << "\n";
        }
        auto windows = make_windows(series, cc.history_len, cc.horizon, cc.stride);
        ds = make_dataset(std::move(windows));
    }
    save_dataset(paths.dataset(), ds);
    append_run_info(paths, "synth", timer.seconds());
}

void cmd_train(const RunConfig& cfg, TrainSelection selection) {
    Timer timer;
    const RunPaths paths = run_paths(cfg);
    ensure_out_dir(paths);
    echo_config(cfg, paths);

    const Dataset ds = load_dataset_or_fail(paths);
    const NoiseSchedule schedule = make_schedule(cfg.schedule);

    if (selection != TrainSelection::score_only) {
        Rng rng(derive_seed(cfg.seed, kStreamDenoiser));
        auto [model, report] = train_denoiser(cfg.denoiser, ds, schedule, rng);
        save_denoiser(paths.denoiser_checkpoint(), model);
        write_train_log(paths.denoiser_log(), report);
    }
    if (selection != TrainSelection::denoiser_only) {
        Rng rng(derive_seed(cfg.seed, kStreamScore));
        const auto train_windows = ds.normalized_subset(ds.train_indices());
        const auto pairs = build_pairs(train_windows, schedule,
                                       cfg.scorenet.negatives_per_positive, rng);
        auto [model, report] =
            train_score_net(cfg.scorenet, pairs, schedule.params, rng);
        save_score_net(paths.scorenet_checkpoint(), model);
        write_train_log(paths.scorenet_log(), report);
    }
    append_run_info(paths, "train", timer.seconds());
}

namespace {

std::vector<std::string> methods_for(const SamplerConfig& sampler) {
    if (sampler.method == "both") return {"baseline", "semguide"};
    return {sampler.method};
}

void check_model_matches(const Denoiser& model, const Dataset& ds) {
    if (model.horizon != ds.horizon || model.target_channels != ds.target_channels ||
        model.covariate_channels != ds.covariate_channels ||
        model.history_len != ds.history_len) {
        throw DataError("checkpoint shapes do not match the dataset");
    }
}

}  // namespace

void cmd_forecast(const RunConfig& cfg) {
    Timer timer;
    const RunPaths paths = run_paths(cfg);
    ensure_out_dir(paths);
    echo_config(cfg, paths);

    const Dataset ds = load_dataset_or_fail(paths);
    const Denoiser model = load_denoiser(paths.denoiser_checkpoint());
    check_model_matches(model, ds);
    const NoiseSchedule schedule = make_schedule(model.schedule_ref);

    const auto methods = methods_for(cfg.sampler);
    ScoreNet score_model;
    bool have_score = false;
    for (const auto& m : methods) {
        if (m == "semguide") {
            score_model = load_score_net(paths.scorenet_checkpoint());
            if (score_model.state_len != model.state_dim()) {
                throw DataError("score checkpoint does not match the denoiser shape");
            }
            have_score = true;
        }
    }

    const auto test_idx = ds.test_indices();
    if (test_idx.empty()) throw DataError("cmd_forecast: empty test split");

    std::ofstream out(paths.forecasts(), std::ios::binary);
    if (!out) throw DataError("cannot write " + paths.forecasts());
    out << "method,window,n,seed";
    const std::size_t dim = ds.horizon * ds.target_channels;
    for (std::size_t d = 0; d < dim; ++d) out << ",v" << d;
    out << "\n";

    bool trace_written = false;
    for (const auto& method : methods) {
        for (std::size_t k = 0; k < test_idx.size(); ++k) {
            const Window normalized = ds.normalized(test_idx[k]);
            Rng rng(derive_seed(cfg.seed, cfg.sampler.n, k));
            std::vector<double> forecast;
            if (method == "semguide" && cfg.sampler.trace && !trace_written) {
                const auto cond = build_conditioning(normalized, model.use_history);
                auto [value, trace] = semguide_sample(model, score_model, schedule, cond,
                                                      cfg.sampler.n, rng, /*trace=*/true);
                trace_to_csv(paths.trace(), trace);
                trace_written = true;
                forecast = std::move(value);
            } else {
                forecast = forecast_window(model, have_score ? &score_model : nullptr,
                                           schedule, normalized, method, cfg.sampler.n,
                                           rng);
            }
            out << method << ',' << k << ',' << cfg.sampler.n << ',' << cfg.seed;
            for (double v : forecast) out << ',' << format_double(v);
            out << "\n";
        }
    }
    out.close();
    append_run_info(paths, "forecast", timer.seconds());
}

void cmd_eval(const RunConfig& cfg) {
    Timer timer;
    const RunPaths paths = run_paths(cfg);
    ensure_out_dir(paths);
    echo_config(cfg, paths);

    const Dataset ds = load_dataset_or_fail(paths);
    if (!std::filesystem::exists(paths.forecasts())) {
        throw DataError("forecasts not found at " + paths.forecasts() +
                        "; run the `forecast` command first");
    }

    std::ifstream in(paths.forecasts(), std::ios::binary);
    std::string header;
    if (!std::getline(in, header)) throw DataError("forecasts.csv is empty");
    const auto header_fields = split_csv_line(header);
    const std::size_t dim = ds.horizon * ds.target_channels;
    if (header_fields.size() != 4 + dim) {
        throw DataError("forecasts.csv column count does not match the dataset shape");
    }

    const auto test_idx = ds.test_indices();
    struct MethodRows {
        std::vector<std::size_t> window_indices;
        std::vector<std::vector<double>> forecasts;
        std::size_t n = 0;
    };
    std::map<std::string, MethodRows> by_method;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4 + dim) {
            std::ostringstream os;
            os << "forecasts.csv line " << line_no << ": bad field count";
            throw DataError(os.str());
        }
        const std::string& method = fields[0];
        const std::size_t window = std::stoull(fields[1]);
        if (window >= test_idx.size()) {
            std::ostringstream os;
            os << "forecasts.csv line " << line_no << ": window index out of range";
            throw DataError(os.str());
        }
        std::vector<double> values(dim);
        for (std::size_t d = 0; d < dim; ++d) values[d] = std::strtod(fields[4 + d].c_str(), nullptr);
        auto& rows = by_method[method];
        rows.window_indices.push_back(test_idx[window]);
        rows.forecasts.push_back(std::move(values));
        rows.n = std::stoull(fields[2]);
    }
    if (by_method.empty()) throw DataError("forecasts.csv has no rows");

    ScoreNet score_model;
    const ScoreNet* score_ptr = nullptr;
    if (cfg.eval.use_score_in_metrics &&
        std::filesystem::exists(paths.scorenet_checkpoint())) {
        score_model = load_score_net(paths.scorenet_checkpoint());
        score_ptr = &score_model;
    }

    std::vector<MetricsReport> reports;
    for (const auto& [method, rows] : by_method) {
        reports.push_back(compute_metrics(ds, rows.window_indices, rows.forecasts,
                                          method, rows.n, score_ptr));
    }
    write_metrics_csv(paths.metrics(), reports);
    append_run_info(paths, "eval", timer.seconds());
}

void cmd_sweep(const RunConfig& cfg) {
    Timer timer;
    const RunPaths paths = run_paths(cfg);
    ensure_out_dir(paths);
    echo_config(cfg, paths);

    const Dataset ds = load_dataset_or_fail(paths);
    const Denoiser model = load_denoiser(paths.denoiser_checkpoint());
    check_model_matches(model, ds);
    const ScoreNet score_model = load_score_net(paths.scorenet_checkpoint());
    const NoiseSchedule schedule = make_schedule(model.schedule_ref);

    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < cfg.eval.sweep_seeds; ++i) {
        seeds.push_back(cfg.seed + i);
    }
    const SweepResult result = sample_efficiency_sweep(
        model, score_model, schedule, ds, cfg.eval.sweep_grid, seeds);
    write_sweep_csv(paths.sweep(), result);
    append_run_info(paths, "sweep", timer.seconds());
}

}  // namespace semguide
