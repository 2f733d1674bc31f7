#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "semguide/commands.hpp"
#include "semguide/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitTrain = 4;

struct GlobalOptions {
    std::string config_path;
    std::string output_dir;  // override
    std::int64_t seed = -1;  // override when >= 0
};

semguide::RunConfig resolve(const GlobalOptions& opts) {
    semguide::RunConfig cfg = semguide::load_config(opts.config_path);
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
    return cfg;
}

void add_common(CLI::App* cmd, GlobalOptions& opts) {
    cmd->add_option("-c,--config", opts.config_path, "JSON run configuration")
        ->required();
    cmd->add_option("--seed", opts.seed, "Override the config seed");
    cmd->add_option("--out", opts.output_dir, "Override the output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional diffusion forecasting with semantically guided sampling"};
    app.require_subcommand(1);

    GlobalOptions opts;
    std::string only;

    auto* synth = app.add_subcommand("synth", "Generate or ingest the dataset cache");
    add_common(synth, opts);
    auto* train = app.add_subcommand("train", "Train the denoiser and score network");
    add_common(train, opts);
    train->add_option("--only", only, "Train a single model: denoiser | score")
        ->check(CLI::IsMember({"denoiser", "score"}));
    auto* forecast = app.add_subcommand("forecast", "Forecast the test split");
    add_common(forecast, opts);
    auto* eval = app.add_subcommand("eval", "Score forecasts into metrics.csv");
    add_common(eval, opts);
    auto* sweep = app.add_subcommand("sweep", "Sample-count sweep over both methods");
    add_common(sweep, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        const semguide::RunConfig cfg = resolve(opts);
        if (synth->parsed()) {
            semguide::cmd_synth(cfg);
        } else if (train->parsed()) {
            auto selection = semguide::TrainSelection::both;
            if (only == "denoiser") selection = semguide::TrainSelection::denoiser_only;
            if (only == "score") selection = semguide::TrainSelection::score_only;
            semguide::cmd_train(cfg, selection);
        } else if (forecast->parsed()) {
            semguide::cmd_forecast(cfg);
        } else if (eval->parsed()) {
            semguide::cmd_eval(cfg);
        } else if (sweep->parsed()) {
            semguide::cmd_sweep(cfg);
        }
    } catch (const semguide::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const semguide::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const semguide::TrainError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return kExitTrain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
