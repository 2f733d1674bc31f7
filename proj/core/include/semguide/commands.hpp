#pragma once

#include <string>

#include "semguide/config.hpp"

namespace semguide {

/// File layout inside a run's output directory. Commands hand data to each
/// other exclusively through these files.
struct RunPaths {
    std::string out_dir;
    std::string dataset() const { return out_dir + "/dataset.json"; }
    std::string denoiser_checkpoint() const { return out_dir + "/denoiser.json"; }
    std::string scorenet_checkpoint() const { return out_dir + "/scorenet.json"; }
    std::string denoiser_log() const { return out_dir + "/denoiser_train_log.csv"; }
    std::string scorenet_log() const { return out_dir + "/scorenet_train_log.csv"; }
    std::string forecasts() const { return out_dir + "/forecasts.csv"; }
    std::string metrics() const { return out_dir + "/metrics.csv"; }
    std::string sweep() const { return out_dir + "/sweep.csv"; }
    std::string trace() const { return out_dir + "/trace.csv"; }
    std::string resolved_config() const { return out_dir + "/resolved_config.json"; }
    std::string run_info() const { return out_dir + "/run_info.txt"; }
};

RunPaths run_paths(const RunConfig& cfg);

/// Materializes the dataset cache (synthetic generation or CSV ingestion).
void cmd_synth(const RunConfig& cfg);

enum class TrainSelection { both, denoiser_only, score_only };
void cmd_train(const RunConfig& cfg, TrainSelection selection = TrainSelection::both);

/// One forecast row per test window per configured method.
void cmd_forecast(const RunConfig& cfg);

void cmd_eval(const RunConfig& cfg);

void cmd_sweep(const RunConfig& cfg);

}  // namespace semguide
