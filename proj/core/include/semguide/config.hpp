#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semguide/csv.hpp"
#include "semguide/denoiser.hpp"
#include "semguide/schedule.hpp"
#include "semguide/score_net.hpp"
#include "semguide/synthetic.hpp"

namespace semguide {

struct CsvDatasetConfig {
    std::string path;
    CsvSchema schema;
    std::size_t history_len = 168;
    std::size_t horizon = 24;
    std::size_t stride = 24;
};

struct DatasetConfig {
    std::string kind = "synthetic";  // "synthetic" | "csv"
    SyntheticSpec synthetic;
    CsvDatasetConfig csv;
};

struct SamplerConfig {
    std::string method = "both";  // "baseline" | "semguide" | "both"
    std::size_t n = 10;
    bool resample = false;
    bool trace = false;
};

struct EvalConfig {
    std::vector<std::size_t> sweep_grid = {10, 20, 50, 100};
    std::size_t sweep_seeds = 5;
    bool use_score_in_metrics = true;
};

/// Fully-resolved run configuration. Parsing validates against the
/// documented schema (types, ranges, and no unknown keys) before any work.
struct RunConfig {
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    DatasetConfig dataset;
    ScheduleParams schedule;
    DenoiserConfig denoiser;
    ScoreNetConfig scorenet;
    SamplerConfig sampler;
    EvalConfig eval;
};

RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// The defaults-filled configuration, echoed beside every run's outputs.
std::string resolved_config_json(const RunConfig& cfg);

/// Output root override: relative output_dir values are placed under
/// $SEMGUIDE_OUT_ROOT when that variable is set.
std::string resolve_output_dir(const RunConfig& cfg);

}  // namespace semguide
