#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace semguide {

struct SyntheticOracle;

/// Channel-major time series block: values[c * steps + s] is channel c at
/// step s. Flattened vectors throughout the project use this exact layout.
struct TimeMatrix {
    std::size_t steps = 0;
    std::size_t channels = 0;
    std::vector<double> values;

    static TimeMatrix zeros(std::size_t steps, std::size_t channels);

    double at(std::size_t step, std::size_t channel) const {
        return values[channel * steps + step];
    }
    double& at(std::size_t step, std::size_t channel) {
        return values[channel * steps + step];
    }
    std::size_t numel() const { return values.size(); }
};

/// One supervised example: history of the target series, future covariates
/// over the horizon, and the future target to forecast.
struct Window {
    TimeMatrix history;     // history_len x target_channels
    TimeMatrix covariates;  // horizon x covariate_channels
    TimeMatrix target;      // horizon x target_channels
    std::int64_t source_index = -1;
    std::string timestamp_range;  // "first..last" over the target rows (CSV data)
    int regime_label = -1;        // synthetic data only; -1 = none
};

/// Per-channel z-score transform. Statistics come from the training split
/// only; apply/invert are exact inverses.
struct Normalizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    static Normalizer fit(const std::vector<const TimeMatrix*>& blocks);
    /// Like fit, but constant channels get stddev 1 instead of an error.
    /// Used for covariates, where constant columns (rare one-hots, fixed
    /// intensities) are legitimate.
    static Normalizer fit_lenient(const std::vector<const TimeMatrix*>& blocks);

    TimeMatrix apply(const TimeMatrix& m) const;
    TimeMatrix invert(const TimeMatrix& m) const;
    std::vector<double> apply_flat(const std::vector<double>& flat,
                                   std::size_t steps) const;
    std::vector<double> invert_flat(const std::vector<double>& flat,
                                    std::size_t steps) const;
};

struct RejectedRow {
    std::size_t line_number = 0;  // 1-based, counting the header
    std::string reason;
};

/// Parsed multivariate series straight from ingestion, before windowing.
struct RawSeries {
    std::vector<std::int64_t> timestamps;  // seconds since epoch, strictly increasing
    TimeMatrix targets;                    // length x target_channels
    TimeMatrix covariates;                 // length x covariate_channels
    std::vector<RejectedRow> rejected;
};

std::vector<Window> make_windows(const RawSeries& series, std::size_t history_len,
                                 std::size_t horizon, std::size_t stride);

struct DatasetSplits {
    std::size_t train_end = 0;  // windows [0, train_end)
    std::size_t val_end = 0;    // windows [train_end, val_end); test = rest
};

/// Windows plus fitted normalizers and chronological splits. Raw windows are
/// stored; normalized views are produced on demand.
struct Dataset {
    std::vector<Window> windows;
    std::size_t history_len = 0;
    std::size_t horizon = 0;
    std::size_t target_channels = 0;
    std::size_t covariate_channels = 0;
    DatasetSplits splits;
    Normalizer target_norm;     // also covers history (same channels)
    Normalizer covariate_norm;
    std::shared_ptr<const SyntheticOracle> oracle;  // synthetic data only

    std::size_t size() const { return windows.size(); }
    std::vector<std::size_t> train_indices() const;
    std::vector<std::size_t> val_indices() const;
    std::vector<std::size_t> test_indices() const;

    Window normalized(std::size_t i) const;
    std::vector<Window> normalized_subset(const std::vector<std::size_t>& idx) const;
};

/// Fits normalizers on the chronological 70/10/20 train split and returns the
/// assembled dataset. Window order is preserved (it is the time order).
Dataset make_dataset(std::vector<Window> windows,
                     std::shared_ptr<const SyntheticOracle> oracle = nullptr,
                     double train_fraction = 0.7, double val_fraction = 0.1);

void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

}  // namespace semguide
