#pragma once

#include <cstdint>
#include <vector>

#include "semguide/data.hpp"
#include "semguide/rng.hpp"

namespace semguide {

struct RegimeWaveform {
    double amplitude = 1.0;
    double frequency = 1.0;  // cycles per horizon
    double offset = 0.0;
    double phase = 0.0;

    bool operator==(const RegimeWaveform&) const = default;
};

/// Covariate-driven generator with a known conditional law. Covariates are a
/// regime one-hot plus a continuous intensity, constant over the horizon.
/// With minor_mode_prob q > 0 each covariate setting admits two valid
/// futures: the regime's own waveform (probability 1-q) and the next
/// regime's waveform (probability q), making the conditional bimodal.
struct SyntheticSpec {
    std::size_t num_series = 512;   // one window per generated series
    std::size_t series_length = 0;  // 0 = history_len + horizon (must match)
    std::size_t history_len = 48;
    std::size_t horizon = 24;
    std::size_t num_regimes = 4;
    std::vector<RegimeWaveform> regimes;  // empty = derive defaults
    double noise_std = 0.1;
    double intensity_min = 0.7;
    double intensity_max = 1.3;
    double minor_mode_prob = 0.0;  // in [0, 0.5]
    std::uint64_t seed = 1;
};

/// Closed-form description of the generator's conditional law, used as the
/// evaluation oracle. All locations are in raw (unnormalized) units.
struct SyntheticOracle {
    std::size_t horizon = 0;
    std::size_t num_regimes = 0;
    double minor_mode_prob = 0.0;
    double noise_std = 0.0;
    std::vector<RegimeWaveform> regimes;

    std::size_t alternate_regime(std::size_t r) const {
        return (r + 1) % num_regimes;
    }
    /// Mean trajectory of one mode: intensity-scaled regime waveform.
    std::vector<double> mode_location(std::size_t regime, double intensity) const;
    /// E[target | regime covariate, intensity] under the bimodal mixture.
    std::vector<double> conditional_mean(std::size_t regime, double intensity) const;
    /// Index of the mode_location closest in L2; ties go to the lower index.
    std::size_t nearest_regime(const std::vector<double>& forecast,
                               double intensity) const;
};

std::vector<RegimeWaveform> default_regimes(std::size_t num_regimes);

double waveform_value(const RegimeWaveform& w, std::size_t step, std::size_t horizon);

/// Regime-independent history shape; history reveals intensity but not the
/// regime, so covariates are the only regime signal.
double history_base_value(std::size_t step, std::size_t history_len);

/// Returns a Dataset of generated windows with the oracle attached and
/// normalizers fitted on the train split. Regimes are assigned round-robin;
/// the per-window intensity is read back from the last covariate channel.
Dataset synth_generate(const SyntheticSpec& spec, Rng& rng);

/// Per-window covariate accessors (raw covariates).
std::size_t covariate_regime(const Window& w, std::size_t num_regimes);
double covariate_intensity(const Window& w);

}  // namespace semguide
