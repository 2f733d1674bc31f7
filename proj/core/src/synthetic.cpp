#include "semguide/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "internal_json.hpp"
#include "semguide/errors.hpp"

namespace semguide {

double waveform_value(const RegimeWaveform& w, std::size_t step, std::size_t horizon) {
    const double x = static_cast<double>(step) / static_cast<double>(horizon);
    return w.offset +
           w.amplitude * std::sin(2.0 * std::numbers::pi * w.frequency * x + w.phase);
}

double history_base_value(std::size_t step, std::size_t history_len) {
    const double x = static_cast<double>(step) / static_cast<double>(history_len);
    return 0.4 * std::sin(2.0 * std::numbers::pi * x);
}

std::vector<RegimeWaveform> default_regimes(std::size_t num_regimes) {
    // Distinct amplitude/frequency/offset/phase combinations; pairwise mode
    // distances stay well above the default observation noise.
    static const double amplitudes[] = {1.0, 1.3, 0.8, 1.1};
    static const double offsets[] = {0.0, 0.8, -0.8, 0.4, -0.4, 1.2};
    std::vector<RegimeWaveform> regimes(num_regimes);
    for (std::size_t r = 0; r < num_regimes; ++r) {
        RegimeWaveform w;
        w.amplitude = amplitudes[r % 4];
        w.frequency = 1.0 + static_cast<double>(r % 3);
        w.offset = offsets[r % 6];
        w.phase = 2.0 * std::numbers::pi * static_cast<double>(r) /
                  static_cast<double>(num_regimes);
        regimes[r] = w;
    }
    return regimes;
}

std::vector<double> SyntheticOracle::mode_location(std::size_t regime,
                                                   double intensity) const {
    if (regime >= num_regimes) {
        throw std::invalid_argument("SyntheticOracle: regime out of range");
    }
    std::vector<double> out(horizon);
    for (std::size_t s = 0; s < horizon; ++s) {
        out[s] = intensity * waveform_value(regimes[regime], s, horizon);
    }
    return out;
}

std::vector<double> SyntheticOracle::conditional_mean(std::size_t regime,
                                                      double intensity) const {
    const auto major = mode_location(regime, intensity);
    if (minor_mode_prob <= 0.0) return major;
    const auto minor = mode_location(alternate_regime(regime), intensity);
    std::vector<double> out(horizon);
    for (std::size_t s = 0; s < horizon; ++s) {
        out[s] = (1.0 - minor_mode_prob) * major[s] + minor_mode_prob * minor[s];
    }
    return out;
}

std::size_t SyntheticOracle::nearest_regime(const std::vector<double>& forecast,
                                            double intensity) const {
    if (forecast.size() != horizon) {
        throw std::invalid_argument("SyntheticOracle: forecast length != horizon");
    }
    std::size_t best = 0;
    double best_d2 = 0.0;
    for (std::size_t r = 0; r < num_regimes; ++r) {
        const auto mode = mode_location(r, intensity);
        double d2 = 0.0;
        for (std::size_t s = 0; s < horizon; ++s) {
            const double d = forecast[s] - mode[s];
            d2 += d * d;
        }
        if (r == 0 || d2 < best_d2) {
            best = r;
            best_d2 = d2;
        }
    }
    return best;
}

std::size_t covariate_regime(const Window& w, std::size_t num_regimes) {
    std::size_t best = 0;
    double best_v = w.covariates.at(0, 0);
    for (std::size_t r = 1; r < num_regimes; ++r) {
        const double v = w.covariates.at(0, r);
        if (v > best_v) {
            best = r;
            best_v = v;
        }
    }
    return best;
}

double covariate_intensity(const Window& w) {
    return w.covariates.at(0, w.covariates.channels - 1);
}

Dataset synth_generate(const SyntheticSpec& spec, Rng& rng) {
    if (spec.num_regimes < 2) {
        throw DataError("synth_generate: num_regimes must be >= 2");
    }
    if (spec.horizon < 1) throw DataError("synth_generate: horizon must be >= 1");
    if (spec.num_series < 1) throw DataError("synth_generate: num_series must be >= 1");
    if (spec.series_length != 0 &&
        spec.series_length != spec.history_len + spec.horizon) {
        throw DataError(
            "synth_generate: series_length must equal history_len + horizon (or 0)");
    }
    if (spec.minor_mode_prob < 0.0 || spec.minor_mode_prob > 0.5) {
        throw DataError("synth_generate: minor_mode_prob must be in [0, 0.5]");
    }
    if (!(spec.intensity_min <= spec.intensity_max) || spec.intensity_min <= 0.0) {
        throw DataError("synth_generate: need 0 < intensity_min <= intensity_max");
    }
    if (spec.noise_std < 0.0) throw DataError("synth_generate: noise_std must be >= 0");

    auto regimes = spec.regimes.empty() ? default_regimes(spec.num_regimes) : spec.regimes;
    if (regimes.size() != spec.num_regimes) {
        throw DataError("synth_generate: regimes list does not match num_regimes");
    }

    auto oracle = std::make_shared<SyntheticOracle>();
    oracle->horizon = spec.horizon;
    oracle->num_regimes = spec.num_regimes;
    oracle->minor_mode_prob = spec.minor_mode_prob;
    oracle->noise_std = spec.noise_std;
    oracle->regimes = regimes;

    const std::size_t K = spec.num_regimes;
    std::vector<Window> windows;
    windows.reserve(spec.num_series);
    for (std::size_t i = 0; i < spec.num_series; ++i) {
        const std::size_t regime = i % K;
        const double intensity =
            spec.intensity_min +
            (spec.intensity_max - spec.intensity_min) * rng.uniform();
        const bool minor = rng.uniform() < spec.minor_mode_prob;
        const std::size_t mode = minor ? oracle->alternate_regime(regime) : regime;

        Window w;
        w.source_index = static_cast<std::int64_t>(i);
        w.regime_label = static_cast<int>(regime);
        w.history = TimeMatrix::zeros(spec.history_len, 1);
        for (std::size_t s = 0; s < spec.history_len; ++s) {
            w.history.at(s, 0) = intensity * history_base_value(s, spec.history_len) +
                                 spec.noise_std * rng.normal();
        }
        w.covariates = TimeMatrix::zeros(spec.horizon, K + 1);
        for (std::size_t s = 0; s < spec.horizon; ++s) {
            w.covariates.at(s, regime) = 1.0;
            w.covariates.at(s, K) = intensity;
        }
        w.target = TimeMatrix::zeros(spec.horizon, 1);
        for (std::size_t s = 0; s < spec.horizon; ++s) {
            w.target.at(s, 0) = intensity * waveform_value(regimes[mode], s, spec.horizon) +
                                spec.noise_std * rng.normal();
        }
        windows.push_back(std::move(w));
    }

    return make_dataset(std::move(windows), std::move(oracle));
}

using nlohmann::json;

json oracle_to_json(const SyntheticOracle& oracle) {
    json regimes = json::array();
    for (const auto& r : oracle.regimes) {
        regimes.push_back(json{{"amplitude", r.amplitude},
                               {"frequency", r.frequency},
                               {"offset", r.offset},
                               {"phase", r.phase}});
    }
    return json{{"horizon", oracle.horizon},
                {"num_regimes", oracle.num_regimes},
                {"minor_mode_prob", oracle.minor_mode_prob},
                {"noise_std", oracle.noise_std},
                {"regimes", std::move(regimes)}};
}

SyntheticOracle oracle_from_json(const json& j) {
    SyntheticOracle o;
    o.horizon = j.at("horizon").get<std::size_t>();
    o.num_regimes = j.at("num_regimes").get<std::size_t>();
    o.minor_mode_prob = j.at("minor_mode_prob").get<double>();
    o.noise_std = j.at("noise_std").get<double>();
    for (const auto& rj : j.at("regimes")) {
        RegimeWaveform r;
        r.amplitude = rj.at("amplitude").get<double>();
        r.frequency = rj.at("frequency").get<double>();
        r.offset = rj.at("offset").get<double>();
        r.phase = rj.at("phase").get<double>();
        o.regimes.push_back(r);
    }
    return o;
}

}  // namespace semguide
