#include "semguide/data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "internal_json.hpp"
#include "semguide/errors.hpp"
#include "semguide/synthetic.hpp"

namespace semguide {

using nlohmann::json;

TimeMatrix TimeMatrix::zeros(std::size_t steps, std::size_t channels) {
    TimeMatrix m;
    m.steps = steps;
    m.channels = channels;
    m.values.assign(steps * channels, 0.0);
    return m;
}

namespace {

Normalizer fit_impl(const std::vector<const TimeMatrix*>& blocks, bool lenient) {
    if (blocks.empty()) throw DataError("Normalizer::fit: empty training split");
    const std::size_t channels = blocks.front()->channels;
    std::vector<double> sum(channels, 0.0), sumsq(channels, 0.0);
    std::size_t count = 0;
    for (const auto* b : blocks) {
        if (b->channels != channels) {
            throw DataError("Normalizer::fit: inconsistent channel counts");
        }
        for (std::size_t c = 0; c < channels; ++c) {
            for (std::size_t s = 0; s < b->steps; ++s) {
                const double v = b->at(s, c);
                sum[c] += v;
                sumsq[c] += v * v;
            }
        }
        count += b->steps;
    }
    if (count == 0) throw DataError("Normalizer::fit: no rows");

    Normalizer n;
    n.mean.resize(channels);
    n.stddev.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) {
        const double mean = sum[c] / static_cast<double>(count);
        const double var = sumsq[c] / static_cast<double>(count) - mean * mean;
        const double sd = std::sqrt(var > 0.0 ? var : 0.0);
        if (!(sd > 0.0) && !lenient) {
            std::ostringstream os;
            os << "Normalizer::fit: channel " << c << " is constant (std == 0)";
            throw DataError(os.str());
        }
        n.mean[c] = mean;
        n.stddev[c] = sd > 0.0 ? sd : 1.0;
    }
    return n;
}

}  // namespace

Normalizer Normalizer::fit(const std::vector<const TimeMatrix*>& blocks) {
    return fit_impl(blocks, false);
}

Normalizer Normalizer::fit_lenient(const std::vector<const TimeMatrix*>& blocks) {
    return fit_impl(blocks, true);
}

TimeMatrix Normalizer::apply(const TimeMatrix& m) const {
    if (m.channels != mean.size()) {
        throw DataError("Normalizer::apply: channel count mismatch");
    }
    TimeMatrix out = m;
    for (std::size_t c = 0; c < m.channels; ++c) {
        for (std::size_t s = 0; s < m.steps; ++s) {
            out.at(s, c) = (m.at(s, c) - mean[c]) / stddev[c];
        }
    }
    return out;
}

TimeMatrix Normalizer::invert(const TimeMatrix& m) const {
    if (m.channels != mean.size()) {
        throw DataError("Normalizer::invert: channel count mismatch");
    }
    TimeMatrix out = m;
    for (std::size_t c = 0; c < m.channels; ++c) {
        for (std::size_t s = 0; s < m.steps; ++s) {
            out.at(s, c) = m.at(s, c) * stddev[c] + mean[c];
        }
    }
    return out;
}

std::vector<double> Normalizer::apply_flat(const std::vector<double>& flat,
                                           std::size_t steps) const {
    TimeMatrix m;
    m.steps = steps;
    m.channels = mean.size();
    m.values = flat;
    return apply(m).values;
}

std::vector<double> Normalizer::invert_flat(const std::vector<double>& flat,
                                            std::size_t steps) const {
    TimeMatrix m;
    m.steps = steps;
    m.channels = mean.size();
    m.values = flat;
    return invert(m).values;
}

std::vector<Window> make_windows(const RawSeries& series, std::size_t history_len,
                                 std::size_t horizon, std::size_t stride) {
    if (horizon == 0 || stride == 0) {
        throw DataError("make_windows: horizon and stride must be > 0");
    }
    const std::size_t length = series.targets.steps;
    if (length < history_len + horizon) {
        throw DataError("make_windows: series shorter than history_len + horizon");
    }
    const std::size_t count = (length - history_len - horizon) / stride + 1;
    std::vector<Window> windows;
    windows.reserve(count);
    const std::size_t tc = series.targets.channels;
    const std::size_t cc = series.covariates.channels;
    for (std::size_t w = 0; w < count; ++w) {
        const std::size_t off = w * stride;
        Window win;
        win.source_index = static_cast<std::int64_t>(off);
        win.history = TimeMatrix::zeros(history_len, tc);
        win.target = TimeMatrix::zeros(horizon, tc);
        win.covariates = TimeMatrix::zeros(horizon, cc);
        for (std::size_t c = 0; c < tc; ++c) {
            for (std::size_t s = 0; s < history_len; ++s) {
                win.history.at(s, c) = series.targets.at(off + s, c);
            }
            for (std::size_t s = 0; s < horizon; ++s) {
                win.target.at(s, c) = series.targets.at(off + history_len + s, c);
            }
        }
        for (std::size_t c = 0; c < cc; ++c) {
            for (std::size_t s = 0; s < horizon; ++s) {
                win.covariates.at(s, c) = series.covariates.at(off + history_len + s, c);
            }
        }
        if (!series.timestamps.empty()) {
            std::ostringstream os;
            os << series.timestamps[off + history_len] << ".."
               << series.timestamps[off + history_len + horizon - 1];
            win.timestamp_range = os.str();
        }
        windows.push_back(std::move(win));
    }
    return windows;
}

std::vector<std::size_t> Dataset::train_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < splits.train_end; ++i) idx.push_back(i);
    return idx;
}

std::vector<std::size_t> Dataset::val_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = splits.train_end; i < splits.val_end; ++i) idx.push_back(i);
    return idx;
}

std::vector<std::size_t> Dataset::test_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = splits.val_end; i < windows.size(); ++i) idx.push_back(i);
    return idx;
}

Window Dataset::normalized(std::size_t i) const {
    const Window& w = windows.at(i);
    Window out = w;
    out.history = target_norm.apply(w.history);
    out.target = target_norm.apply(w.target);
    out.covariates = covariate_norm.apply(w.covariates);
    return out;
}

std::vector<Window> Dataset::normalized_subset(const std::vector<std::size_t>& idx) const {
    std::vector<Window> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(normalized(i));
    return out;
}

Dataset make_dataset(std::vector<Window> windows,
                     std::shared_ptr<const SyntheticOracle> oracle,
                     double train_fraction, double val_fraction) {
    if (windows.empty()) throw DataError("make_dataset: no windows");
    Dataset ds;
    ds.history_len = windows.front().history.steps;
    ds.horizon = windows.front().target.steps;
    ds.target_channels = windows.front().target.channels;
    ds.covariate_channels = windows.front().covariates.channels;
    ds.windows = std::move(windows);
    ds.oracle = std::move(oracle);

    const auto n = static_cast<double>(ds.windows.size());
    ds.splits.train_end = static_cast<std::size_t>(n * train_fraction);
    ds.splits.val_end =
        static_cast<std::size_t>(n * (train_fraction + val_fraction));
    if (ds.splits.train_end == 0) {
        throw DataError("make_dataset: training split is empty");
    }
    if (ds.splits.val_end > ds.windows.size()) ds.splits.val_end = ds.windows.size();

    // Statistics from the training split only; history shares target channels.
    std::vector<const TimeMatrix*> target_blocks, cov_blocks;
    for (std::size_t i = 0; i < ds.splits.train_end; ++i) {
        target_blocks.push_back(&ds.windows[i].history);
        target_blocks.push_back(&ds.windows[i].target);
        cov_blocks.push_back(&ds.windows[i].covariates);
    }
    ds.target_norm = Normalizer::fit(target_blocks);
    ds.covariate_norm = Normalizer::fit_lenient(cov_blocks);
    return ds;
}

namespace {

json matrix_to_json(const TimeMatrix& m) {
    return json{{"steps", m.steps}, {"channels", m.channels}, {"values", m.values}};
}

TimeMatrix matrix_from_json(const json& j) {
    TimeMatrix m;
    m.steps = j.at("steps").get<std::size_t>();
    m.channels = j.at("channels").get<std::size_t>();
    m.values = j.at("values").get<std::vector<double>>();
    if (m.values.size() != m.steps * m.channels) {
        throw DataError("dataset file: matrix shape mismatch");
    }
    return m;
}

}  // namespace

void save_dataset(const std::string& path, const Dataset& ds) {
    json j;
    j["format_version"] = 1;
    j["history_len"] = ds.history_len;
    j["horizon"] = ds.horizon;
    j["target_channels"] = ds.target_channels;
    j["covariate_channels"] = ds.covariate_channels;
    j["splits"] = {{"train_end", ds.splits.train_end}, {"val_end", ds.splits.val_end}};
    j["target_norm"] = {{"mean", ds.target_norm.mean}, {"stddev", ds.target_norm.stddev}};
    j["covariate_norm"] = {{"mean", ds.covariate_norm.mean},
                           {"stddev", ds.covariate_norm.stddev}};
    json windows = json::array();
    for (const auto& w : ds.windows) {
        windows.push_back(json{{"history", matrix_to_json(w.history)},
                               {"covariates", matrix_to_json(w.covariates)},
                               {"target", matrix_to_json(w.target)},
                               {"source_index", w.source_index},
                               {"timestamp_range", w.timestamp_range},
                               {"regime_label", w.regime_label}});
    }
    j["windows"] = std::move(windows);
    if (ds.oracle) j["oracle"] = oracle_to_json(*ds.oracle);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_dataset: cannot write " + path);
    out << j.dump(1) << "\n";
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_dataset: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("load_dataset: invalid JSON in " + path + ": " + e.what());
    }
    if (j.value("format_version", 0) != 1) {
        throw DataError("load_dataset: unsupported format_version in " + path);
    }
    Dataset ds;
    ds.history_len = j.at("history_len").get<std::size_t>();
    ds.horizon = j.at("horizon").get<std::size_t>();
    ds.target_channels = j.at("target_channels").get<std::size_t>();
    ds.covariate_channels = j.at("covariate_channels").get<std::size_t>();
    ds.splits.train_end = j.at("splits").at("train_end").get<std::size_t>();
    ds.splits.val_end = j.at("splits").at("val_end").get<std::size_t>();
    ds.target_norm.mean = j.at("target_norm").at("mean").get<std::vector<double>>();
    ds.target_norm.stddev = j.at("target_norm").at("stddev").get<std::vector<double>>();
    ds.covariate_norm.mean = j.at("covariate_norm").at("mean").get<std::vector<double>>();
    ds.covariate_norm.stddev =
        j.at("covariate_norm").at("stddev").get<std::vector<double>>();
    for (const auto& wj : j.at("windows")) {
        Window w;
        w.history = matrix_from_json(wj.at("history"));
        w.covariates = matrix_from_json(wj.at("covariates"));
        w.target = matrix_from_json(wj.at("target"));
        w.source_index = wj.at("source_index").get<std::int64_t>();
        w.timestamp_range = wj.at("timestamp_range").get<std::string>();
        w.regime_label = wj.at("regime_label").get<int>();
        ds.windows.push_back(std::move(w));
    }
    if (j.contains("oracle")) {
        ds.oracle = std::make_shared<SyntheticOracle>(oracle_from_json(j.at("oracle")));
    }
    return ds;
}

}  // namespace semguide
