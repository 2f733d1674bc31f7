#include "semguide/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semguide/errors.hpp"

namespace semguide {

using nlohmann::json;

namespace {

void check_object(const json& j, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config: " + path + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("config: unknown key '" + path + "." + key + "'");
        }
    }
}

template <typename T>
T get_number(const json& j, const std::string& path, const char* key, T fallback,
             double lo, double hi) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError("config: " + path + "." + key + " must be a number");
    }
    const double d = v.get<double>();
    if (!(d >= lo && d <= hi)) {
        std::ostringstream os;
        os << "config: " << path << '.' << key << " = " << d << " out of range ["
           << lo << ", " << hi << "]";
        throw ConfigError(os.str());
    }
    if constexpr (std::is_integral_v<T>) {
        if (d != std::floor(d)) {
            throw ConfigError("config: " + path + "." + key + " must be an integer");
        }
    }
    return static_cast<T>(d);
}

bool get_bool(const json& j, const std::string& path, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) {
        throw ConfigError("config: " + path + "." + key + " must be a boolean");
    }
    return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) {
        throw ConfigError("config: " + path + "." + key + " must be a string");
    }
    return j.at(key).get<std::string>();
}

std::vector<std::size_t> get_dims(const json& j, const std::string& path,
                                  const char* key,
                                  const std::vector<std::size_t>& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_array()) {
        throw ConfigError("config: " + path + "." + key + " must be an array");
    }
    std::vector<std::size_t> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
            throw ConfigError("config: " + path + "." + key +
                              " entries must be positive integers");
        }
        out.push_back(v.get<std::size_t>());
    }
    if (out.empty()) throw ConfigError("config: " + path + "." + key + " is empty");
    return out;
}

SyntheticSpec parse_synthetic(const json& j, const std::string& path) {
    check_object(j, path,
                 {"num_series", "series_length", "history_len", "horizon",
                  "num_regimes", "regimes", "noise_std", "intensity_min",
                  "intensity_max", "minor_mode_prob", "seed"});
    SyntheticSpec s;
    s.num_series = get_number<std::size_t>(j, path, "num_series", s.num_series, 1, 1e9);
    s.series_length =
        get_number<std::size_t>(j, path, "series_length", s.series_length, 0, 1e9);
    s.history_len =
        get_number<std::size_t>(j, path, "history_len", s.history_len, 0, 1e6);
    s.horizon = get_number<std::size_t>(j, path, "horizon", s.horizon, 1, 1e6);
    s.num_regimes =
        get_number<std::size_t>(j, path, "num_regimes", s.num_regimes, 2, 1024);
    s.noise_std = get_number<double>(j, path, "noise_std", s.noise_std, 0.0, 1e6);
    s.intensity_min =
        get_number<double>(j, path, "intensity_min", s.intensity_min, 1e-9, 1e6);
    s.intensity_max =
        get_number<double>(j, path, "intensity_max", s.intensity_max, 1e-9, 1e6);
    s.minor_mode_prob =
        get_number<double>(j, path, "minor_mode_prob", s.minor_mode_prob, 0.0, 0.5);
    s.seed = get_number<std::uint64_t>(j, path, "seed", 0, 0, 1e18);
    if (j.contains("regimes") && !j.at("regimes").empty()) {
        if (!j.at("regimes").is_array()) {
            throw ConfigError("config: " + path + ".regimes must be an array");
        }
        for (const auto& rj : j.at("regimes")) {
            check_object(rj, path + ".regimes[]",
                         {"amplitude", "frequency", "offset", "phase"});
            RegimeWaveform w;
            w.amplitude = get_number<double>(rj, path, "amplitude", 1.0, -1e6, 1e6);
            w.frequency = get_number<double>(rj, path, "frequency", 1.0, 0.0, 1e6);
            w.offset = get_number<double>(rj, path, "offset", 0.0, -1e6, 1e6);
            w.phase = get_number<double>(rj, path, "phase", 0.0, -1e6, 1e6);
            s.regimes.push_back(w);
        }
        if (s.regimes.size() != s.num_regimes) {
            throw ConfigError("config: " + path +
                              ".regimes length must equal num_regimes");
        }
    }
    if (s.intensity_min > s.intensity_max) {
        throw ConfigError("config: " + path + ".intensity_min > intensity_max");
    }
    return s;
}

CsvDatasetConfig parse_csv(const json& j, const std::string& path) {
    check_object(j, path,
                 {"path", "timestamp_column", "target_columns", "covariate_columns",
                  "history_len", "horizon", "stride"});
    CsvDatasetConfig c;
    c.path = get_string(j, path, "path", "");
    c.schema.timestamp_column = get_string(j, path, "timestamp_column", "timestamp");
    if (j.contains("target_columns")) {
        c.schema.target_columns = j.at("target_columns").get<std::vector<std::string>>();
    }
    if (j.contains("covariate_columns")) {
        c.schema.covariate_columns =
            j.at("covariate_columns").get<std::vector<std::string>>();
    }
    c.history_len = get_number<std::size_t>(j, path, "history_len", c.history_len, 1, 1e6);
    c.horizon = get_number<std::size_t>(j, path, "horizon", c.horizon, 1, 1e6);
    c.stride = get_number<std::size_t>(j, path, "stride", c.stride, 1, 1e6);
    return c;
}

}  // namespace

RunConfig parse_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    check_object(j, "$",
                 {"seed", "output_dir", "dataset", "schedule", "denoiser", "scorenet",
                  "sampler", "eval"});

    RunConfig cfg;
    cfg.seed = get_number<std::uint64_t>(j, "$", "seed", cfg.seed, 0, 1e18);
    cfg.output_dir = get_string(j, "$", "output_dir", cfg.output_dir);

    if (j.contains("dataset")) {
        const auto& dj = j.at("dataset");
        check_object(dj, "dataset", {"kind", "synthetic", "csv"});
        cfg.dataset.kind = get_string(dj, "dataset", "kind", cfg.dataset.kind);
        if (cfg.dataset.kind != "synthetic" && cfg.dataset.kind != "csv") {
            throw ConfigError("config: dataset.kind must be 'synthetic' or 'csv'");
        }
        if (dj.contains("synthetic")) {
            cfg.dataset.synthetic = parse_synthetic(dj.at("synthetic"), "dataset.synthetic");
        }
        if (dj.contains("csv")) {
            cfg.dataset.csv = parse_csv(dj.at("csv"), "dataset.csv");
        }
    }
    if (cfg.dataset.kind == "csv" && cfg.dataset.csv.path.empty()) {
        throw ConfigError("config: dataset.csv.path is required for kind 'csv'");
    }

    if (j.contains("schedule")) {
        const auto& sj = j.at("schedule");
        check_object(sj, "schedule", {"num_steps", "beta_start", "beta_end"});
        cfg.schedule.num_steps = get_number<std::size_t>(sj, "schedule", "num_steps",
                                                         cfg.schedule.num_steps, 1, 1e6);
        cfg.schedule.beta_start = get_number<double>(sj, "schedule", "beta_start",
                                                     cfg.schedule.beta_start, 1e-12, 1.0);
        cfg.schedule.beta_end = get_number<double>(sj, "schedule", "beta_end",
                                                   cfg.schedule.beta_end, 1e-12, 1.0);
        if (cfg.schedule.beta_start > cfg.schedule.beta_end ||
            cfg.schedule.beta_end >= 1.0) {
            throw ConfigError("config: need 0 < beta_start <= beta_end < 1");
        }
    }

    if (j.contains("denoiser")) {
        const auto& nj = j.at("denoiser");
        check_object(nj, "denoiser",
                     {"hidden_dims", "embed_dim", "epochs", "learning_rate",
                      "weight_decay", "batch_size", "use_history"});
        auto& d = cfg.denoiser;
        d.hidden_dims = get_dims(nj, "denoiser", "hidden_dims", d.hidden_dims);
        d.embed_dim = get_number<std::size_t>(nj, "denoiser", "embed_dim", d.embed_dim, 2, 4096);
        d.epochs = get_number<std::size_t>(nj, "denoiser", "epochs", d.epochs, 0, 1e6);
        d.learning_rate =
            get_number<double>(nj, "denoiser", "learning_rate", d.learning_rate, 1e-12, 10.0);
        d.weight_decay =
            get_number<double>(nj, "denoiser", "weight_decay", d.weight_decay, 0.0, 10.0);
        d.batch_size = get_number<std::size_t>(nj, "denoiser", "batch_size", d.batch_size, 1, 1e6);
        d.use_history = get_bool(nj, "denoiser", "use_history", d.use_history);
        if (d.embed_dim % 2 != 0) {
            throw ConfigError("config: denoiser.embed_dim must be even");
        }
    }

    if (j.contains("scorenet")) {
        const auto& nj = j.at("scorenet");
        check_object(nj, "scorenet",
                     {"hidden_dims", "epochs", "learning_rate", "weight_decay",
                      "batch_size", "negatives_per_positive", "use_timestep",
                      "embed_dim"});
        auto& s = cfg.scorenet;
        s.hidden_dims = get_dims(nj, "scorenet", "hidden_dims", s.hidden_dims);
        s.epochs = get_number<std::size_t>(nj, "scorenet", "epochs", s.epochs, 0, 1e6);
        s.learning_rate =
            get_number<double>(nj, "scorenet", "learning_rate", s.learning_rate, 1e-12, 10.0);
        s.weight_decay =
            get_number<double>(nj, "scorenet", "weight_decay", s.weight_decay, 0.0, 10.0);
        s.batch_size =
            get_number<std::size_t>(nj, "scorenet", "batch_size", s.batch_size, 1, 1e6);
        s.negatives_per_positive = get_number<std::size_t>(
            nj, "scorenet", "negatives_per_positive", s.negatives_per_positive, 0, 1024);
        s.use_timestep = get_bool(nj, "scorenet", "use_timestep", s.use_timestep);
        s.embed_dim =
            get_number<std::size_t>(nj, "scorenet", "embed_dim", s.embed_dim, 2, 4096);
        if (s.embed_dim % 2 != 0) {
            throw ConfigError("config: scorenet.embed_dim must be even");
        }
    }

    if (j.contains("sampler")) {
        const auto& sj = j.at("sampler");
        check_object(sj, "sampler", {"method", "n", "resample", "trace"});
        cfg.sampler.method = get_string(sj, "sampler", "method", cfg.sampler.method);
        if (cfg.sampler.method != "baseline" && cfg.sampler.method != "semguide" &&
            cfg.sampler.method != "both") {
            throw ConfigError(
                "config: sampler.method must be one of baseline, semguide, both");
        }
        cfg.sampler.n = get_number<std::size_t>(sj, "sampler", "n", cfg.sampler.n, 1, 1e6);
        cfg.sampler.resample = get_bool(sj, "sampler", "resample", cfg.sampler.resample);
        cfg.sampler.trace = get_bool(sj, "sampler", "trace", cfg.sampler.trace);
    }

    if (j.contains("eval")) {
        const auto& ej = j.at("eval");
        check_object(ej, "eval", {"sweep_grid", "sweep_seeds", "use_score_in_metrics"});
        cfg.eval.sweep_grid = get_dims(ej, "eval", "sweep_grid", cfg.eval.sweep_grid);
        cfg.eval.sweep_seeds =
            get_number<std::size_t>(ej, "eval", "sweep_seeds", cfg.eval.sweep_seeds, 1, 1e4);
        cfg.eval.use_score_in_metrics =
            get_bool(ej, "eval", "use_score_in_metrics", cfg.eval.use_score_in_metrics);
    }

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

std::string resolved_config_json(const RunConfig& cfg) {
    json regimes = json::array();
    for (const auto& r : cfg.dataset.synthetic.regimes) {
        regimes.push_back(json{{"amplitude", r.amplitude},
                               {"frequency", r.frequency},
                               {"offset", r.offset},
                               {"phase", r.phase}});
    }
    json j{
        {"seed", cfg.seed},
        {"output_dir", cfg.output_dir},
        {"dataset",
         {{"kind", cfg.dataset.kind},
          {"synthetic",
           {{"num_series", cfg.dataset.synthetic.num_series},
            {"series_length", cfg.dataset.synthetic.series_length},
            {"history_len", cfg.dataset.synthetic.history_len},
            {"horizon", cfg.dataset.synthetic.horizon},
            {"num_regimes", cfg.dataset.synthetic.num_regimes},
            {"regimes", std::move(regimes)},
            {"noise_std", cfg.dataset.synthetic.noise_std},
            {"intensity_min", cfg.dataset.synthetic.intensity_min},
            {"intensity_max", cfg.dataset.synthetic.intensity_max},
            {"minor_mode_prob", cfg.dataset.synthetic.minor_mode_prob},
            {"seed", cfg.dataset.synthetic.seed}}},
          {"csv",
           {{"path", cfg.dataset.csv.path},
            {"timestamp_column", cfg.dataset.csv.schema.timestamp_column},
            {"target_columns", cfg.dataset.csv.schema.target_columns},
            {"covariate_columns", cfg.dataset.csv.schema.covariate_columns},
            {"history_len", cfg.dataset.csv.history_len},
            {"horizon", cfg.dataset.csv.horizon},
            {"stride", cfg.dataset.csv.stride}}}}},
        {"schedule",
         {{"num_steps", cfg.schedule.num_steps},
          {"beta_start", cfg.schedule.beta_start},
          {"beta_end", cfg.schedule.beta_end}}},
        {"denoiser",
         {{"hidden_dims", cfg.denoiser.hidden_dims},
          {"embed_dim", cfg.denoiser.embed_dim},
          {"epochs", cfg.denoiser.epochs},
          {"learning_rate", cfg.denoiser.learning_rate},
          {"weight_decay", cfg.denoiser.weight_decay},
          {"batch_size", cfg.denoiser.batch_size},
          {"use_history", cfg.denoiser.use_history}}},
        {"scorenet",
         {{"hidden_dims", cfg.scorenet.hidden_dims},
          {"epochs", cfg.scorenet.epochs},
          {"learning_rate", cfg.scorenet.learning_rate},
          {"weight_decay", cfg.scorenet.weight_decay},
          {"batch_size", cfg.scorenet.batch_size},
          {"negatives_per_positive", cfg.scorenet.negatives_per_positive},
          {"use_timestep", cfg.scorenet.use_timestep},
          {"embed_dim", cfg.scorenet.embed_dim}}},
        {"sampler",
         {{"method", cfg.sampler.method},
          {"n", cfg.sampler.n},
          {"resample", cfg.sampler.resample},
          {"trace", cfg.sampler.trace}}},
        {"eval",
         {{"sweep_grid", cfg.eval.sweep_grid},
          {"sweep_seeds", cfg.eval.sweep_seeds},
          {"use_score_in_metrics", cfg.eval.use_score_in_metrics}}}};
    return j.dump(1) + "\n";
}

std::string resolve_output_dir(const RunConfig& cfg) {
    const char* root = std::getenv("SEMGUIDE_OUT_ROOT");
    if (root && root[0] != '\0' && !cfg.output_dir.empty() &&
        cfg.output_dir.front() != '/') {
        return std::string(root) + "/" + cfg.output_dir;
    }
    return cfg.output_dir;
}

}  // namespace semguide
