#include "semguide/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "semguide/errors.hpp"

namespace semguide {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json mlp_to_json(const Mlp& net) {
    json layers = json::array();
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        layers.push_back(json{{"weights", net.weights[l].values},
                              {"biases", net.biases[l].values}});
    }
    return json{{"layer_dims", net.layer_dims},
                {"hidden_activation", activation_name(net.hidden_activation)},
                {"output_activation", activation_name(net.output_activation)},
                {"layers", std::move(layers)}};
}

Mlp mlp_from_json(const json& j) {
    Mlp net;
    net.layer_dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    net.hidden_activation =
        activation_from_name(j.at("hidden_activation").get<std::string>());
    net.output_activation =
        activation_from_name(j.at("output_activation").get<std::string>());
    const auto& layers = j.at("layers");
    if (net.layer_dims.size() < 2 || layers.size() != net.layer_dims.size() - 1) {
        throw DataError("checkpoint: layer count does not match layer_dims");
    }
    for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
        const std::size_t in = net.layer_dims[l];
        const std::size_t out = net.layer_dims[l + 1];
        auto w = layers[l].at("weights").get<std::vector<double>>();
        auto b = layers[l].at("biases").get<std::vector<double>>();
        if (w.size() != in * out || b.size() != out) {
            throw DataError("checkpoint: parameter block shape mismatch");
        }
        net.weights.emplace_back(std::vector<std::size_t>{out, in}, std::move(w));
        net.biases.emplace_back(std::vector<std::size_t>{out}, std::move(b));
    }
    return net;
}

json schedule_to_json(const ScheduleParams& p) {
    return json{{"num_steps", p.num_steps},
                {"beta_start", p.beta_start},
                {"beta_end", p.beta_end}};
}

ScheduleParams schedule_from_json(const json& j) {
    ScheduleParams p;
    p.num_steps = j.at("num_steps").get<std::size_t>();
    p.beta_start = j.at("beta_start").get<double>();
    p.beta_end = j.at("beta_end").get<double>();
    return p;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("checkpoint: cannot write " + path);
    out << j.dump(1) << "\n";
}

json read_json(const std::string& path, const char* expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("checkpoint: invalid JSON in " + path + ": " + e.what());
    }
    if (j.value("format_version", 0) != kFormatVersion) {
        throw DataError("checkpoint: unsupported format_version in " + path);
    }
    if (j.value("model_kind", "") != expected_kind) {
        throw DataError("checkpoint: " + path + " is not a '" +
                        std::string(expected_kind) + "' checkpoint");
    }
    return j;
}

}  // namespace

void save_denoiser(const std::string& path, const Denoiser& model) {
    json j;
    j["format_version"] = kFormatVersion;
    j["model_kind"] = "denoiser";
    j["net"] = mlp_to_json(model.net);
    j["horizon"] = model.horizon;
    j["target_channels"] = model.target_channels;
    j["covariate_channels"] = model.covariate_channels;
    j["history_len"] = model.history_len;
    j["embed_dim"] = model.embed_dim;
    j["use_history"] = model.use_history;
    j["schedule"] = schedule_to_json(model.schedule_ref);
    write_json(path, j);
}

Denoiser load_denoiser(const std::string& path) {
    const json j = read_json(path, "denoiser");
    Denoiser model;
    model.net = mlp_from_json(j.at("net"));
    model.horizon = j.at("horizon").get<std::size_t>();
    model.target_channels = j.at("target_channels").get<std::size_t>();
    model.covariate_channels = j.at("covariate_channels").get<std::size_t>();
    model.history_len = j.at("history_len").get<std::size_t>();
    model.embed_dim = j.at("embed_dim").get<std::size_t>();
    model.use_history = j.at("use_history").get<bool>();
    model.schedule_ref = schedule_from_json(j.at("schedule"));
    if (model.net.input_dim() != model.input_dim() ||
        model.net.output_dim() != model.state_dim()) {
        throw DataError("checkpoint: network widths do not match model metadata");
    }
    return model;
}

void save_score_net(const std::string& path, const ScoreNet& model) {
    json j;
    j["format_version"] = kFormatVersion;
    j["model_kind"] = "score";
    j["net"] = mlp_to_json(model.net);
    j["state_len"] = model.state_len;
    j["covariate_len"] = model.covariate_len;
    j["embed_dim"] = model.embed_dim;
    j["use_timestep"] = model.use_timestep;
    j["schedule"] = schedule_to_json(model.schedule_ref);
    write_json(path, j);
}

ScoreNet load_score_net(const std::string& path) {
    const json j = read_json(path, "score");
    ScoreNet model;
    model.net = mlp_from_json(j.at("net"));
    model.state_len = j.at("state_len").get<std::size_t>();
    model.covariate_len = j.at("covariate_len").get<std::size_t>();
    model.embed_dim = j.at("embed_dim").get<std::size_t>();
    model.use_timestep = j.at("use_timestep").get<bool>();
    model.schedule_ref = schedule_from_json(j.at("schedule"));
    if (model.net.input_dim() != model.input_dim() || model.net.output_dim() != 1) {
        throw DataError("checkpoint: network widths do not match model metadata");
    }
    return model;
}

}  // namespace semguide
