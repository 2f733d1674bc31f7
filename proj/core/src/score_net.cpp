#include "semguide/score_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "semguide/csv.hpp"
#include "semguide/embedding.hpp"
#include "semguide/errors.hpp"
#include "semguide/optim.hpp"

namespace semguide {

namespace {

// Keeps scores strictly inside (0, 1) even when the sigmoid saturates in
// double precision; importance weights stay positive.
constexpr double kScoreFloor = 1e-12;

double clamp_score(double s) {
    return std::min(1.0 - kScoreFloor, std::max(kScoreFloor, s));
}

}  // namespace

std::vector<ScorePair> build_pairs(const std::vector<Window>& normalized_windows,
                                   const NoiseSchedule& schedule,
                                   std::size_t negatives_per_positive, Rng& rng) {
    const std::size_t n = normalized_windows.size();
    if (n == 0) throw DataError("build_pairs: no windows");
    if (negatives_per_positive > 0 && n < 2) {
        throw DataError("build_pairs: negatives need at least two windows");
    }

    std::vector<ScorePair> pairs;
    pairs.reserve(n * (1 + negatives_per_positive));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& w = normalized_windows[i];
        {
            ScorePair p;
            p.t = 1 + static_cast<std::size_t>(rng.next_below(schedule.num_steps));
            const auto z = rng.normal_vector(w.target.numel());
            p.state = forward_noise(schedule, w.target.values, p.t, z);
            p.covariates = w.covariates.values;
            p.label = 1;
            p.state_source = i;
            p.covariate_source = i;
            pairs.push_back(std::move(p));
        }
        for (std::size_t k = 0; k < negatives_per_positive; ++k) {
            std::size_t j = i;
            bool distinct = false;
            for (int attempt = 0; attempt < 100 && !distinct; ++attempt) {
                j = static_cast<std::size_t>(rng.next_below(n));
                distinct = (j != i) &&
                           (normalized_windows[j].target.values != w.target.values);
            }
            if (!distinct) {
                throw DataError(
                    "build_pairs: could not find a distinct window for a negative");
            }
            ScorePair p;
            p.t = 1 + static_cast<std::size_t>(rng.next_below(schedule.num_steps));
            const auto z = rng.normal_vector(w.target.numel());
            p.state = forward_noise(schedule, normalized_windows[j].target.values, p.t, z);
            p.covariates = w.covariates.values;
            p.label = 0;
            p.state_source = j;
            p.covariate_source = i;
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

void pairs_to_csv(const std::string& path, const std::vector<ScorePair>& pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("pairs_to_csv: cannot write " + path);
    out << "label,t,covariate_source,state_source,state...,covariates...\n";
    for (const auto& p : pairs) {
        out << p.label << ',' << p.t << ',' << p.covariate_source << ','
            << p.state_source;
        for (double v : p.state) out << ',' << format_double(v);
        for (double v : p.covariates) out << ',' << format_double(v);
        out << "\n";
    }
}

ScoreNet make_score_net(const ScoreNetConfig& cfg, std::size_t state_len,
                        std::size_t covariate_len, const ScheduleParams& schedule,
                        Rng& rng) {
    ScoreNet model;
    model.state_len = state_len;
    model.covariate_len = covariate_len;
    model.embed_dim = cfg.embed_dim;
    model.use_timestep = cfg.use_timestep;
    model.schedule_ref = schedule;

    std::vector<std::size_t> dims;
    dims.push_back(model.input_dim());
    for (auto d : cfg.hidden_dims) dims.push_back(d);
    dims.push_back(1);
    model.net = make_mlp(dims, Activation::silu, Activation::sigmoid, rng);
    return model;
}

namespace {

std::vector<double> assemble_score_input(const ScoreNet& model,
                                         const std::vector<double>& state,
                                         const std::vector<double>& covariates,
                                         std::optional<std::size_t> t) {
    if (state.size() != model.state_len) {
        throw std::invalid_argument("score: state dimension mismatch");
    }
    if (covariates.size() != model.covariate_len) {
        throw std::invalid_argument("score: covariate dimension mismatch");
    }
    if (model.use_timestep != t.has_value()) {
        throw std::invalid_argument(
            "score: timestep must be supplied iff use_timestep is set");
    }
    std::vector<double> input;
    input.reserve(model.input_dim());
    input.insert(input.end(), state.begin(), state.end());
    input.insert(input.end(), covariates.begin(), covariates.end());
    if (model.use_timestep) {
        const auto emb =
            timestep_embedding(*t, model.embed_dim, model.schedule_ref.num_steps);
        input.insert(input.end(), emb.begin(), emb.end());
    }
    return input;
}

}  // namespace

double score(const ScoreNet& model, const std::vector<double>& state,
             const std::vector<double>& covariates, std::optional<std::size_t> t) {
    const auto input = assemble_score_input(model, state, covariates, t);
    return clamp_score(mlp_forward(model.net, input)[0]);
}

std::pair<ScoreNet, TrainReport> train_score_net(const ScoreNetConfig& cfg,
                                                 const std::vector<ScorePair>& pairs,
                                                 const ScheduleParams& schedule,
                                                 Rng& rng) {
    if (pairs.empty()) throw TrainError("train_score_net: no pairs");
    bool has_pos = false, has_neg = false;
    for (const auto& p : pairs) {
        (p.label == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw TrainError("train_score_net: pairs must contain both labels");
    }

    const std::size_t state_len = pairs.front().state.size();
    const std::size_t cov_len = pairs.front().covariates.size();
    ScoreNet model = make_score_net(cfg, state_len, cov_len, schedule, rng);

    // Deterministic 90/10 split of the pair list.
    const std::size_t val_start = pairs.size() - pairs.size() / 10;
    std::vector<const ScorePair*> train_set, val_set;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        (i < val_start ? train_set : val_set).push_back(&pairs[i]);
    }
    if (train_set.empty()) throw TrainError("train_score_net: empty train split");

    auto bce_forward = [&](const ScorePair& p, Gradients* grads, ForwardCache& cache,
                           double weight) {
        const auto input = assemble_score_input(
            model, p.state, p.covariates,
            model.use_timestep ? std::optional<std::size_t>(p.t) : std::nullopt);
        const auto out = mlp_forward(model.net, input, grads ? &cache : nullptr);
        const double s = clamp_score(out[0]);
        const double y = static_cast<double>(p.label);
        const double loss = -(y * std::log(s) + (1.0 - y) * std::log(1.0 - s));
        if (grads) {
            // d(BCE)/d(sigmoid output), chain through the sigmoid happens in
            // mlp_backward via the activation derivative.
            const double dout = (-(y / s) + (1.0 - y) / (1.0 - s)) * weight;
            mlp_backward(model.net, cache, {dout}, *grads);
        }
        return loss;
    };

    auto eval_loss = [&](const std::vector<const ScorePair*>& set) {
        if (set.empty()) return 0.0;
        double total = 0.0;
        ForwardCache cache;
        for (const auto* p : set) total += bce_forward(*p, nullptr, cache, 0.0);
        return total / static_cast<double>(set.size());
    };

    TrainReport report;
    report.seed = rng.seed();

    OptimState opt = make_optim_state(model.net, cfg.learning_rate, cfg.weight_decay);
    const std::size_t batch = cfg.batch_size == 0 ? 1 : cfg.batch_size;

    Mlp best_net = model.net;
    double best_val = eval_loss(val_set.empty() ? train_set : val_set);

    ForwardCache cache;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = shuffled_indices(train_set.size(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            const double inv_b = 1.0 / static_cast<double>(end - start);
            Gradients grads = zero_gradients(model.net);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                batch_loss += bce_forward(*train_set[order[k]], &grads, cache, inv_b);
            }
            batch_loss *= inv_b;
            if (!std::isfinite(batch_loss)) {
                std::ostringstream os;
                os << "train_score_net: non-finite loss at epoch " << (epoch + 1);
                throw TrainError(os.str());
            }
            adamw_step(opt, model.net, grads);
            epoch_loss += batch_loss;
            ++batches;
        }
        epoch_loss /= static_cast<double>(batches);
        const double val = eval_loss(val_set.empty() ? train_set : val_set);
        report.epoch_loss.push_back(epoch_loss);
        report.epoch_val_loss.push_back(val);
        if (val < best_val) {
            best_val = val;
            best_net = model.net;
        }
    }

    if (cfg.epochs > 0) model.net = best_net;
    report.final_val_loss = best_val;
    report.epochs_run = cfg.epochs;
    return {std::move(model), std::move(report)};
}

}  // namespace semguide
