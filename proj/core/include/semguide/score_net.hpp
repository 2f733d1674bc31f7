#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semguide/data.hpp"
#include "semguide/mlp.hpp"
#include "semguide/rng.hpp"
#include "semguide/schedule.hpp"
#include "semguide/train_report.hpp"

namespace semguide {

struct ScoreNetConfig {
    std::vector<std::size_t> hidden_dims = {128, 128};
    std::size_t epochs = 400;
    double learning_rate = 1e-3;
    double weight_decay = 1e-5;
    std::size_t batch_size = 64;
    std::size_t negatives_per_positive = 1;
    bool use_timestep = false;
    std::size_t embed_dim = 64;
};

/// One contrastive training example: a diffusion-noised future state paired
/// with covariates, labeled 1 when the state came from the covariates' own
/// window and 0 when it came from a different window.
struct ScorePair {
    std::vector<double> state;
    std::vector<double> covariates;
    int label = 0;
    std::size_t t = 0;              // diffusion step used to noise the state
    std::size_t state_source = 0;   // window index the state was built from
    std::size_t covariate_source = 0;
};

/// Builds positives (own future, noised at uniform t) and
/// negatives_per_positive negatives per window (another window's future,
/// noised at a fresh t, paired with this window's covariates). Windows must
/// already be normalized.
std::vector<ScorePair> build_pairs(const std::vector<Window>& normalized_windows,
                                   const NoiseSchedule& schedule,
                                   std::size_t negatives_per_positive, Rng& rng);

void pairs_to_csv(const std::string& path, const std::vector<ScorePair>& pairs);

/// Semantic alignment scorer S(state, covariates) in (0, 1); sigmoid head.
struct ScoreNet {
    Mlp net;
    std::size_t state_len = 0;
    std::size_t covariate_len = 0;
    std::size_t embed_dim = 0;
    bool use_timestep = false;
    ScheduleParams schedule_ref;

    std::size_t input_dim() const {
        return state_len + covariate_len + (use_timestep ? embed_dim : 0);
    }
};

ScoreNet make_score_net(const ScoreNetConfig& cfg, std::size_t state_len,
                        std::size_t covariate_len, const ScheduleParams& schedule,
                        Rng& rng);

/// Binary cross-entropy training over a fixed pair set (chronological 90/10
/// train/val split of the pairs). Requires both labels present.
std::pair<ScoreNet, TrainReport> train_score_net(const ScoreNetConfig& cfg,
                                                 const std::vector<ScorePair>& pairs,
                                                 const ScheduleParams& schedule,
                                                 Rng& rng);

/// t must be supplied iff the model was built with use_timestep.
double score(const ScoreNet& model, const std::vector<double>& state,
             const std::vector<double>& covariates,
             std::optional<std::size_t> t = std::nullopt);

}  // namespace semguide
