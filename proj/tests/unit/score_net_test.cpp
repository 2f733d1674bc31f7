#include <doctest.h>

#include <cmath>
#include <fstream>

#include "semguide/errors.hpp"
#include "semguide/eval.hpp"
#include "semguide/score_net.hpp"
#include "semguide/synthetic.hpp"
#include "test_util.hpp"

using namespace semguide;

namespace {

Dataset regime_dataset(std::size_t windows, std::uint64_t seed,
                       std::size_t regimes = 4, std::size_t horizon = 8) {
    SyntheticSpec spec;
    spec.num_series = windows;
    spec.history_len = 4;
    spec.horizon = horizon;
    spec.num_regimes = regimes;
    spec.noise_std = 0.05;
    // Wide intensity range: same-regime negatives stay separable.
    spec.intensity_min = 0.5;
    spec.intensity_max = 1.5;
    Rng rng(seed);
    return synth_generate(spec, rng);
}

}  // namespace

TEST_CASE("build_pairs counting and labels") {
    const Dataset ds = regime_dataset(100, 1);
    const auto schedule = make_linear_schedule(20, 1e-3, 0.3);
    const auto windows = ds.normalized_subset(ds.train_indices());

    Rng rng(2);
    const auto positives_only = build_pairs(windows, schedule, 0, rng);
    CHECK(positives_only.size() == windows.size());
    for (const auto& p : positives_only) CHECK(p.label == 1);

    Rng rng2(3);
    const auto pairs = build_pairs(windows, schedule, 1, rng2);
    CHECK(pairs.size() == 2 * windows.size());
    std::size_t pos = 0;
    for (const auto& p : pairs) pos += p.label;
    CHECK(pos == windows.size());
}

TEST_CASE("negatives never borrow the window's own future") {
    const Dataset ds = regime_dataset(60, 4);
    const auto schedule = make_linear_schedule(20, 1e-3, 0.3);
    const auto windows = ds.normalized_subset(ds.train_indices());
    Rng rng(5);
    const auto pairs = build_pairs(windows, schedule, 3, rng);
    for (const auto& p : pairs) {
        if (p.label == 0) {
            CHECK(p.state_source != p.covariate_source);
        } else {
            CHECK(p.state_source == p.covariate_source);
        }
        CHECK(p.t >= 1);
        CHECK(p.t <= 20);
    }
}

TEST_CASE("pair construction rejects impossible negatives") {
    const auto schedule = make_linear_schedule(10, 1e-3, 0.3);
    const Dataset ds = regime_dataset(10, 6);
    auto one = ds.normalized_subset({0});
    Rng rng(7);
    CHECK_THROWS_AS((void)build_pairs(one, schedule, 1, rng), DataError);

    // Identical windows: distinct-value resampling must give up.
    auto twins = ds.normalized_subset({0, 0});
    CHECK_THROWS_AS((void)build_pairs(twins, schedule, 1, rng), DataError);

    // With no negatives requested, a single window is fine.
    const auto pairs = build_pairs(one, schedule, 0, rng);
    CHECK(pairs.size() == 1);
}

TEST_CASE("untrained net scores are uninformative, trained input errors checked") {
    const auto schedule = make_linear_schedule(20, 1e-3, 0.3);
    ScoreNetConfig cfg;
    cfg.hidden_dims = {128, 128};
    Rng rng(8);
    const ScoreNet model = make_score_net(cfg, 8, 5, schedule.params, rng);

    Rng probe(9);
    double mean = 0.0;
    std::size_t inside = 0;
    const std::size_t probes = 1000;
    for (std::size_t i = 0; i < probes; ++i) {
        const double s = score(model, probe.normal_vector(8), probe.normal_vector(5));
        mean += s;
        if (s > 0.3 && s < 0.7) ++inside;
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
    mean /= static_cast<double>(probes);
    CHECK(mean > 0.4);
    CHECK(mean < 0.6);
    CHECK(inside >= 900);  // near 0.5 for the overwhelming majority

    CHECK_THROWS(score(model, {1.0}, std::vector<double>(5, 0.0)));
    CHECK_THROWS(score(model, std::vector<double>(8, 0.0), std::vector<double>(5, 0.0), 3));
}

TEST_CASE("zero output layer scores exactly one half") {
    const auto schedule = make_linear_schedule(20, 1e-3, 0.3);
    ScoreNetConfig cfg;
    cfg.hidden_dims = {8};
    Rng rng(10);
    ScoreNet model = make_score_net(cfg, 4, 3, schedule.params, rng);
    for (auto& v : model.net.weights.back().values) v = 0.0;
    for (auto& v : model.net.biases.back().values) v = 0.0;
    CHECK(score(model, {1.0, -2.0, 0.5, 3.0}, {0.1, 0.2, 0.3}) == 0.5);
}

TEST_CASE("saturated logits stay strictly inside (0, 1)") {
    const auto schedule = make_linear_schedule(20, 1e-3, 0.3);
    ScoreNetConfig cfg;
    cfg.hidden_dims = {};
    Rng rng(11);
    ScoreNet model = make_score_net(cfg, 2, 1, schedule.params, rng);
    for (auto& v : model.net.weights[0].values) v = 1e6;
    const double hi = score(model, {1.0, 1.0}, {1.0});
    const double lo = score(model, {-1.0, -1.0}, {-1.0});
    CHECK(hi < 1.0);
    CHECK(hi > 0.999);
    CHECK(lo > 0.0);
    CHECK(lo < 0.001);
}

TEST_CASE("single-class pair sets are rejected") {
    const Dataset ds = regime_dataset(20, 12);
    const auto schedule = make_linear_schedule(10, 1e-3, 0.3);
    const auto windows = ds.normalized_subset(ds.train_indices());
    Rng rng(13);
    auto pairs = build_pairs(windows, schedule, 0, rng);  // all positive
    ScoreNetConfig cfg;
    CHECK_THROWS_AS((void)train_score_net(cfg, pairs, schedule.params, rng), TrainError);
}

TEST_CASE("trained scorer separates held-out pairs at low noise") {
    const Dataset ds = regime_dataset(200, 14, 6, 8);
    const auto schedule = make_linear_schedule(50, 1e-3, 0.25);

    const auto train_windows = ds.normalized_subset(ds.train_indices());
    Rng pair_rng(15);
    std::vector<ScorePair> pairs;
    for (int rep = 0; rep < 3; ++rep) {
        const auto more = build_pairs(train_windows, schedule, 1, pair_rng);
        pairs.insert(pairs.end(), more.begin(), more.end());
    }

    ScoreNetConfig cfg;
    cfg.hidden_dims = {64, 64};
    cfg.epochs = 80;
    cfg.learning_rate = 1e-3;
    Rng rng(16);
    const auto [model, report] = train_score_net(cfg, pairs, schedule.params, rng);
    CHECK(report.epoch_loss.back() < report.epoch_loss.front());

    // Held-out pairs, restricted to the low-noise band t <= T/10 by
    // constructing them against a truncated schedule with the same betas.
    const auto test_windows = ds.normalized_subset(ds.test_indices());
    Rng heldout_rng(17);
    std::vector<double> scores;
    std::vector<int> labels;
    double pos_mean = 0.0, neg_mean = 0.0;
    std::size_t pos_n = 0, neg_n = 0;
    for (int rep = 0; rep < 6; ++rep) {
        const auto heldout = build_pairs(test_windows, schedule, 1, heldout_rng);
        for (const auto& p : heldout) {
            if (p.t > schedule.num_steps / 10) continue;
            const double s = score(model, p.state, p.covariates);
            scores.push_back(s);
            labels.push_back(p.label);
            if (p.label == 1) {
                pos_mean += s;
                ++pos_n;
            } else {
                neg_mean += s;
                ++neg_n;
            }
        }
    }
    REQUIRE(pos_n > 5);
    REQUIRE(neg_n > 5);
    CHECK(auc(scores, labels) > 0.9);
    CHECK(pos_mean / pos_n > neg_mean / neg_n);
}

TEST_CASE("score training is seed-reproducible") {
    const Dataset ds = regime_dataset(40, 18);
    const auto schedule = make_linear_schedule(20, 1e-3, 0.3);
    const auto windows = ds.normalized_subset(ds.train_indices());
    ScoreNetConfig cfg;
    cfg.hidden_dims = {16};
    cfg.epochs = 10;
    Rng ra(19), rb(19);
    Rng pa(20), pb(20);
    const auto pairs_a = build_pairs(windows, schedule, 1, pa);
    const auto pairs_b = build_pairs(windows, schedule, 1, pb);
    const auto [ma, repa] = train_score_net(cfg, pairs_a, schedule.params, ra);
    const auto [mb, repb] = train_score_net(cfg, pairs_b, schedule.params, rb);
    CHECK(repa.epoch_loss == repb.epoch_loss);
    for (std::size_t l = 0; l < ma.net.num_layers(); ++l) {
        CHECK(ma.net.weights[l].values == mb.net.weights[l].values);
    }
}

TEST_CASE("timestep-conditioned scorer accepts and requires t") {
    const auto schedule = make_linear_schedule(20, 1e-3, 0.3);
    ScoreNetConfig cfg;
    cfg.hidden_dims = {8};
    cfg.use_timestep = true;
    cfg.embed_dim = 4;
    Rng rng(21);
    const ScoreNet model = make_score_net(cfg, 3, 2, schedule.params, rng);
    const std::vector<double> state = {0.1, 0.2, 0.3};
    const std::vector<double> cov = {1.0, -1.0};
    CHECK_THROWS(score(model, state, cov));
    const double s5 = score(model, state, cov, 5);
    const double s15 = score(model, state, cov, 15);
    CHECK(s5 != s15);  // embedding reaches the input
}

TEST_CASE("pairs export to csv") {
    const Dataset ds = regime_dataset(10, 22);
    const auto schedule = make_linear_schedule(10, 1e-3, 0.3);
    Rng rng(23);
    const auto pairs = build_pairs(ds.normalized_subset(ds.train_indices()), schedule,
                                   1, rng);
    testutil::TempDir dir("pairs_csv");
    pairs_to_csv(dir.str("pairs.csv"), pairs);
    std::ifstream in(dir.str("pairs.csv"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == pairs.size() + 1);
}
