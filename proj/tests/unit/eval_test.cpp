#include <doctest.h>

#include <cmath>
#include <fstream>

#include "semguide/errors.hpp"
#include "semguide/eval.hpp"
#include "semguide/sampler.hpp"
#include "semguide/synthetic.hpp"
#include "test_util.hpp"

using namespace semguide;

TEST_CASE("mse and mae basics") {
    CHECK(mse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(mae({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(mse({3.0, 4.0}, {1.0, 2.0}) == 4.0);
    CHECK(mae({3.0, 4.0}, {1.0, 2.0}) == 2.0);
    CHECK(mse({1.0, -3.0}, {0.0, 0.0}) == 5.0);
    CHECK(mae({1.0, -3.0}, {0.0, 0.0}) == 2.0);
    CHECK_THROWS(mse({1.0}, {1.0, 2.0}));

    // Symmetry.
    Rng rng(1);
    const auto a = rng.normal_vector(20);
    const auto b = rng.normal_vector(20);
    CHECK(mse(a, b) == mse(b, a));
    CHECK(mae(a, b) == mae(b, a));
}

TEST_CASE("pooled metrics average over every element") {
    const std::vector<std::vector<double>> pred = {{1.0, 1.0}, {2.0}};
    const std::vector<std::vector<double>> truth = {{0.0, 0.0}, {0.0}};
    CHECK(mse(pred, truth) == doctest::Approx(6.0 / 3.0));
    CHECK(mae(pred, truth) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("auc rank statistic") {
    CHECK(auc({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0}) == 1.0);
    CHECK(auc({0.1, 0.2, 0.9, 0.8}, {1, 1, 0, 0}) == 0.0);
    CHECK(auc({0.5, 0.5, 0.5, 0.5}, {1, 1, 0, 0}) == 0.5);
    // One inversion out of four pairings.
    CHECK(auc({0.9, 0.3, 0.4, 0.1}, {1, 1, 0, 0}) == doctest::Approx(0.75));
    CHECK_THROWS(auc({0.5}, {1}));
}

TEST_CASE("regime accuracy against the oracle") {
    SyntheticSpec spec;
    spec.num_series = 12;
    spec.history_len = 4;
    spec.horizon = 6;
    spec.num_regimes = 3;
    spec.noise_std = 0.05;
    Rng rng(2);
    const Dataset ds = synth_generate(spec, rng);

    std::vector<std::vector<double>> correct, wrong;
    std::vector<Window> windows;
    for (const auto& w : ds.windows) {
        const auto regime = static_cast<std::size_t>(w.regime_label);
        const double intensity = covariate_intensity(w);
        correct.push_back(ds.oracle->mode_location(regime, intensity));
        wrong.push_back(ds.oracle->mode_location(ds.oracle->alternate_regime(regime),
                                                 intensity));
        windows.push_back(w);
    }
    CHECK(regime_accuracy(correct, windows, *ds.oracle) == 1.0);
    CHECK(regime_accuracy(wrong, windows, *ds.oracle) == 0.0);
}

TEST_CASE("denormalized metrics relate by the channel scale factors") {
    SyntheticSpec spec;
    spec.num_series = 40;
    spec.history_len = 4;
    spec.horizon = 5;
    spec.num_regimes = 2;
    Rng rng(3);
    const Dataset ds = synth_generate(spec, rng);
    REQUIRE(ds.target_channels == 1);
    const double sd = ds.target_norm.stddev[0];

    const auto test_idx = ds.test_indices();
    std::vector<std::vector<double>> forecasts;
    Rng frng(4);
    for (std::size_t k = 0; k < test_idx.size(); ++k) {
        auto truth = ds.normalized(test_idx[k]).target.values;
        for (auto& v : truth) v += 0.3 * frng.normal();  // imperfect forecast
        forecasts.push_back(std::move(truth));
    }
    const auto report = compute_metrics(ds, test_idx, forecasts, "baseline", 1);
    CHECK(report.mae_raw == doctest::Approx(report.mae_norm * sd).epsilon(1e-10));
    CHECK(report.mse_raw == doctest::Approx(report.mse_norm * sd * sd).epsilon(1e-10));
    CHECK(report.num_windows == test_idx.size());
    REQUIRE(report.regime_accuracy.has_value());
}

TEST_CASE("metrics csv columns") {
    MetricsReport r;
    r.method = "baseline";
    r.sample_count = 7;
    r.num_windows = 3;
    r.mse_norm = 0.5;
    r.mae_norm = 0.25;
    r.mse_raw = 1.0;
    r.mae_raw = 0.5;
    testutil::TempDir dir("metrics_csv");
    write_metrics_csv(dir.str("metrics.csv"), {r});
    std::ifstream in(dir.str("metrics.csv"));
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header ==
          "method,n,num_windows,mse,mae,mse_raw,mae_raw,regime_accuracy,"
          "mean_consistency_score");
    CHECK(row == "baseline,7,3,0.5,0.25,1,0.5,,");
}

namespace {

/// Tiny untrained models over a tiny dataset; enough for sweep plumbing.
struct SweepFixture {
    Dataset ds;
    NoiseSchedule schedule = make_linear_schedule(8, 1e-2, 0.4);
    Denoiser model;
    ScoreNet score_model;

    SweepFixture() {
        SyntheticSpec spec;
        spec.num_series = 20;
        spec.history_len = 3;
        spec.horizon = 4;
        spec.num_regimes = 2;
        Rng rng(5);
        ds = synth_generate(spec, rng);
        DenoiserConfig dcfg;
        dcfg.hidden_dims = {8};
        dcfg.embed_dim = 4;
        Rng drng(6);
        model = make_denoiser(dcfg, ds, schedule.params, drng);
        ScoreNetConfig scfg;
        scfg.hidden_dims = {8};
        Rng srng(7);
        score_model = make_score_net(scfg, model.state_dim(),
                                     ds.horizon * ds.covariate_channels,
                                     schedule.params, srng);
    }
};

}  // namespace

TEST_CASE("sweep over {1} collapses both methods to the same cells") {
    SweepFixture fx;
    const auto result = sample_efficiency_sweep(fx.model, fx.score_model, fx.schedule,
                                                fx.ds, {1}, {42}, 1);
    REQUIRE(result.cells.size() == 2);
    CHECK(result.cells[0].method == "baseline");
    CHECK(result.cells[1].method == "semguide");
    CHECK(result.cells[0].mse == result.cells[1].mse);
    CHECK(result.cells[0].mae == result.cells[1].mae);
}

TEST_CASE("sweep is deterministic in its metric fields") {
    SweepFixture fx;
    const auto a = sample_efficiency_sweep(fx.model, fx.score_model, fx.schedule, fx.ds,
                                           {1, 3}, {1, 2}, 1);
    const auto b = sample_efficiency_sweep(fx.model, fx.score_model, fx.schedule, fx.ds,
                                           {1, 3}, {1, 2}, 2);
    REQUIRE(a.cells.size() == b.cells.size());
    REQUIRE(a.cells.size() == 8);  // 2 methods x 2 grid x 2 seeds
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].method == b.cells[i].method);
        CHECK(a.cells[i].n == b.cells[i].n);
        CHECK(a.cells[i].seed == b.cells[i].seed);
        CHECK(a.cells[i].mse == b.cells[i].mse);
        CHECK(a.cells[i].mae == b.cells[i].mae);
    }
}

TEST_CASE("sweep csv header is the documented contract") {
    SweepFixture fx;
    const auto result = sample_efficiency_sweep(fx.model, fx.score_model, fx.schedule,
                                                fx.ds, {1}, {9}, 1);
    testutil::TempDir dir("sweep_csv");
    write_sweep_csv(dir.str("sweep.csv"), result);
    std::ifstream in(dir.str("sweep.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "method,n,seed,mse,mae,wall_s");
}

TEST_CASE("forecast_window validates the method name") {
    SweepFixture fx;
    Rng rng(10);
    const auto normalized = fx.ds.normalized(0);
    CHECK_THROWS_WITH_AS(
        (void)forecast_window(fx.model, &fx.score_model, fx.schedule, normalized,
                              "bogus", 1, rng),
        doctest::Contains("baseline"), ConfigError);
}
