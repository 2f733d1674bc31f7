#include <doctest.h>

#include <fstream>

#include "semguide/checkpoint.hpp"
#include "semguide/errors.hpp"
#include "semguide/synthetic.hpp"
#include "test_util.hpp"

using namespace semguide;

namespace {

Dataset small_dataset() {
    SyntheticSpec spec;
    spec.num_series = 10;
    spec.history_len = 4;
    spec.horizon = 3;
    spec.num_regimes = 2;
    Rng rng(1);
    return synth_generate(spec, rng);
}

}  // namespace

TEST_CASE("denoiser checkpoint round-trips bit-exactly") {
    const Dataset ds = small_dataset();
    const ScheduleParams params{30, 1e-3, 0.2};
    DenoiserConfig cfg;
    cfg.hidden_dims = {12, 7};
    cfg.embed_dim = 6;
    Rng rng(2);
    const Denoiser model = make_denoiser(cfg, ds, params, rng);

    testutil::TempDir dir("ckpt_denoiser");
    save_denoiser(dir.str("d.json"), model);
    const Denoiser back = load_denoiser(dir.str("d.json"));

    CHECK(back.net.layer_dims == model.net.layer_dims);
    CHECK(back.schedule_ref == model.schedule_ref);
    for (std::size_t l = 0; l < model.net.num_layers(); ++l) {
        CHECK(back.net.weights[l].values == model.net.weights[l].values);
        CHECK(back.net.biases[l].values == model.net.biases[l].values);
    }

    // Bitwise identical predictions after the round-trip.
    Rng prng(3);
    const auto cond = build_conditioning(ds.normalized(0), model.use_history);
    const auto x_t = prng.normal_vector(model.state_dim());
    CHECK(predict_noise(model, x_t, cond, 5) == predict_noise(back, x_t, cond, 5));
}

TEST_CASE("score checkpoint round-trips bit-exactly") {
    const ScheduleParams params{30, 1e-3, 0.2};
    ScoreNetConfig cfg;
    cfg.hidden_dims = {9};
    cfg.use_timestep = true;
    cfg.embed_dim = 4;
    Rng rng(4);
    const ScoreNet model = make_score_net(cfg, 6, 4, params, rng);

    testutil::TempDir dir("ckpt_score");
    save_score_net(dir.str("s.json"), model);
    const ScoreNet back = load_score_net(dir.str("s.json"));
    CHECK(back.use_timestep == model.use_timestep);

    Rng prng(5);
    const auto state = prng.normal_vector(6);
    const auto cov = prng.normal_vector(4);
    CHECK(score(model, state, cov, 7) == score(back, state, cov, 7));
}

TEST_CASE("checkpoint kind and shape validation") {
    const Dataset ds = small_dataset();
    const ScheduleParams params{30, 1e-3, 0.2};
    DenoiserConfig cfg;
    cfg.hidden_dims = {5};
    cfg.embed_dim = 4;
    Rng rng(6);
    const Denoiser model = make_denoiser(cfg, ds, params, rng);

    testutil::TempDir dir("ckpt_err");
    save_denoiser(dir.str("d.json"), model);
    CHECK_THROWS_AS((void)load_score_net(dir.str("d.json")), DataError);
    CHECK_THROWS_AS((void)load_denoiser(dir.str("missing.json")), DataError);

    // Corrupt a layer width in place.
    std::ifstream in(dir.str("d.json"));
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    in.close();
    const auto pos = text.find("\"horizon\": 3");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"horizon\": 9");
    std::ofstream(dir.str("bad.json")) << text;
    CHECK_THROWS_AS((void)load_denoiser(dir.str("bad.json")), DataError);
}
