#include <doctest.h>

#include <cmath>

#include "semguide/rng.hpp"
#include "semguide/schedule.hpp"

using namespace semguide;

TEST_CASE("single-step schedule") {
    const auto s = make_linear_schedule(1, 0.5, 0.5);
    CHECK(s.beta == std::vector<double>{0.5});
    CHECK(s.alpha == std::vector<double>{0.5});
    CHECK(s.alpha_bar == std::vector<double>{0.5});
    CHECK(s.sigma_at(1) == 0.0);
}

TEST_CASE("two-step schedule accumulates the product") {
    const auto s = make_linear_schedule(2, 0.1, 0.3);
    CHECK(s.alpha_bar_at(1) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(s.alpha_bar_at(2) == doctest::Approx(0.63).epsilon(1e-15));
    CHECK(s.sigma_at(1) == 0.0);
    CHECK(s.sigma_at(2) == doctest::Approx(std::sqrt(0.3)).epsilon(1e-15));
}

TEST_CASE("shallow 50-step schedule keeps too much signal and warns") {
    const auto s = make_linear_schedule(50, 1e-4, 0.02);

    // Independent direct product over the 50 interpolated terms.
    double prod = 1.0;
    for (int i = 0; i < 50; ++i) {
        prod *= 1.0 - (1e-4 + (0.02 - 1e-4) * i / 49.0);
    }
    CHECK(s.alpha_bar_at(50) == doctest::Approx(prod).epsilon(1e-12));
    CHECK(s.alpha_bar_at(50) == doctest::Approx(0.602951597329715).epsilon(1e-12));
    CHECK(s.alpha_bar_at(50) >= kTerminalAlphaBarMax);
    CHECK(!s.warning.empty());
}

TEST_CASE("default schedule meets the terminal signal target") {
    const auto s = make_schedule(ScheduleParams{});
    CHECK(s.num_steps == 200);
    CHECK(s.warning.empty());
    CHECK(s.alpha_bar_at(200) < kTerminalAlphaBarMax);
    for (std::size_t t = 2; t <= 200; ++t) {
        CHECK(s.alpha_bar_at(t) < s.alpha_bar_at(t - 1));  // strictly decreasing
        CHECK(s.sigma_at(t) == doctest::Approx(std::sqrt(s.beta_at(t))).epsilon(1e-15));
    }
    CHECK(s.alpha_bar_at(0) == 1.0);
    CHECK(s.sigma_at(1) == 0.0);
}

TEST_CASE("construction is deterministic") {
    const auto a = make_linear_schedule(100, 1e-3, 0.05);
    const auto b = make_linear_schedule(100, 1e-3, 0.05);
    CHECK(a.beta == b.beta);
    CHECK(a.alpha_bar == b.alpha_bar);
    CHECK(a.sigma == b.sigma);
}

TEST_CASE("schedule preconditions") {
    CHECK_THROWS(make_linear_schedule(0, 0.1, 0.2));
    CHECK_THROWS(make_linear_schedule(10, 0.0, 0.2));
    CHECK_THROWS(make_linear_schedule(10, 0.3, 0.2));
    CHECK_THROWS(make_linear_schedule(10, 0.1, 1.0));
}

TEST_CASE("forward_noise matches the affine form") {
    // Near-zero noise limit: alpha_bar ~= 1 returns x0.
    const auto tiny = make_linear_schedule(1, 1e-12, 1e-12);
    const std::vector<double> x0 = {2.0, -3.0};
    const auto out0 = forward_noise(tiny, x0, 1, {5.0, 5.0});
    CHECK(out0[0] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(out0[1] == doctest::Approx(-3.0).epsilon(1e-5));

    // alpha_bar = 0.25 exactly with one step of beta = 0.75; z = 0.
    const auto quarter = make_linear_schedule(1, 0.75, 0.75);
    CHECK(forward_noise(quarter, {2.0}, 1, {0.0}) == std::vector<double>{1.0});

    // alpha_bar = 0.5: both terms sqrt(0.5).
    const auto half = make_linear_schedule(1, 0.5, 0.5);
    const auto out = forward_noise(half, {1.0, -1.0}, 1, {1.0, 1.0});
    CHECK(out[0] == doctest::Approx(1.4142135623730951).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS(forward_noise(half, {1.0}, 2, {1.0}));   // t out of range
    CHECK_THROWS(forward_noise(half, {1.0}, 1, {1.0, 2.0}));  // dim mismatch
}

TEST_CASE("denoise_estimate matches the closed form") {
    const auto half = make_linear_schedule(1, 0.5, 0.5);
    // eps = 0: x / sqrt(alpha).
    const auto out = denoise_estimate(half, {3.0}, {0.0}, 1);
    CHECK(out[0] == doctest::Approx(3.0 / std::sqrt(0.5)).epsilon(1e-15));

    // Hand evaluation at alpha = 0.99, alpha_bar = 0.5.
    NoiseSchedule s;
    s.num_steps = 1;
    s.beta = {0.01};
    s.alpha = {0.99};
    s.alpha_bar = {0.5};
    s.sigma = {0.0};
    const auto v = denoise_estimate(s, {1.0}, {0.2}, 1);
    CHECK(v[0] == doctest::Approx(1.0021951390411372).epsilon(1e-12));

    NoiseSchedule singular = s;
    singular.alpha_bar = {1.0};
    CHECK_THROWS(denoise_estimate(singular, {1.0}, {0.2}, 1));
}

TEST_CASE("perfect-oracle single-step inversion recovers x0") {
    const auto s = make_schedule(ScheduleParams{});
    Rng rng(123);
    for (int rep = 0; rep < 20; ++rep) {
        const auto x0 = rng.normal_vector(16);
        const auto z = rng.normal_vector(16);
        const auto x1 = forward_noise(s, x0, 1, z);
        const auto back = denoise_estimate(s, x1, z, 1);
        for (std::size_t i = 0; i < x0.size(); ++i) {
            const double rel = std::abs(back[i] - x0[i]) /
                               std::max(1e-12, std::abs(x0[i]));
            CHECK(rel < 1e-10);
        }
    }
}
