#include "semguide/schedule.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace semguide {

namespace {

void check_step(const NoiseSchedule& s, std::size_t t) {
    if (t < 1 || t > s.num_steps) {
        throw std::invalid_argument("schedule: step index out of [1, T]");
    }
}

}  // namespace

double NoiseSchedule::beta_at(std::size_t t) const {
    check_step(*this, t);
    return beta[t - 1];
}

double NoiseSchedule::alpha_at(std::size_t t) const {
    check_step(*this, t);
    return alpha[t - 1];
}

double NoiseSchedule::alpha_bar_at(std::size_t t) const {
    if (t == 0) return 1.0;
    check_step(*this, t);
    return alpha_bar[t - 1];
}

double NoiseSchedule::sigma_at(std::size_t t) const {
    check_step(*this, t);
    return sigma[t - 1];
}

NoiseSchedule make_linear_schedule(std::size_t num_steps, double beta_start,
                                   double beta_end) {
    if (num_steps < 1) {
        throw std::invalid_argument("make_linear_schedule: num_steps must be >= 1");
    }
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
        throw std::invalid_argument(
            "make_linear_schedule: need 0 < beta_start <= beta_end < 1");
    }

    NoiseSchedule s;
    s.num_steps = num_steps;
    s.params = ScheduleParams{num_steps, beta_start, beta_end};
    s.beta.resize(num_steps);
    s.alpha.resize(num_steps);
    s.alpha_bar.resize(num_steps);
    s.sigma.resize(num_steps);

    double cum = 1.0;
    for (std::size_t i = 0; i < num_steps; ++i) {
        const double frac =
            num_steps == 1 ? 0.0
                           : static_cast<double>(i) / static_cast<double>(num_steps - 1);
        const double b = beta_start + (beta_end - beta_start) * frac;
        s.beta[i] = b;
        s.alpha[i] = 1.0 - b;
        cum *= s.alpha[i];
        s.alpha_bar[i] = cum;
        s.sigma[i] = (i == 0) ? 0.0 : std::sqrt(b);
    }

    if (s.alpha_bar.back() >= kTerminalAlphaBarMax) {
        std::ostringstream os;
        os << "terminal alpha_bar " << s.alpha_bar.back() << " >= "
           << kTerminalAlphaBarMax << " (T=" << num_steps
           << "); x_T retains signal, consider more steps or larger beta_end";
        s.warning = os.str();
        std::cerr << "[schedule] warning: " << s.warning << "\n";
    }
    return s;
}

NoiseSchedule make_schedule(const ScheduleParams& params) {
    return make_linear_schedule(params.num_steps, params.beta_start, params.beta_end);
}

std::vector<double> forward_noise(const NoiseSchedule& schedule,
                                  const std::vector<double>& x0, std::size_t t,
                                  const std::vector<double>& z) {
    check_step(schedule, t);
    if (x0.size() != z.size()) {
        throw std::invalid_argument("forward_noise: x0 and z dimension mismatch");
    }
    const double ab = schedule.alpha_bar_at(t);
    const double signal = std::sqrt(ab);
    const double noise = std::sqrt(1.0 - ab);
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) {
        out[i] = signal * x0[i] + noise * z[i];
    }
    return out;
}

std::vector<double> denoise_estimate(const NoiseSchedule& schedule,
                                     const std::vector<double>& x_t,
                                     const std::vector<double>& eps, std::size_t t) {
    check_step(schedule, t);
    if (x_t.size() != eps.size()) {
        throw std::invalid_argument("denoise_estimate: x_t and eps dimension mismatch");
    }
    const double a = schedule.alpha_at(t);
    const double ab = schedule.alpha_bar_at(t);
    if (1.0 - ab <= 0.0) {
        throw std::runtime_error("denoise_estimate: singular at alpha_bar == 1");
    }
    const double inv_sqrt_a = 1.0 / std::sqrt(a);
    const double coef = (1.0 - a) / std::sqrt(1.0 - ab);
    std::vector<double> out(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        out[i] = inv_sqrt_a * (x_t[i] - coef * eps[i]);
    }
    return out;
}

}  // namespace semguide
