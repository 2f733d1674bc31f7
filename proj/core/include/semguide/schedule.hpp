#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace semguide {

/// Schedule parameters as serialized in run configs and checkpoints.
struct ScheduleParams {
    std::size_t num_steps = 200;
    double beta_start = 5e-4;
    double beta_end = 0.1;

    bool operator==(const ScheduleParams&) const = default;
};

/// Diffusion variance schedule. Step indices are 1-based (t in [1, T]);
/// vectors are stored at index t-1. alpha_bar is strictly decreasing with
/// the convention alpha_bar(0) = 1. sigma(1) = 0: the final reverse step is
/// deterministic. A terminal alpha_bar >= 0.05 leaves too much signal at
/// t = T; construction still succeeds but records (and prints) a warning.
struct NoiseSchedule {
    std::size_t num_steps = 0;
    std::vector<double> beta;
    std::vector<double> alpha;
    std::vector<double> alpha_bar;
    std::vector<double> sigma;
    ScheduleParams params;
    std::string warning;  // empty when the terminal alpha_bar target is met

    double beta_at(std::size_t t) const;
    double alpha_at(std::size_t t) const;
    /// alpha_bar_at(0) == 1 by convention.
    double alpha_bar_at(std::size_t t) const;
    double sigma_at(std::size_t t) const;
};

inline constexpr double kTerminalAlphaBarMax = 0.05;

NoiseSchedule make_linear_schedule(std::size_t num_steps, double beta_start,
                                   double beta_end);
NoiseSchedule make_schedule(const ScheduleParams& params);

/// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * z, elementwise.
/// z is the caller's standard-normal draw, passed explicitly for determinism.
std::vector<double> forward_noise(const NoiseSchedule& schedule,
                                  const std::vector<double>& x0, std::size_t t,
                                  const std::vector<double>& z);

/// x~_{t-1} = (x_t - ((1 - alpha_t)/sqrt(1 - alpha_bar_t)) * eps) / sqrt(alpha_t).
std::vector<double> denoise_estimate(const NoiseSchedule& schedule,
                                     const std::vector<double>& x_t,
                                     const std::vector<double>& eps, std::size_t t);

}  // namespace semguide
