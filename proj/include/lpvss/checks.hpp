#pragma once

#include <cstdint>
#include <functional>

#include "lpvss/model.hpp"
#include "lpvss/train.hpp"

namespace lpvss {

// Finite-difference validation of the analytic gradients. The reference is
// always a central difference of forward-only evaluations; "relative error"
// is |analytic - fd| / max(1, |analytic|, |fd|).
struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
};

double fd_relative_error(double analytic, double fd);

// central difference of a scalar function over a parameter vector
GradCheckResult compare_gradient(const std::function<double(std::span<const double>)>& loss,
                                 std::span<double> params, std::span<const double> analytic,
                                 double step = 1e-6);

// build_transition_backward vs finite differences on random factors
GradCheckResult check_schur_backward(std::size_t n, double gamma, std::uint64_t seed,
                                     std::size_t cases);

// layers_backward (generator-style MLP) vs finite differences
GradCheckResult check_net_backward(std::uint64_t seed, std::size_t cases);

// end-to-end total-loss gradient through a random NN-SS rollout
GradCheckResult check_rollout_backward(std::size_t n, std::size_t m, std::size_t r, std::size_t L,
                                       double lambda, std::uint64_t seed);

// total loss (printed normalization) of one window under the given model;
// forward-only, shared by the finite-difference harnesses
double window_total_loss(const NnssModel& model, const std::vector<Vec>& y,
                         const std::vector<Vec>& u, double lambda);

// Random-factor sampling of the stability guarantee: draws W, V entries
// uniform in [-3, 3] and eps_tilde in [-6, 2], then checks
// spectral_radius(build_transition(f)) < gamma.
struct StabilityCheckResult {
    std::size_t samples = 0;
    std::size_t violations = 0;
    std::size_t singular_failures = 0;
    double max_radius_ratio = 0.0;  // max over draws of rho(A) / gamma
};

StabilityCheckResult stability_check(std::size_t samples, std::size_t n, double gamma,
                                     std::uint64_t seed);

}  // namespace lpvss
