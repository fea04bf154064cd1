#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lpvss/errors.hpp"

namespace lpvss {

// Adam accumulator state. Moment vectors mirror the flat parameter vector.
struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::size_t step_count = 0;

    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double eps_adam = 1e-8;

    explicit AdamState(std::size_t param_count = 0)
        : first_moment(param_count, 0.0), second_moment(param_count, 0.0) {}
};

// One bias-corrected Adam update, in place.
inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
                      double learning_rate) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size())
        throw ShapeMismatch("adam_step: parameter/gradient/state sizes differ");

    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(AdamState::beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(AdamState::beta2, static_cast<double>(state.step_count));

    for (std::size_t i = 0; i < params.size(); ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        const double g = grads[i];
        m = AdamState::beta1 * m + (1.0 - AdamState::beta1) * g;
        v = AdamState::beta2 * v + (1.0 - AdamState::beta2) * g * g;
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + AdamState::eps_adam);
    }
}

}  // namespace lpvss
