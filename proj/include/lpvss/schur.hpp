#pragma once

#include <cstdint>
#include <cstddef>

#include "lpvss/mat.hpp"

namespace lpvss {

// Free parameters behind one Schur-stable transition matrix of order n:
// W is 2n x 2n, V is n x n, eps_tilde feeds eps = exp(eps_tilde), and
// gamma in (0, 1] is the stability-disk radius.
struct SchurFactors {
    Mat W;
    Mat V;
    double eps_tilde = 0.0;
    double gamma = 1.0;

    std::size_t order() const { return V.rows(); }
    void validate() const;
};

struct SchurGradients {
    Mat dW;
    Mat dV;
    double dEpsTilde = 0.0;
};

// Intermediates of build_transition kept for the backward pass.
struct TransitionParts {
    Mat W;            // copy of the factors actually used
    Mat S12;          // top-right n x n block of S
    Mat bracket_inv;  // inverse of (1/gamma^2)(S11 + S22) + V - V^T
    double eps = 1.0;
    bool eps_clamped = false;
    double gamma = 1.0;
};

// S = W^T W + exp(eps_tilde) I. eps_tilde is clamped to [-30, 30] before
// exponentiation; when `clamped` is non-null it reports whether that fired.
Mat assemble_S(const Mat& W, double eps_tilde, bool* clamped = nullptr);

// The stable-by-design map: A = S12 [ (1/gamma^2)(S11 + S22) + V - V^T ]^-1.
// Every output satisfies spectral_radius(A) < gamma. When `parts` is
// non-null the intermediates needed by the backward pass are stored there.
Mat build_transition(const SchurFactors& f, TransitionParts* parts = nullptr);

// Reverse-mode gradients of a scalar loss through build_transition, given
// the upstream gradient dA. The second overload reuses cached intermediates.
SchurGradients build_transition_backward(const SchurFactors& f, const Mat& dA);
SchurGradients build_transition_backward(const TransitionParts& parts, const Mat& dA);

struct FitResult {
    SchurFactors factors;
    double residual = 0.0;       // ||build_transition(factors) - target||_F
    std::size_t iterations = 0;
    bool target_unstable = false;  // spectral_radius(target) >= gamma
};

// Frobenius-norm fit of the parameterization to a target matrix: Adam from a
// seeded random start (lr 1e-2, at most `max_iterations` steps, early exit
// once the residual drops below 1e-8). Targets outside the reachable set
// leave a nonzero floor residual and set target_unstable.
FitResult fit_to_target(const Mat& a_target, double gamma, std::uint64_t seed,
                        std::size_t max_iterations = 5000);

}  // namespace lpvss
