#include "lpvss/schur.hpp"

#include <algorithm>
#include <cmath>

#include "lpvss/linalg.hpp"
#include "lpvss/optim.hpp"
#include "lpvss/rng.hpp"

namespace lpvss {

namespace {
constexpr double kEpsTildeClamp = 30.0;
}

void SchurFactors::validate() const {
    const std::size_t n = V.rows();
    if (n < 1 || V.cols() != n) throw ShapeMismatch("SchurFactors: V must be square with n >= 1");
    if (W.rows() != 2 * n || W.cols() != 2 * n)
        throw ShapeMismatch("SchurFactors: W must be 2n x 2n");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("SchurFactors: gamma must lie in (0, 1]");
    if (!std::isfinite(eps_tilde)) throw DataError("SchurFactors: eps_tilde is not finite");
    W.require_finite("SchurFactors W");
    V.require_finite("SchurFactors V");
}

Mat assemble_S(const Mat& W, double eps_tilde, bool* clamped) {
    if (W.rows() != W.cols() || W.rows() % 2 != 0)
        throw ShapeMismatch("assemble_S: W must be square with even dimension");
    const double bounded = std::clamp(eps_tilde, -kEpsTildeClamp, kEpsTildeClamp);
    if (clamped) *clamped = bounded != eps_tilde;
    const double eps = std::exp(bounded);

    Mat s = matmul(W.transposed(), W);
    for (std::size_t i = 0; i < s.rows(); ++i) s(i, i) += eps;
    return s;
}

Mat build_transition(const SchurFactors& f, TransitionParts* parts) {
    f.validate();
    const std::size_t n = f.order();

    bool clamped = false;
    const Mat s = assemble_S(f.W, f.eps_tilde, &clamped);

    const Mat s11 = s.block(0, 0, n, n);
    const Mat s12 = s.block(0, n, n, n);
    const Mat s22 = s.block(n, n, n, n);

    // bracket = (1/gamma^2)(S11 + S22) + V - V^T; its symmetric part is
    // positive definite, so the inverse below cannot fail for valid factors
    const double inv_g2 = 1.0 / (f.gamma * f.gamma);
    Mat bracket = (s11 + s22) * inv_g2;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) bracket(i, j) += f.V(i, j) - f.V(j, i);

    Mat bracket_inv = invert(bracket);
    Mat a = matmul(s12, bracket_inv);

    if (parts) {
        parts->W = f.W;
        parts->S12 = s12;
        parts->bracket_inv = std::move(bracket_inv);
        parts->eps = std::exp(std::clamp(f.eps_tilde, -kEpsTildeClamp, kEpsTildeClamp));
        parts->eps_clamped = clamped;
        parts->gamma = f.gamma;
    }
    return a;
}

SchurGradients build_transition_backward(const SchurFactors& f, const Mat& dA) {
    TransitionParts parts;
    build_transition(f, &parts);
    return build_transition_backward(parts, dA);
}

SchurGradients build_transition_backward(const TransitionParts& parts, const Mat& dA) {
    const std::size_t n = parts.S12.rows();
    if (dA.rows() != n || dA.cols() != n)
        throw ShapeMismatch("build_transition_backward: dA shape mismatch");

    const Mat& ninv = parts.bracket_inv;
    const Mat ninv_t = ninv.transposed();

    // A = S12 N with N = bracket^-1
    Mat dS12 = matmul(dA, ninv_t);
    // d(bracket) = -N^T S12^T dA N^T
    Mat dBracket = matmul(matmul(ninv_t, matmul(parts.S12.transposed(), dA)), ninv_t);
    dBracket *= -1.0;

    SchurGradients g;
    g.dV = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g.dV(i, j) = dBracket(i, j) - dBracket(j, i);

    // assemble dS from its three used blocks (S21 is never read)
    const double inv_g2 = 1.0 / (parts.gamma * parts.gamma);
    Mat dS(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double db = dBracket(i, j) * inv_g2;
            dS(i, j) = db;
            dS(n + i, n + j) = db;
            dS(i, n + j) = dS12(i, j);
        }
    }

    // S = W^T W + eps I  =>  dW = W (dS + dS^T), dEps = trace(dS)
    Mat sym = dS + dS.transposed();
    g.dW = matmul(parts.W, sym);

    double trace = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) trace += dS(i, i);
    g.dEpsTilde = parts.eps_clamped ? 0.0 : parts.eps * trace;
    return g;
}

FitResult fit_to_target(const Mat& a_target, double gamma, std::uint64_t seed,
                        std::size_t max_iterations) {
    if (a_target.rows() != a_target.cols())
        throw ShapeMismatch("fit_to_target: target must be square");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("fit_to_target: gamma must lie in (0, 1]");
    const std::size_t n = a_target.rows();

    Rng rng(seed, 5);
    SchurFactors f;
    f.W = Mat::identity(2 * n);
    for (std::size_t i = 0; i < f.W.size(); ++i) f.W.raw()[i] += 0.1 * rng.uniform(-1.0, 1.0);
    f.V = Mat(n, n);
    for (std::size_t i = 0; i < f.V.size(); ++i) f.V.raw()[i] = 0.1 * rng.uniform(-1.0, 1.0);
    f.eps_tilde = 0.0;
    f.gamma = gamma;

    FitResult result;
    result.target_unstable = spectral_radius(a_target).spectral_radius >= gamma;

    const std::size_t wn = f.W.size();
    const std::size_t vn = f.V.size();
    std::vector<double> params(wn + vn + 1);
    std::vector<double> grads(params.size());
    auto pack = [&] {
        std::copy(f.W.raw().begin(), f.W.raw().end(), params.begin());
        std::copy(f.V.raw().begin(), f.V.raw().end(), params.begin() + wn);
        params[wn + vn] = f.eps_tilde;
    };
    auto unpack = [&] {
        std::copy(params.begin(), params.begin() + wn, f.W.raw().begin());
        std::copy(params.begin() + wn, params.begin() + wn + vn, f.V.raw().begin());
        f.eps_tilde = params[wn + vn];
    };
    pack();

    AdamState adam(params.size());
    double best_residual = std::numeric_limits<double>::infinity();
    SchurFactors best = f;

    for (std::size_t it = 0; it < max_iterations; ++it) {
        TransitionParts parts;
        Mat a = build_transition(f, &parts);
        Mat diff = a - a_target;
        const double residual = frobenius_norm(diff);
        if (residual < best_residual) {
            best_residual = residual;
            best = f;
        }
        result.iterations = it + 1;
        if (residual < 1e-8) break;

        // gradient of 0.5 * ||A - target||_F^2
        SchurGradients g = build_transition_backward(parts, diff);
        std::copy(g.dW.raw().begin(), g.dW.raw().end(), grads.begin());
        std::copy(g.dV.raw().begin(), g.dV.raw().end(), grads.begin() + wn);
        grads[wn + vn] = g.dEpsTilde;

        adam_step(params, grads, adam, 1e-2);
        unpack();
    }

    result.factors = std::move(best);
    result.residual = best_residual;
    return result;
}

}  // namespace lpvss
