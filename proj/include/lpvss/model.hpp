#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lpvss/linalg.hpp"
#include "lpvss/net.hpp"
#include "lpvss/schur.hpp"

namespace lpvss {

struct StepMatrices {
    Mat A;
    Mat B;
    Mat C;
};

// Result of one rollout over K+1 input samples: states x(0..K+1), outputs
// y(0..K), plus optional per-step matrices and audited spectral radii.
struct RolloutTrace {
    std::vector<Vec> states;
    std::vector<Vec> outputs;
    std::vector<StepMatrices> step_matrices;  // filled when record_matrices
    std::vector<double> spectral_radii;       // filled when audit
};

struct InferOptions {
    bool audit = false;
    bool record_matrices = false;
};

// Shared recursion of the state-space family: x(k+1) = A_k x(k) + B_k u(k),
// y(k) = C_k x(k). `source(k, x, out)` supplies the step matrices; the NN-SS
// model plugs in its generator, the constant baseline its fixed matrices,
// and tests may inject rigged constants.
template <typename Source>
RolloutTrace rollout_recursion(Source&& source, Vec x0, std::span<const Vec> u_seq,
                               const InferOptions& opts = {}) {
    const std::size_t horizon = u_seq.size();  // K + 1 steps
    RolloutTrace trace;
    trace.states.reserve(horizon + 1);
    trace.outputs.reserve(horizon);
    if (opts.record_matrices) trace.step_matrices.reserve(horizon);
    if (opts.audit) trace.spectral_radii.reserve(horizon);

    trace.states.push_back(std::move(x0));
    StepMatrices sm;
    for (std::size_t k = 0; k < horizon; ++k) {
        const Vec& x = trace.states.back();
        source(k, x, sm);

        Vec y(sm.C.rows());
        matvec(sm.C, std::span<const double>(x), std::span<double>(y));
        trace.outputs.push_back(std::move(y));

        Vec x_next(sm.A.rows());
        matvec(sm.A, std::span<const double>(x), std::span<double>(x_next));
        for (std::size_t i = 0; i < x_next.size(); ++i) {
            double acc = 0.0;
            const double* row = sm.B.data() + i * sm.B.cols();
            for (std::size_t j = 0; j < sm.B.cols(); ++j) acc += row[j] * u_seq[k][j];
            x_next[i] += acc;
        }
        trace.states.push_back(std::move(x_next));

        if (opts.audit) trace.spectral_radii.push_back(spectral_radius(sm.A).spectral_radius);
        if (opts.record_matrices) trace.step_matrices.push_back(sm);
    }
    return trace;
}

// Fixed-matrix recursion, the constant specialization of the rollout above.
RolloutTrace simulate_lti(const Mat& A, const Mat& B, const Mat& C, Vec x0,
                          std::span<const Vec> u_seq, const InferOptions& opts = {});

// The NN-SS model: affine encoder, scheduling-dependent generator, global
// eps_tilde and gamma. n_rho = n (internal scheduling).
struct NnssModel {
    EncoderNet encoder;
    GeneratorNet generator;
    std::size_t n = 0, m = 0, r = 0;
    double eps_tilde = 0.0;
    double gamma = 0.99;
    bool train_eps = true;

    void validate() const;

    std::size_t param_count() const;
    void export_params(std::span<double> out) const;
    void import_params(std::span<const double> in);
};

// Per-step intermediates kept by the cached forward for BPTT.
struct StepCache {
    MlpCache gen_cache;
    TransitionParts parts;
    Mat A;
    Mat C;
};

struct RolloutCache {
    MlpCache encoder_cache;  // forward of y0
    std::vector<StepCache> steps;
};

// Algorithm-1 inference: x(0) = g(y0), then the scheduled recursion with
// rho_k = x(k). Outputs have length K+1, states K+2.
RolloutTrace infer(const NnssModel& model, std::span<const Vec> u_seq, const Vec& y0,
                   const InferOptions& opts = {});

// Same rollout, additionally filling `cache` for rollout_backward.
RolloutTrace infer_cached(const NnssModel& model, std::span<const Vec> u_seq, const Vec& y0,
                          const InferOptions& opts, RolloutCache& cache);

// Full parameter gradient of the model.
struct ModelGrads {
    NetGrads encoder;
    NetGrads generator;
    double dEpsTilde = 0.0;

    void init_like(const NnssModel& model);
    void zero();
    void add(const ModelGrads& other);
    std::size_t flat_size() const;
    void export_flat(std::span<double> out) const;
};

// One encoder consistency target: the gradient `dxenc` of the loss with
// respect to g(y) for a measured output y.
struct EncoderTarget {
    Vec y;
    Vec dxenc;
};

// Backpropagation through time across the full rollout. dY holds one
// gradient per emitted output (K+1 entries); dXdirect holds gradients
// applied directly to states x(0..K+1) (used by the state-consistency loss;
// may be empty for none). Encoder targets propagate the consistency loss
// into g. The generator input gradient (rho_k = x(k)) is included.
void rollout_backward(const NnssModel& model, std::span<const Vec> u_seq,
                      const RolloutTrace& trace, const RolloutCache& cache,
                      std::span<const Vec> dY, std::span<const Vec> dXdirect,
                      std::span<const EncoderTarget> enc_targets, ModelGrads& out);

}  // namespace lpvss
