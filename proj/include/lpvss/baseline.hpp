#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "lpvss/model.hpp"

namespace lpvss {

// Constant-matrix Schur-stable state-space baseline: the same encoder,
// recursion, and losses as the NN-SS model, but (A, B, C) do not depend on
// the scheduling variable. A is always build_transition(factors).
struct ConstantSsModel {
    EncoderNet encoder;
    SchurFactors factors;  // trainable W, V, eps_tilde; fixed gamma
    Mat B;                 // n x r
    Mat C;                 // m x n
    std::size_t n = 0, m = 0, r = 0;
    bool train_eps = true;

    double gamma() const { return factors.gamma; }
    Mat transition() const { return build_transition(factors); }
    void validate() const;

    std::size_t param_count() const;
    void export_params(std::span<double> out) const;
    void import_params(std::span<const double> in);
};

struct BaselineCache {
    MlpCache encoder_cache;
    TransitionParts parts;
    Mat A;
};

RolloutTrace infer(const ConstantSsModel& model, std::span<const Vec> u_seq, const Vec& y0,
                   const InferOptions& opts = {});
RolloutTrace infer_cached(const ConstantSsModel& model, std::span<const Vec> u_seq, const Vec& y0,
                          const InferOptions& opts, BaselineCache& cache);

inline RolloutTrace baseline_infer(const ConstantSsModel& model, std::span<const Vec> u_seq,
                                   const Vec& y0, const InferOptions& opts = {}) {
    return infer(model, u_seq, y0, opts);
}

struct BaselineGrads {
    NetGrads encoder;
    Mat dW, dV, dB, dC;
    double dEpsTilde = 0.0;

    void init_like(const ConstantSsModel& model);
    void zero();
    void add(const BaselineGrads& other);
    std::size_t flat_size() const;
    void export_flat(std::span<double> out) const;
};

void rollout_backward(const ConstantSsModel& model, std::span<const Vec> u_seq,
                      const RolloutTrace& trace, const BaselineCache& cache,
                      std::span<const Vec> dY, std::span<const Vec> dXdirect,
                      std::span<const EncoderTarget> enc_targets, BaselineGrads& out);

// Fresh baseline with seeded weights. When init_a is given, the factors are
// initialized by a Frobenius-norm fit of the parameterization to it.
ConstantSsModel make_baseline(std::size_t n, std::size_t m, std::size_t r,
                              const std::vector<std::size_t>& encoder_widths, double gamma,
                              std::uint64_t seed, const Mat* init_a = nullptr);

}  // namespace lpvss
