#include "lpvss/baseline.hpp"

#include <cstring>

namespace lpvss {

void ConstantSsModel::validate() const {
    encoder.validate();
    factors.validate();
    if (factors.order() != n) throw ShapeMismatch("ConstantSsModel: factor order must equal n");
    if (encoder.input_width() != m || encoder.output_width() != n)
        throw ShapeMismatch("ConstantSsModel: encoder must map m -> n");
    if (B.rows() != n || B.cols() != r) throw ShapeMismatch("ConstantSsModel: B must be n x r");
    if (C.rows() != m || C.cols() != n) throw ShapeMismatch("ConstantSsModel: C must be m x n");
}

std::size_t ConstantSsModel::param_count() const {
    std::size_t count = factors.W.size() + factors.V.size() + B.size() + C.size() + 1;
    for (const auto& l : encoder.layers) count += l.weight.size() + l.bias.size();
    return count;
}

void ConstantSsModel::export_params(std::span<double> out) const {
    std::size_t pos = 0;
    for (const auto& l : encoder.layers) {
        std::memcpy(out.data() + pos, l.weight.data(), l.weight.size() * sizeof(double));
        pos += l.weight.size();
        std::memcpy(out.data() + pos, l.bias.data(), l.bias.size() * sizeof(double));
        pos += l.bias.size();
    }
    for (const Mat* m : {&factors.W, &factors.V, &B, &C}) {
        std::memcpy(out.data() + pos, m->data(), m->size() * sizeof(double));
        pos += m->size();
    }
    out[pos++] = factors.eps_tilde;
    if (pos != out.size()) throw ShapeMismatch("export_params: buffer size mismatch");
}

void ConstantSsModel::import_params(std::span<const double> in) {
    std::size_t pos = 0;
    for (auto& l : encoder.layers) {
        std::memcpy(l.weight.data(), in.data() + pos, l.weight.size() * sizeof(double));
        pos += l.weight.size();
        std::memcpy(l.bias.data(), in.data() + pos, l.bias.size() * sizeof(double));
        pos += l.bias.size();
    }
    for (Mat* m : {&factors.W, &factors.V, &B, &C}) {
        std::memcpy(m->data(), in.data() + pos, m->size() * sizeof(double));
        pos += m->size();
    }
    factors.eps_tilde = in[pos++];
    if (pos != in.size()) throw ShapeMismatch("import_params: buffer size mismatch");
}

RolloutTrace infer(const ConstantSsModel& model, std::span<const Vec> u_seq, const Vec& y0,
                   const InferOptions& opts) {
    model.validate();
    if (y0.size() != model.m) throw ShapeMismatch("infer: y0 must have m entries");
    return simulate_lti(model.transition(), model.B, model.C, model.encoder.forward(y0), u_seq,
                        opts);
}

RolloutTrace infer_cached(const ConstantSsModel& model, std::span<const Vec> u_seq, const Vec& y0,
                          const InferOptions& opts, BaselineCache& cache) {
    model.validate();
    if (y0.size() != model.m) throw ShapeMismatch("infer: y0 must have m entries");
    cache.A = build_transition(model.factors, &cache.parts);
    layers_forward_cached(model.encoder.layers, y0, cache.encoder_cache);
    Vec x0 = cache.encoder_cache.acts.back();
    return simulate_lti(cache.A, model.B, model.C, std::move(x0), u_seq, opts);
}

void BaselineGrads::init_like(const ConstantSsModel& model) {
    encoder.init_like(model.encoder.layers);
    dW = Mat(model.factors.W.rows(), model.factors.W.cols());
    dV = Mat(model.factors.V.rows(), model.factors.V.cols());
    dB = Mat(model.B.rows(), model.B.cols());
    dC = Mat(model.C.rows(), model.C.cols());
    dEpsTilde = 0.0;
}

void BaselineGrads::zero() {
    encoder.zero();
    for (Mat* m : {&dW, &dV, &dB, &dC}) std::memset(m->data(), 0, m->size() * sizeof(double));
    dEpsTilde = 0.0;
}

void BaselineGrads::add(const BaselineGrads& other) {
    encoder.add(other.encoder);
    dW += other.dW;
    dV += other.dV;
    dB += other.dB;
    dC += other.dC;
    dEpsTilde += other.dEpsTilde;
}

std::size_t BaselineGrads::flat_size() const {
    std::size_t count = dW.size() + dV.size() + dB.size() + dC.size() + 1;
    for (const auto& m : encoder.dW) count += m.size();
    for (const auto& v : encoder.db) count += v.size();
    return count;
}

void BaselineGrads::export_flat(std::span<double> out) const {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < encoder.dW.size(); ++i) {
        std::memcpy(out.data() + pos, encoder.dW[i].data(), encoder.dW[i].size() * sizeof(double));
        pos += encoder.dW[i].size();
        std::memcpy(out.data() + pos, encoder.db[i].data(), encoder.db[i].size() * sizeof(double));
        pos += encoder.db[i].size();
    }
    for (const Mat* m : {&dW, &dV, &dB, &dC}) {
        std::memcpy(out.data() + pos, m->data(), m->size() * sizeof(double));
        pos += m->size();
    }
    out[pos++] = dEpsTilde;
    if (pos != out.size()) throw ShapeMismatch("export_flat: buffer size mismatch");
}

void rollout_backward(const ConstantSsModel& model, std::span<const Vec> u_seq,
                      const RolloutTrace& trace, const BaselineCache& cache,
                      std::span<const Vec> dY, std::span<const Vec> dXdirect,
                      std::span<const EncoderTarget> enc_targets, BaselineGrads& out) {
    const std::size_t horizon = u_seq.size();
    if (trace.outputs.size() != horizon || trace.states.size() != horizon + 1)
        throw ShapeMismatch("rollout_backward: trace does not match the input sequence");
    if (dY.size() != horizon) throw ShapeMismatch("rollout_backward: dY must have K+1 entries");
    if (!dXdirect.empty() && dXdirect.size() != horizon + 1)
        throw ShapeMismatch("rollout_backward: dXdirect must have K+2 entries when present");

    const std::size_t n = model.n;
    Vec adjoint(n, 0.0);
    if (!dXdirect.empty())
        for (std::size_t i = 0; i < n; ++i) adjoint[i] = dXdirect[horizon][i];

    Mat dA(n, n);
    Vec dx(n), scratch(n);

    for (std::size_t k = horizon; k-- > 0;) {
        const Vec& x = trace.states[k];
        const Vec& u = u_seq[k];
        const Vec& gy = dY[k];

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dA(i, j) += adjoint[i] * x[j];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < u.size(); ++j) out.dB(i, j) += adjoint[i] * u[j];
        for (std::size_t i = 0; i < gy.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) out.dC(i, j) += gy[i] * x[j];

        matvec_t(cache.A, std::span<const double>(adjoint), std::span<double>(dx));
        matvec_t(model.C, std::span<const double>(gy), std::span<double>(scratch));
        for (std::size_t i = 0; i < n; ++i) dx[i] += scratch[i];
        if (!dXdirect.empty())
            for (std::size_t i = 0; i < n; ++i) dx[i] += dXdirect[k][i];
        adjoint = dx;
    }

    // A is shared by every step, so one Schur backward on the summed dA
    SchurGradients sg = build_transition_backward(cache.parts, dA);
    out.dW += sg.dW;
    out.dV += sg.dV;
    out.dEpsTilde += sg.dEpsTilde;

    Vec dy_unused;
    layers_backward(model.encoder.layers, cache.encoder_cache, adjoint, out.encoder, dy_unused);

    MlpCache enc_cache;
    for (const EncoderTarget& t : enc_targets) {
        layers_forward_cached(model.encoder.layers, t.y, enc_cache);
        layers_backward(model.encoder.layers, enc_cache, t.dxenc, out.encoder, dy_unused);
    }
}

ConstantSsModel make_baseline(std::size_t n, std::size_t m, std::size_t r,
                              const std::vector<std::size_t>& encoder_widths, double gamma,
                              std::uint64_t seed, const Mat* init_a) {
    ConstantSsModel model;
    model.n = n;
    model.m = m;
    model.r = r;
    model.encoder = make_encoder(encoder_widths, seed);

    if (init_a) {
        if (init_a->rows() != n || init_a->cols() != n)
            throw ShapeMismatch("make_baseline: init A must be n x n");
        model.factors = fit_to_target(*init_a, gamma, seed).factors;
    } else {
        Rng rng(seed, 6);
        model.factors.W = Mat::identity(2 * n);
        for (std::size_t i = 0; i < model.factors.W.size(); ++i)
            model.factors.W.raw()[i] += 0.1 * rng.uniform(-1.0, 1.0);
        model.factors.V = Mat(n, n);
        for (std::size_t i = 0; i < model.factors.V.size(); ++i)
            model.factors.V.raw()[i] = 0.1 * rng.uniform(-1.0, 1.0);
        model.factors.eps_tilde = 0.0;
        model.factors.gamma = gamma;
    }
    model.factors.gamma = gamma;

    Rng rng_bc(seed, 6 + 100);
    const double bound_b = std::sqrt(6.0 / static_cast<double>(n + r));
    model.B = Mat(n, r);
    for (std::size_t i = 0; i < model.B.size(); ++i)
        model.B.raw()[i] = rng_bc.uniform(-bound_b, bound_b);
    const double bound_c = std::sqrt(6.0 / static_cast<double>(m + n));
    model.C = Mat(m, n);
    for (std::size_t i = 0; i < model.C.size(); ++i)
        model.C.raw()[i] = rng_bc.uniform(-bound_c, bound_c);

    model.validate();
    return model;
}

}  // namespace lpvss
