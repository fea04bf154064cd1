#include "lpvss/model.hpp"

#include <cmath>
#include <cstring>

namespace lpvss {

namespace {

// flat layout: encoder layers (weight row-major, bias), generator layers,
// eps_tilde last. Checkpoints and Adam state follow this same order.
template <typename LayerFn, typename ScalarFn>
void walk_params(const NnssModel& model, LayerFn&& on_layer, ScalarFn&& on_scalar) {
    for (const auto& l : model.encoder.layers) on_layer(l);
    for (const auto& l : model.generator.layers) on_layer(l);
    on_scalar();
}

}  // namespace

void NnssModel::validate() const {
    encoder.validate();
    generator.validate();
    if (encoder.input_width() != m || encoder.output_width() != n)
        throw ShapeMismatch("NnssModel: encoder must map m -> n");
    if (generator.input_width() != n)
        throw ShapeMismatch("NnssModel: generator input width must equal n (internal scheduling)");
    if (generator.n != n || generator.m != m || generator.r != r)
        throw ShapeMismatch("NnssModel: generator dimensions disagree with the model");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("NnssModel: gamma must lie in (0, 1]");
}

std::size_t NnssModel::param_count() const {
    std::size_t count = 0;
    walk_params(*this, [&](const DenseLayer& l) { count += l.weight.size() + l.bias.size(); },
                [&] { count += 1; });
    return count;
}

void NnssModel::export_params(std::span<double> out) const {
    std::size_t pos = 0;
    walk_params(
        *this,
        [&](const DenseLayer& l) {
            std::memcpy(out.data() + pos, l.weight.data(), l.weight.size() * sizeof(double));
            pos += l.weight.size();
            std::memcpy(out.data() + pos, l.bias.data(), l.bias.size() * sizeof(double));
            pos += l.bias.size();
        },
        [&] { out[pos++] = eps_tilde; });
    if (pos != out.size()) throw ShapeMismatch("export_params: buffer size mismatch");
}

void NnssModel::import_params(std::span<const double> in) {
    std::size_t pos = 0;
    auto load_layer = [&](DenseLayer& l) {
        std::memcpy(l.weight.data(), in.data() + pos, l.weight.size() * sizeof(double));
        pos += l.weight.size();
        std::memcpy(l.bias.data(), in.data() + pos, l.bias.size() * sizeof(double));
        pos += l.bias.size();
    };
    for (auto& l : encoder.layers) load_layer(l);
    for (auto& l : generator.layers) load_layer(l);
    eps_tilde = in[pos++];
    if (pos != in.size()) throw ShapeMismatch("import_params: buffer size mismatch");
}

namespace {

// matrix source that runs the generator + Schur map at every step
struct ScheduledSource {
    const NnssModel& model;
    RolloutCache* cache;  // may be null

    void operator()(std::size_t k, const Vec& x, StepMatrices& out) {
        GeneratedMatrices gen;
        if (cache) {
            StepCache& sc = cache->steps[k];
            layers_forward_cached(model.generator.layers, x, sc.gen_cache);
            gen = partition_generator_output(sc.gen_cache.acts.back(), model.n, model.m, model.r);
            SchurFactors f{std::move(gen.W), std::move(gen.V), model.eps_tilde, model.gamma};
            out.A = build_transition(f, &sc.parts);
            sc.A = out.A;
            sc.C = gen.C;
        } else {
            gen = model.generator.forward(x);
            SchurFactors f{std::move(gen.W), std::move(gen.V), model.eps_tilde, model.gamma};
            out.A = build_transition(f);
        }
        out.B = std::move(gen.B);
        out.C = std::move(gen.C);
    }
};

}  // namespace

RolloutTrace simulate_lti(const Mat& A, const Mat& B, const Mat& C, Vec x0,
                          std::span<const Vec> u_seq, const InferOptions& opts) {
    auto source = [&](std::size_t, const Vec&, StepMatrices& out) {
        out.A = A;
        out.B = B;
        out.C = C;
    };
    return rollout_recursion(source, std::move(x0), u_seq, opts);
}

RolloutTrace infer(const NnssModel& model, std::span<const Vec> u_seq, const Vec& y0,
                   const InferOptions& opts) {
    model.validate();
    if (y0.size() != model.m) throw ShapeMismatch("infer: y0 must have m entries");
    for (const Vec& u : u_seq)
        if (u.size() != model.r) throw ShapeMismatch("infer: every input must have r entries");

    Vec x0 = model.encoder.forward(y0);
    ScheduledSource source{model, nullptr};
    return rollout_recursion(source, std::move(x0), u_seq, opts);
}

RolloutTrace infer_cached(const NnssModel& model, std::span<const Vec> u_seq, const Vec& y0,
                          const InferOptions& opts, RolloutCache& cache) {
    model.validate();
    if (y0.size() != model.m) throw ShapeMismatch("infer: y0 must have m entries");
    cache.steps.resize(u_seq.size());

    layers_forward_cached(model.encoder.layers, y0, cache.encoder_cache);
    Vec x0 = cache.encoder_cache.acts.back();
    ScheduledSource source{model, &cache};
    return rollout_recursion(source, std::move(x0), u_seq, opts);
}

void ModelGrads::init_like(const NnssModel& model) {
    encoder.init_like(model.encoder.layers);
    generator.init_like(model.generator.layers);
    dEpsTilde = 0.0;
}

void ModelGrads::zero() {
    encoder.zero();
    generator.zero();
    dEpsTilde = 0.0;
}

void ModelGrads::add(const ModelGrads& other) {
    encoder.add(other.encoder);
    generator.add(other.generator);
    dEpsTilde += other.dEpsTilde;
}

std::size_t ModelGrads::flat_size() const {
    std::size_t count = 1;
    for (const auto& m : encoder.dW) count += m.size();
    for (const auto& v : encoder.db) count += v.size();
    for (const auto& m : generator.dW) count += m.size();
    for (const auto& v : generator.db) count += v.size();
    return count;
}

void ModelGrads::export_flat(std::span<double> out) const {
    std::size_t pos = 0;
    auto emit = [&](const NetGrads& g) {
        for (std::size_t i = 0; i < g.dW.size(); ++i) {
            std::memcpy(out.data() + pos, g.dW[i].data(), g.dW[i].size() * sizeof(double));
            pos += g.dW[i].size();
            std::memcpy(out.data() + pos, g.db[i].data(), g.db[i].size() * sizeof(double));
            pos += g.db[i].size();
        }
    };
    emit(encoder);
    emit(generator);
    out[pos++] = dEpsTilde;
    if (pos != out.size()) throw ShapeMismatch("export_flat: buffer size mismatch");
}

void rollout_backward(const NnssModel& model, std::span<const Vec> u_seq,
                      const RolloutTrace& trace, const RolloutCache& cache,
                      std::span<const Vec> dY, std::span<const Vec> dXdirect,
                      std::span<const EncoderTarget> enc_targets, ModelGrads& out) {
    const std::size_t horizon = u_seq.size();
    if (trace.outputs.size() != horizon || trace.states.size() != horizon + 1)
        throw ShapeMismatch("rollout_backward: trace does not match the input sequence");
    if (dY.size() != horizon) throw ShapeMismatch("rollout_backward: dY must have K+1 entries");
    if (!dXdirect.empty() && dXdirect.size() != horizon + 1)
        throw ShapeMismatch("rollout_backward: dXdirect must have K+2 entries when present");

    const std::size_t n = model.n;
    const std::size_t m = model.m;
    const std::size_t r = model.r;

    Vec adjoint(n, 0.0);
    if (!dXdirect.empty())
        for (std::size_t i = 0; i < n; ++i) adjoint[i] = dXdirect[horizon][i];

    Mat dA(n, n);
    Vec dflat(GeneratorNet::required_output_width(n, m, r));
    Vec dx(n), drho(n), scratch(n);

    for (std::size_t k = horizon; k-- > 0;) {
        const StepCache& sc = cache.steps[k];
        const Vec& x = trace.states[k];
        const Vec& u = u_seq[k];
        const Vec& gy = dY[k];

        // x(k+1) = A x(k) + B u(k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dA(i, j) = adjoint[i] * x[j];
        // dx(k) = A^T adjoint + C^T gy
        matvec_t(sc.A, std::span<const double>(adjoint), std::span<double>(dx));
        matvec_t(sc.C, std::span<const double>(gy), std::span<double>(scratch));
        for (std::size_t i = 0; i < n; ++i) dx[i] += scratch[i];

        SchurGradients sg = build_transition_backward(sc.parts, dA);
        out.dEpsTilde += sg.dEpsTilde;

        // assemble the flat generator gradient [dW | dV | dB | dC]
        double* fp = dflat.data();
        std::memcpy(fp, sg.dW.data(), sg.dW.size() * sizeof(double));
        fp += sg.dW.size();
        std::memcpy(fp, sg.dV.data(), sg.dV.size() * sizeof(double));
        fp += sg.dV.size();
        for (std::size_t i = 0; i < n; ++i)  // dB = adjoint u^T
            for (std::size_t j = 0; j < r; ++j) *fp++ = adjoint[i] * u[j];
        for (std::size_t i = 0; i < m; ++i)  // dC = gy x^T
            for (std::size_t j = 0; j < n; ++j) *fp++ = gy[i] * x[j];

        layers_backward(model.generator.layers, sc.gen_cache, dflat, out.generator, drho);
        for (std::size_t i = 0; i < n; ++i) dx[i] += drho[i];

        if (!dXdirect.empty())
            for (std::size_t i = 0; i < n; ++i) dx[i] += dXdirect[k][i];

        adjoint = dx;
    }

    // x(0) = g(y0)
    Vec dy_unused;
    layers_backward(model.encoder.layers, cache.encoder_cache, adjoint, out.encoder, dy_unused);

    // encoder-consistency targets x_enc(k) = g(y(k))
    MlpCache enc_cache;
    for (const EncoderTarget& t : enc_targets) {
        layers_forward_cached(model.encoder.layers, t.y, enc_cache);
        layers_backward(model.encoder.layers, enc_cache, t.dxenc, out.encoder, dy_unused);
    }
}

}  // namespace lpvss
