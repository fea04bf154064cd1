#include "lpvss/checks.hpp"

#include <cmath>

#include "lpvss/eval.hpp"
#include "lpvss/rng.hpp"

namespace lpvss {

double fd_relative_error(double analytic, double fd) {
    return std::abs(analytic - fd) / std::max({1.0, std::abs(analytic), std::abs(fd)});
}

GradCheckResult compare_gradient(const std::function<double(std::span<const double>)>& loss,
                                 std::span<double> params, std::span<const double> analytic,
                                 double step) {
    GradCheckResult result;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + step;
        const double up = loss(params);
        params[i] = saved - step;
        const double down = loss(params);
        params[i] = saved;
        const double fd = (up - down) / (2.0 * step);
        result.max_rel_err = std::max(result.max_rel_err, fd_relative_error(analytic[i], fd));
        ++result.checked;
    }
    return result;
}

namespace {

SchurFactors random_factors(std::size_t n, double gamma, Rng& rng, double w_span = 1.5) {
    SchurFactors f;
    f.W = Mat(2 * n, 2 * n);
    for (std::size_t i = 0; i < f.W.size(); ++i) f.W.raw()[i] = rng.uniform(-w_span, w_span);
    f.V = Mat(n, n);
    for (std::size_t i = 0; i < f.V.size(); ++i) f.V.raw()[i] = rng.uniform(-w_span, w_span);
    f.eps_tilde = rng.uniform(-1.0, 1.0);
    f.gamma = gamma;
    return f;
}

}  // namespace

GradCheckResult check_schur_backward(std::size_t n, double gamma, std::uint64_t seed,
                                     std::size_t cases) {
    Rng rng(seed, 10);
    GradCheckResult worst;
    for (std::size_t c = 0; c < cases; ++c) {
        SchurFactors f = random_factors(n, gamma, rng);
        Mat dA(n, n);
        for (std::size_t i = 0; i < dA.size(); ++i) dA.raw()[i] = rng.uniform(-1.0, 1.0);

        const SchurGradients analytic = build_transition_backward(f, dA);

        // flat parameter vector [W | V | eps_tilde]
        const std::size_t wn = f.W.size(), vn = f.V.size();
        std::vector<double> params(wn + vn + 1);
        std::copy(f.W.raw().begin(), f.W.raw().end(), params.begin());
        std::copy(f.V.raw().begin(), f.V.raw().end(), params.begin() + wn);
        params[wn + vn] = f.eps_tilde;

        std::vector<double> flat(wn + vn + 1);
        std::copy(analytic.dW.raw().begin(), analytic.dW.raw().end(), flat.begin());
        std::copy(analytic.dV.raw().begin(), analytic.dV.raw().end(), flat.begin() + wn);
        flat[wn + vn] = analytic.dEpsTilde;

        auto loss = [&](std::span<const double> p) {
            SchurFactors g = f;
            std::copy(p.begin(), p.begin() + wn, g.W.raw().begin());
            std::copy(p.begin() + wn, p.begin() + wn + vn, g.V.raw().begin());
            g.eps_tilde = p[wn + vn];
            const Mat a = build_transition(g);
            double acc = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) acc += dA.raw()[i] * a.raw()[i];
            return acc;  // <dA, A>: gradient of this scalar is exactly the backward output
        };

        GradCheckResult r = compare_gradient(loss, params, flat);
        worst.max_rel_err = std::max(worst.max_rel_err, r.max_rel_err);
        worst.checked += r.checked;
    }
    return worst;
}

GradCheckResult check_net_backward(std::uint64_t seed, std::size_t cases) {
    Rng rng(seed, 11);
    GradCheckResult worst;
    for (std::size_t c = 0; c < cases; ++c) {
        const std::size_t in = 1 + rng.index(3);
        const std::size_t hidden = 2 + rng.index(4);
        const std::size_t out = 1 + rng.index(4);
        const Activation act = c % 3 == 0   ? Activation::sigmoid
                               : c % 3 == 1 ? Activation::tanh
                                            : Activation::relu;

        std::vector<DenseLayer> layers(3);
        layers[0] = DenseLayer{Mat(hidden, in), Vec(hidden), act};
        layers[1] = DenseLayer{Mat(hidden, hidden), Vec(hidden), act};
        layers[2] = DenseLayer{Mat(out, hidden), Vec(out), Activation::identity};
        init_weights(layers, rng);
        for (auto& l : layers)
            for (auto& b : l.bias) b = rng.uniform(-0.5, 0.5);

        Vec x(in);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        Vec upstream(out);
        for (auto& v : upstream) v = rng.uniform(-1.0, 1.0);

        // analytic gradients
        MlpCache cache;
        layers_forward_cached(layers, x, cache);
        NetGrads grads;
        grads.init_like(layers);
        Vec dinput;
        layers_backward(layers, cache, upstream, grads, dinput);

        // pack parameters and the input together
        std::vector<double> params, analytic;
        for (std::size_t li = 0; li < layers.size(); ++li) {
            params.insert(params.end(), layers[li].weight.raw().begin(),
                          layers[li].weight.raw().end());
            params.insert(params.end(), layers[li].bias.begin(), layers[li].bias.end());
            analytic.insert(analytic.end(), grads.dW[li].raw().begin(), grads.dW[li].raw().end());
            analytic.insert(analytic.end(), grads.db[li].begin(), grads.db[li].end());
        }
        params.insert(params.end(), x.begin(), x.end());
        analytic.insert(analytic.end(), dinput.begin(), dinput.end());

        auto loss = [&](std::span<const double> p) {
            std::vector<DenseLayer> ls = layers;
            std::size_t pos = 0;
            for (auto& l : ls) {
                std::copy(p.begin() + pos, p.begin() + pos + l.weight.size(), l.weight.raw().begin());
                pos += l.weight.size();
                std::copy(p.begin() + pos, p.begin() + pos + l.bias.size(), l.bias.begin());
                pos += l.bias.size();
            }
            Vec xi(p.begin() + pos, p.end());
            Vec o;
            layers_forward(ls, xi, o);
            double acc = 0.0;
            for (std::size_t i = 0; i < o.size(); ++i) acc += upstream[i] * o[i];
            return acc;
        };

        GradCheckResult r = compare_gradient(loss, params, analytic);
        worst.max_rel_err = std::max(worst.max_rel_err, r.max_rel_err);
        worst.checked += r.checked;
    }
    return worst;
}

double window_total_loss(const NnssModel& model, const std::vector<Vec>& y,
                         const std::vector<Vec>& u, double lambda) {
    const std::size_t L = y.size();
    RolloutTrace trace = infer(model, std::span<const Vec>(u), y[0]);

    double resp = 0.0;
    for (std::size_t k = 0; k < L; ++k)
        for (std::size_t i = 0; i < model.m; ++i) {
            const double e = trace.outputs[k][i] - y[k][i];
            resp += e * e;
        }
    resp /= static_cast<double>(L) * static_cast<double>(model.m);

    double state = 0.0;
    for (std::size_t k = 1; k < L; ++k) {
        const Vec xenc = model.encoder.forward(y[k]);
        for (std::size_t j = 0; j < model.n; ++j) {
            const double gap = trace.states[k][j] - xenc[j];
            state += gap * gap;
        }
    }
    state /= static_cast<double>(L - 1) * static_cast<double>(model.n);

    return resp + lambda * state;
}

GradCheckResult check_rollout_backward(std::size_t n, std::size_t m, std::size_t r, std::size_t L,
                                       double lambda, std::uint64_t seed) {
    NnssSpec spec;
    spec.encoder_hidden = {4};
    spec.generator_hidden = {6};
    NnssModel model = make_nnss(n, m, r, spec, 0.95, seed);

    Rng rng(seed, 12);
    std::vector<Vec> y(L, Vec(m)), u(L, Vec(r));
    for (auto& row : y)
        for (auto& v : row) v = rng.uniform(-1.0, 1.0);
    for (auto& row : u)
        for (auto& v : row) v = rng.uniform(-1.0, 1.0);

    // analytic gradient via BPTT with the same per-term weights
    RolloutCache cache;
    RolloutTrace trace = infer_cached(model, std::span<const Vec>(u), y[0], {}, cache);

    std::vector<Vec> dY(L, Vec(m, 0.0));
    std::vector<Vec> dXdirect(L + 1, Vec(n, 0.0));
    std::vector<EncoderTarget> targets;
    const double resp_denom = static_cast<double>(L) * static_cast<double>(m);
    const double state_denom = static_cast<double>(L - 1) * static_cast<double>(n);
    for (std::size_t k = 0; k < L; ++k)
        for (std::size_t i = 0; i < m; ++i)
            dY[k][i] = 2.0 * (trace.outputs[k][i] - y[k][i]) / resp_denom;
    for (std::size_t k = 1; k < L; ++k) {
        EncoderTarget t;
        t.y = y[k];
        t.dxenc.resize(n);
        const Vec xenc = model.encoder.forward(y[k]);
        for (std::size_t j = 0; j < n; ++j) {
            const double g = 2.0 * lambda * (trace.states[k][j] - xenc[j]) / state_denom;
            dXdirect[k][j] = g;
            t.dxenc[j] = -g;
        }
        targets.push_back(std::move(t));
    }

    ModelGrads grads;
    grads.init_like(model);
    rollout_backward(model, std::span<const Vec>(u), trace, cache, dY, dXdirect, targets, grads);

    std::vector<double> analytic(grads.flat_size());
    grads.export_flat(analytic);

    std::vector<double> params(model.param_count());
    model.export_params(params);

    NnssModel probe = model;
    auto loss = [&](std::span<const double> p) {
        probe.import_params(p);
        return window_total_loss(probe, y, u, lambda);
    };
    return compare_gradient(loss, params, analytic);
}

StabilityCheckResult stability_check(std::size_t samples, std::size_t n, double gamma,
                                     std::uint64_t seed) {
    Rng rng(seed, 13);
    StabilityCheckResult result;
    result.samples = samples;
    for (std::size_t s = 0; s < samples; ++s) {
        SchurFactors f = random_factors(n, gamma, rng, 3.0);
        f.eps_tilde = rng.uniform(-6.0, 2.0);
        try {
            const Mat a = build_transition(f);
            const double radius = spectral_radius(a).spectral_radius;
            result.max_radius_ratio = std::max(result.max_radius_ratio, radius / gamma);
            if (radius >= gamma) ++result.violations;
        } catch (const SingularMatrix&) {
            ++result.singular_failures;
        }
    }
    return result;
}

}  // namespace lpvss
