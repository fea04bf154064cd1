#include "lpvss/net.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace lpvss {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    throw ConfigError("unknown activation '" + name + "'");
}

namespace {

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::identity: return z;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::tanh: return std::tanh(z);
        case Activation::relu: return z > 0.0 ? z : 0.0;
    }
    return z;
}

// derivative expressed through the activation output
inline double activate_derivative(Activation a, double out) {
    switch (a) {
        case Activation::identity: return 1.0;
        case Activation::sigmoid: return out * (1.0 - out);
        case Activation::tanh: return 1.0 - out * out;
        case Activation::relu: return out > 0.0 ? 1.0 : 0.0;
    }
    return 1.0;
}

void layer_forward(const DenseLayer& layer, const Vec& x, Vec& out) {
    out.resize(layer.out_width());
    matvec(layer.weight, std::span<const double>(x), std::span<double>(out));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = activate(layer.activation, out[i] + layer.bias[i]);
}

}  // namespace

void NetGrads::init_like(const std::vector<DenseLayer>& layers) {
    dW.resize(layers.size());
    db.resize(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        dW[i] = Mat(layers[i].out_width(), layers[i].in_width());
        db[i] = Vec(layers[i].out_width(), 0.0);
    }
}

void NetGrads::zero() {
    for (auto& m : dW) std::memset(m.data(), 0, m.size() * sizeof(double));
    for (auto& v : db) std::memset(v.data(), 0, v.size() * sizeof(double));
}

void NetGrads::add(const NetGrads& other) {
    for (std::size_t i = 0; i < dW.size(); ++i) {
        dW[i] += other.dW[i];
        for (std::size_t j = 0; j < db[i].size(); ++j) db[i][j] += other.db[i][j];
    }
}

void layers_forward(const std::vector<DenseLayer>& layers, const Vec& x, Vec& out) {
    Vec tmp = x;
    for (const auto& layer : layers) {
        layer_forward(layer, tmp, out);
        tmp.swap(out);
    }
    out.swap(tmp);
}

void layers_forward_cached(const std::vector<DenseLayer>& layers, const Vec& x, MlpCache& cache) {
    cache.acts.resize(layers.size() + 1);
    cache.acts[0] = x;
    for (std::size_t i = 0; i < layers.size(); ++i)
        layer_forward(layers[i], cache.acts[i], cache.acts[i + 1]);
}

void layers_backward(const std::vector<DenseLayer>& layers, const MlpCache& cache,
                     const Vec& upstream, NetGrads& grads, Vec& dinput) {
    Vec g = upstream;
    Vec dz;
    for (std::size_t li = layers.size(); li-- > 0;) {
        const DenseLayer& layer = layers[li];
        const Vec& out = cache.acts[li + 1];
        const Vec& in = cache.acts[li];

        dz.resize(out.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            dz[i] = g[i] * activate_derivative(layer.activation, out[i]);

        Mat& dW = grads.dW[li];
        for (std::size_t i = 0; i < dz.size(); ++i) {
            const double d = dz[i];
            grads.db[li][i] += d;
            if (d == 0.0) continue;
            double* row = dW.data() + i * dW.cols();
            for (std::size_t j = 0; j < in.size(); ++j) row[j] += d * in[j];
        }

        g.resize(layer.in_width());
        matvec_t(layer.weight, std::span<const double>(dz), std::span<double>(g));
    }
    dinput = g;
}

void init_weights(std::vector<DenseLayer>& layers, Rng& rng) {
    for (auto& layer : layers) {
        const double bound =
            std::sqrt(6.0 / static_cast<double>(layer.in_width() + layer.out_width()));
        for (std::size_t i = 0; i < layer.weight.size(); ++i)
            layer.weight.raw()[i] = rng.uniform(-bound, bound);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
}

void EncoderNet::validate() const {
    if (layers.empty()) throw ConfigError("EncoderNet: no layers");
    for (std::size_t i = 0; i + 1 < layers.size(); ++i)
        if (layers[i].out_width() != layers[i + 1].in_width())
            throw ShapeMismatch("EncoderNet: layer widths do not chain");
    for (const auto& l : layers)
        if (l.activation != Activation::identity)
            throw ConfigError("EncoderNet: every layer must use the identity activation");
}

Vec EncoderNet::forward(const Vec& y) const {
    Vec out;
    layers_forward(layers, y, out);
    return out;
}

GeneratedMatrices partition_generator_output(const Vec& flat, std::size_t n, std::size_t m,
                                             std::size_t r) {
    if (flat.size() != GeneratorNet::required_output_width(n, m, r))
        throw ShapeMismatch("generator output has length " + std::to_string(flat.size()) +
                            ", expected " + std::to_string(GeneratorNet::required_output_width(n, m, r)));
    GeneratedMatrices g;
    auto it = flat.begin();
    g.W = Mat(2 * n, 2 * n, std::vector<double>(it, it + 4 * n * n));
    it += 4 * n * n;
    g.V = Mat(n, n, std::vector<double>(it, it + n * n));
    it += n * n;
    g.B = Mat(n, r, std::vector<double>(it, it + n * r));
    it += n * r;
    g.C = Mat(m, n, std::vector<double>(it, it + m * n));
    return g;
}

Vec flatten_generated(const GeneratedMatrices& g) {
    Vec flat;
    flat.reserve(g.W.size() + g.V.size() + g.B.size() + g.C.size());
    for (const Mat* m : {&g.W, &g.V, &g.B, &g.C})
        flat.insert(flat.end(), m->raw().begin(), m->raw().end());
    return flat;
}

void GeneratorNet::validate() const {
    if (layers.empty()) throw ConfigError("GeneratorNet: no layers");
    for (std::size_t i = 0; i + 1 < layers.size(); ++i)
        if (layers[i].out_width() != layers[i + 1].in_width())
            throw ShapeMismatch("GeneratorNet: layer widths do not chain");
    if (layers.back().out_width() != required_output_width(n, m, r))
        throw ShapeMismatch("GeneratorNet: final layer width " +
                            std::to_string(layers.back().out_width()) + " does not equal 5n^2+nr+mn = " +
                            std::to_string(required_output_width(n, m, r)));
    if (layers.back().activation != Activation::identity)
        throw ConfigError("GeneratorNet: final layer must use the identity activation");
    for (std::size_t i = 0; i + 1 < layers.size(); ++i)
        if (layers[i].activation == Activation::identity)
            throw ConfigError("GeneratorNet: hidden layers must be nonlinear");
}

GeneratedMatrices GeneratorNet::forward(const Vec& rho) const {
    Vec flat;
    layers_forward(layers, rho, flat);
    return partition_generator_output(flat, n, m, r);
}

EncoderNet make_encoder(const std::vector<std::size_t>& widths, std::uint64_t seed) {
    if (widths.size() < 2) throw ConfigError("make_encoder: need at least input and output widths");
    EncoderNet e;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        DenseLayer layer;
        layer.weight = Mat(widths[i + 1], widths[i]);
        layer.bias = Vec(widths[i + 1], 0.0);
        layer.activation = Activation::identity;
        e.layers.push_back(std::move(layer));
    }
    Rng rng(seed, 0);
    init_weights(e.layers, rng);
    e.validate();
    return e;
}

GeneratorNet make_generator(std::size_t n, std::size_t m, std::size_t r,
                            const std::vector<std::size_t>& hidden_widths, Activation hidden_act,
                            std::uint64_t seed) {
    GeneratorNet g;
    g.n = n;
    g.m = m;
    g.r = r;
    std::vector<std::size_t> widths;
    widths.push_back(n);  // n_rho = n: internal scheduling
    widths.insert(widths.end(), hidden_widths.begin(), hidden_widths.end());
    widths.push_back(GeneratorNet::required_output_width(n, m, r));
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        DenseLayer layer;
        layer.weight = Mat(widths[i + 1], widths[i]);
        layer.bias = Vec(widths[i + 1], 0.0);
        layer.activation = i + 2 == widths.size() ? Activation::identity : hidden_act;
        g.layers.push_back(std::move(layer));
    }
    Rng rng(seed, 1);
    init_weights(g.layers, rng);
    g.validate();
    return g;
}

}  // namespace lpvss
