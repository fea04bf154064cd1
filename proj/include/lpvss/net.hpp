#pragma once

#include <cstdint>
#include <vector>

#include "lpvss/mat.hpp"
#include "lpvss/rng.hpp"

namespace lpvss {

enum class Activation { identity, sigmoid, tanh, relu };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct DenseLayer {
    Mat weight;  // out_width x in_width
    Vec bias;    // out_width
    Activation activation = Activation::identity;

    std::size_t in_width() const { return weight.cols(); }
    std::size_t out_width() const { return weight.rows(); }
};

// Per-layer activations of one forward pass: acts[0] is the input, acts[i+1]
// the output of layer i. Buffers are reused across calls once sized.
struct MlpCache {
    std::vector<Vec> acts;
};

// Parameter gradients for a layer stack, accumulated with +=.
struct NetGrads {
    std::vector<Mat> dW;
    std::vector<Vec> db;

    void init_like(const std::vector<DenseLayer>& layers);
    void zero();
    void add(const NetGrads& other);
};

void layers_forward(const std::vector<DenseLayer>& layers, const Vec& x, Vec& out);
void layers_forward_cached(const std::vector<DenseLayer>& layers, const Vec& x, MlpCache& cache);

// Reverse pass through a cached forward. Accumulates into `grads` and writes
// the gradient with respect to the input into `dinput`.
void layers_backward(const std::vector<DenseLayer>& layers, const MlpCache& cache,
                     const Vec& upstream, NetGrads& grads, Vec& dinput);

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases,
// drawn row-major from the given stream.
void init_weights(std::vector<DenseLayer>& layers, Rng& rng);

// Affine encoder g: y(0) -> x(0). Every layer has identity activation.
struct EncoderNet {
    std::vector<DenseLayer> layers;

    std::size_t input_width() const { return layers.front().in_width(); }
    std::size_t output_width() const { return layers.back().out_width(); }
    void validate() const;

    Vec forward(const Vec& y) const;
};

// One generator output, partitioned. The flat vector is split row-major as
// [4n^2 -> W (2n x 2n) | n^2 -> V | nr -> B | mn -> C].
struct GeneratedMatrices {
    Mat W;
    Mat V;
    Mat B;
    Mat C;
};

GeneratedMatrices partition_generator_output(const Vec& flat, std::size_t n, std::size_t m,
                                             std::size_t r);
Vec flatten_generated(const GeneratedMatrices& g);

// Scheduling-dependent generator f: rho -> (W, V, B, C). Hidden layers carry
// a nonlinear activation, the final layer is identity so the prediction
// range stays unrestricted.
struct GeneratorNet {
    std::vector<DenseLayer> layers;
    std::size_t n = 0, m = 0, r = 0;

    std::size_t input_width() const { return layers.front().in_width(); }
    std::size_t output_width() const { return layers.back().out_width(); }
    static std::size_t required_output_width(std::size_t n, std::size_t m, std::size_t r) {
        return 5 * n * n + n * r + m * n;
    }
    void validate() const;

    GeneratedMatrices forward(const Vec& rho) const;
};

EncoderNet make_encoder(const std::vector<std::size_t>& widths, std::uint64_t seed);
GeneratorNet make_generator(std::size_t n, std::size_t m, std::size_t r,
                            const std::vector<std::size_t>& hidden_widths, Activation hidden_act,
                            std::uint64_t seed);

}  // namespace lpvss
