#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpvss/checks.hpp"
#include "lpvss/net.hpp"
#include "lpvss/rng.hpp"

using namespace lpvss;

TEST_CASE("encoder: identity single layer passes the input through") {
    EncoderNet e;
    e.layers.push_back({Mat::identity(2), Vec(2, 0.0), Activation::identity});
    const Vec out = e.forward({1.0, 2.0});
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 2.0);
}

TEST_CASE("encoder: zero weights give the constant bias map") {
    EncoderNet e;
    e.layers.push_back({Mat(1, 3), Vec{0.5}, Activation::identity});
    CHECK(e.forward({9.0, -4.0, 2.0})[0] == 0.5);
    CHECK(e.forward({0.0, 0.0, 0.0})[0] == 0.5);
}

TEST_CASE("encoder: two layers match the direct affine composition") {
    Rng rng(40);
    EncoderNet e = make_encoder({3, 5, 2}, 40);
    for (auto& l : e.layers)
        for (auto& b : l.bias) b = rng.uniform(-1.0, 1.0);

    Vec y{0.3, -0.7, 1.2};
    const Vec out = e.forward(y);

    // independent matrix-arithmetic evaluation: w2 (w1 y + b1) + b2
    Vec h1 = matvec(e.layers[0].weight, y);
    for (std::size_t i = 0; i < h1.size(); ++i) h1[i] += e.layers[0].bias[i];
    Vec ref = matvec(e.layers[1].weight, h1);
    for (std::size_t i = 0; i < ref.size(); ++i) ref[i] += e.layers[1].bias[i];

    REQUIRE(out.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
        CHECK(out[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("encoder: affine combinations commute with the map") {
    Rng rng(41);
    EncoderNet e = make_encoder({2, 4, 3}, 41);
    for (auto& l : e.layers)
        for (auto& b : l.bias) b = rng.uniform(-1.0, 1.0);

    for (int c = 0; c < 20; ++c) {
        const double a = rng.uniform(-2.0, 2.0);
        Vec y1{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec y2{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec mix(2);
        for (std::size_t i = 0; i < 2; ++i) mix[i] = a * y1[i] + (1.0 - a) * y2[i];

        const Vec lhs = e.forward(mix);
        const Vec g1 = e.forward(y1), g2 = e.forward(y2);
        for (std::size_t i = 0; i < lhs.size(); ++i)
            CHECK(std::abs(lhs[i] - (a * g1[i] + (1.0 - a) * g2[i])) < 1e-10);
    }
}

TEST_CASE("generator: output width for n=2, r=1, m=1 is 24") {
    CHECK(GeneratorNet::required_output_width(2, 1, 1) == 24);
    GeneratorNet g = make_generator(2, 1, 1, {8}, Activation::sigmoid, 5);
    CHECK(g.output_width() == 24);
}

TEST_CASE("generator: ramp fixture pins the row-major partition") {
    // all weights zero, final bias an enumerated ramp: the partition must be
    // the documented row-major reshape [4n^2 W | n^2 V | nr B | mn C]
    const std::size_t n = 2, m = 1, r = 1;
    GeneratorNet g = make_generator(n, m, r, {4}, Activation::sigmoid, 6);
    for (auto& l : g.layers) {
        std::fill(l.weight.raw().begin(), l.weight.raw().end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    for (std::size_t i = 0; i < g.layers.back().bias.size(); ++i)
        g.layers.back().bias[i] = static_cast<double>(i);

    const GeneratedMatrices out = g.forward({0.0, 0.0});
    REQUIRE(out.W.rows() == 4);
    // W is the first 16 entries reshaped 4x4 row-major
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(out.W(i, j) == static_cast<double>(4 * i + j));
    CHECK(out.V(0, 0) == 16.0);
    CHECK(out.V(0, 1) == 17.0);
    CHECK(out.V(1, 0) == 18.0);
    CHECK(out.V(1, 1) == 19.0);
    CHECK(out.B(0, 0) == 20.0);
    CHECK(out.B(1, 0) == 21.0);
    CHECK(out.C(0, 0) == 22.0);
    CHECK(out.C(0, 1) == 23.0);
}

TEST_CASE("generator: scalar ramp fixture (n=1)") {
    GeneratorNet g = make_generator(1, 1, 1, {3}, Activation::tanh, 7);
    for (auto& l : g.layers) {
        std::fill(l.weight.raw().begin(), l.weight.raw().end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    for (std::size_t i = 0; i < 7; ++i) g.layers.back().bias[i] = static_cast<double>(i);
    const GeneratedMatrices out = g.forward({0.0});
    CHECK(out.W(0, 0) == 0.0);
    CHECK(out.W(0, 1) == 1.0);
    CHECK(out.W(1, 0) == 2.0);
    CHECK(out.W(1, 1) == 3.0);
    CHECK(out.V(0, 0) == 4.0);
    CHECK(out.B(0, 0) == 5.0);
    CHECK(out.C(0, 0) == 6.0);
}

TEST_CASE("generator: partition round trip reproduces the flat vector") {
    Rng rng(42);
    for (int c = 0; c < 10; ++c) {
        const std::size_t n = 1 + rng.index(3), m = 1 + rng.index(2), r = 1 + rng.index(2);
        Vec flat(GeneratorNet::required_output_width(n, m, r));
        for (auto& v : flat) v = rng.uniform(-5.0, 5.0);
        const GeneratedMatrices g = partition_generator_output(flat, n, m, r);
        const Vec back = flatten_generated(g);
        REQUIRE(back.size() == flat.size());
        for (std::size_t i = 0; i < flat.size(); ++i) CHECK(back[i] == flat[i]);
    }
}

TEST_CASE("generator: wrong final width raises ShapeMismatch") {
    GeneratorNet g = make_generator(2, 1, 1, {4}, Activation::sigmoid, 8);
    g.layers.back().weight = Mat(23, 4);
    g.layers.back().bias = Vec(23, 0.0);
    CHECK_THROWS_AS(g.validate(), ShapeMismatch);
    CHECK_THROWS_AS(partition_generator_output(Vec(23, 0.0), 2, 1, 1), ShapeMismatch);
}

TEST_CASE("sigmoid saturates to 1 for large pre-activations") {
    std::vector<DenseLayer> layers;
    layers.push_back({Mat(1, 1), Vec{40.0}, Activation::sigmoid});
    Vec out;
    layers_forward(layers, {0.0}, out);
    CHECK(std::abs(out[0] - 1.0) < 1e-12);
}

TEST_CASE("init_weights: deterministic, bounded, seed sensitive") {
    GeneratorNet a = make_generator(2, 1, 1, {6, 6}, Activation::sigmoid, 99);
    GeneratorNet b = make_generator(2, 1, 1, {6, 6}, Activation::sigmoid, 99);
    GeneratorNet c = make_generator(2, 1, 1, {6, 6}, Activation::sigmoid, 100);

    bool all_equal = true, any_diff = false;
    for (std::size_t li = 0; li < a.layers.size(); ++li) {
        for (std::size_t i = 0; i < a.layers[li].weight.size(); ++i) {
            all_equal &= a.layers[li].weight.raw()[i] == b.layers[li].weight.raw()[i];
            any_diff |= a.layers[li].weight.raw()[i] != c.layers[li].weight.raw()[i];
        }
    }
    CHECK(all_equal);
    CHECK(any_diff);

    // fan_in = fan_out = 6 -> bound sqrt(6/12) = 0.70710...
    const DenseLayer& mid = a.layers[1];
    REQUIRE(mid.in_width() == 6);
    REQUIRE(mid.out_width() == 6);
    for (std::size_t i = 0; i < mid.weight.size(); ++i)
        CHECK(std::abs(mid.weight.raw()[i]) <= 0.7071067811865476);
    for (double bias : mid.bias) CHECK(bias == 0.0);
}

TEST_CASE("backward: zero upstream gives zero gradients") {
    GeneratorNet g = make_generator(2, 1, 1, {5}, Activation::sigmoid, 43);
    MlpCache cache;
    layers_forward_cached(g.layers, {0.2, -0.4}, cache);
    NetGrads grads;
    grads.init_like(g.layers);
    Vec dinput;
    layers_backward(g.layers, cache, Vec(24, 0.0), grads, dinput);
    for (const auto& m : grads.dW) CHECK(max_abs(m) == 0.0);
    for (const auto& v : grads.db)
        for (double x : v) CHECK(x == 0.0);
    for (double x : dinput) CHECK(x == 0.0);
}

TEST_CASE("backward: scalar sigmoid layer matches the hand chain rule") {
    const double w = 0.8, b = -0.3, x = 0.6;
    std::vector<DenseLayer> layers;
    layers.push_back({Mat{{w}}, Vec{b}, Activation::sigmoid});

    MlpCache cache;
    layers_forward_cached(layers, {x}, cache);
    NetGrads grads;
    grads.init_like(layers);
    Vec dinput;
    layers_backward(layers, cache, {1.0}, grads, dinput);

    const double s = 1.0 / (1.0 + std::exp(-(w * x + b)));
    const double sprime = s * (1.0 - s);
    CHECK(dinput[0] == doctest::Approx(sprime * w).epsilon(1e-14));
    CHECK(grads.dW[0](0, 0) == doctest::Approx(sprime * x).epsilon(1e-14));
    CHECK(grads.db[0][0] == doctest::Approx(sprime).epsilon(1e-14));
}

TEST_CASE("backward: finite differences across random nets") {
    const GradCheckResult r = check_net_backward(44, 30);
    CHECK(r.max_rel_err < 1e-5);
    CHECK(r.checked > 0);
}

TEST_CASE("validation rejects misconfigured nets") {
    EncoderNet e = make_encoder({2, 3, 2}, 1);
    e.layers[0].activation = Activation::sigmoid;
    CHECK_THROWS_AS(e.validate(), ConfigError);

    GeneratorNet g = make_generator(2, 1, 1, {4}, Activation::sigmoid, 1);
    g.layers[0].activation = Activation::identity;
    CHECK_THROWS_AS(g.validate(), ConfigError);
}
