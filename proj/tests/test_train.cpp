#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpvss/eval.hpp"
#include "lpvss/rng.hpp"
#include "lpvss/train.hpp"

using namespace lpvss;

namespace {

RawSeries ramp_series(std::size_t k) {
    RawSeries s;
    s.outputs = Mat(k, 1);
    s.inputs = Mat(k, 1);
    for (std::size_t i = 0; i < k; ++i) {
        s.outputs(i, 0) = static_cast<double>(i);
        s.inputs(i, 0) = static_cast<double>(100 + i);
    }
    return s;
}

struct SmallProblem {
    SplitSeries splits;
    std::vector<TrajectoryWindow> windows;
    TrainConfig cfg;
};

SmallProblem small_problem(std::uint64_t seed) {
    TwoTankInput input;
    input.hold = 12;
    RawSeries raw = synth_two_tank(240, input, 0.01, 11);
    Normalizer nz = Normalizer::fit(raw, 144);
    RawSeries norm = nz.apply(raw);

    SmallProblem p;
    p.splits = chrono_split(norm, 0.6, 0.2, 0.2);
    p.cfg.window_length = 10;
    p.cfg.stride = 5;
    p.cfg.batch_size = 8;
    p.cfg.learning_rate = 0.003;
    p.cfg.epochs = 4;
    p.cfg.lambda = 0.01;
    p.cfg.seed = seed;
    p.cfg.gamma = 0.99;
    p.cfg.patience = 0;
    p.cfg.order_n = 2;
    p.windows = make_windows(p.splits.train, p.cfg.window_length, p.cfg.stride);
    return p;
}

}  // namespace

TEST_CASE("make_windows: enumerated starts for K=10, L=4, s=2") {
    const auto windows = make_windows(ramp_series(10), 4, 2);
    REQUIRE(windows.size() == 4);  // 1-based starts {1, 3, 5, 7}
    CHECK(windows[0].origin_index == 0);
    CHECK(windows[1].origin_index == 2);
    CHECK(windows[2].origin_index == 4);
    CHECK(windows[3].origin_index == 6);
    CHECK(windows[1].outputs(0, 0) == 2.0);
    CHECK(windows[1].inputs(3, 0) == 105.0);
    CHECK(windows[0].outputs.rows() == 4);
}

TEST_CASE("make_windows: L = K gives a single window") {
    const auto windows = make_windows(ramp_series(6), 6, 3);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].origin_index == 0);
}

TEST_CASE("make_windows: K=5, L=2, s=1 gives four windows") {
    const auto windows = make_windows(ramp_series(5), 2, 1);
    REQUIRE(windows.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(windows[i].origin_index == i);
}

TEST_CASE("make_windows: window longer than the series") {
    CHECK_THROWS_AS(make_windows(ramp_series(3), 4, 1), WindowTooLong);
}

TEST_CASE("make_windows: matches brute-force enumeration on random shapes") {
    Rng rng(61);
    for (int c = 0; c < 300; ++c) {
        const std::size_t k = 2 + rng.index(60);
        const std::size_t l = 1 + rng.index(k);
        const std::size_t s = 1 + rng.index(8);
        const auto windows = make_windows(ramp_series(k), l, s);

        std::vector<std::size_t> expected;
        for (std::size_t start = 0; start + l <= k; start += s) expected.push_back(start);
        REQUIRE(windows.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(windows[i].origin_index == expected[i]);
            CHECK(windows[i].outputs(0, 0) == static_cast<double>(expected[i]));
        }
    }
}

TEST_CASE("response_loss: perfect fit is zero") {
    const std::vector<Mat> pred{Mat(3, 1, {1.0, 2.0, 3.0})};
    CHECK(response_loss(pred, pred, 2) == 0.0);
}

TEST_CASE("response_loss: printed-form fixture 3/(2*1)") {
    // |Z| = 1, m = 1, L = 2, squared errors (1, 1, 1) over k = 0..2
    const std::vector<Mat> pred{Mat(3, 1, {1.0, 2.0, 3.0})};
    const std::vector<Mat> meas{Mat(3, 1, {0.0, 1.0, 2.0})};
    CHECK(response_loss(pred, meas, 2) == doctest::Approx(1.5));
    CHECK(response_loss(pred, meas, 2, LossNorm::natural) == doctest::Approx(1.0));
}

TEST_CASE("response_loss: duplicated trajectory leaves the batch mean unchanged") {
    const std::vector<Mat> pred1{Mat(3, 1, {1.0, 2.0, 3.0})};
    const std::vector<Mat> meas1{Mat(3, 1, {0.5, 1.0, 2.5})};
    const std::vector<Mat> pred2{pred1[0], pred1[0]};
    const std::vector<Mat> meas2{meas1[0], meas1[0]};
    CHECK(response_loss(pred1, meas1, 2) == doctest::Approx(response_loss(pred2, meas2, 2)));
}

TEST_CASE("state_loss: printed-form fixture 5/((2-1)*1)") {
    // |Z| = 1, n = 1, L = 2, squared gaps (4, 1) at k = 1, 2
    const std::vector<Mat> prop{Mat(2, 1, {3.0, 1.0})};
    const std::vector<Mat> enc{Mat(2, 1, {1.0, 0.0})};
    CHECK(state_loss(prop, enc, 2) == doctest::Approx(5.0));
    CHECK(state_loss(prop, enc, 2, LossNorm::natural) == doctest::Approx(2.5));
    CHECK(state_loss(prop, prop, 2) == 0.0);
}

TEST_CASE("state_loss: degenerate window rejected") {
    const std::vector<Mat> x{Mat(1, 1, {1.0})};
    CHECK_THROWS_AS(state_loss(x, x, 1), DegenerateWindow);
}

TEST_CASE("total_loss fixtures") {
    CHECK(total_loss(1.5, 5.0, 0.0) == 1.5);
    CHECK(total_loss(1.5, 5.0, 0.01) == doctest::Approx(1.55));
    CHECK(total_loss(2.0, 3.0, 1.0) == 5.0);
    CHECK_THROWS_AS(total_loss(std::nan(""), 0.0, 0.0), NonFiniteLoss);
}

TEST_CASE("losses match a naive reference on random batches") {
    Rng rng(62);
    for (int c = 0; c < 150; ++c) {
        const std::size_t z = 1 + rng.index(5);
        const std::size_t rows = 2 + rng.index(8);
        const std::size_t m = 1 + rng.index(3);
        const std::size_t L = 2 + rng.index(8);
        std::vector<Mat> pred(z), meas(z);
        for (std::size_t t = 0; t < z; ++t) {
            pred[t] = Mat(rows, m);
            meas[t] = Mat(rows, m);
            for (std::size_t i = 0; i < rows * m; ++i) {
                pred[t].raw()[i] = rng.uniform(-2.0, 2.0);
                meas[t].raw()[i] = rng.uniform(-2.0, 2.0);
            }
        }
        // naive triple loop, printed normalization
        double naive = 0.0;
        for (std::size_t t = 0; t < z; ++t) {
            double traj = 0.0;
            for (std::size_t k = 0; k < rows; ++k)
                for (std::size_t i = 0; i < m; ++i) {
                    const double d = pred[t](k, i) - meas[t](k, i);
                    traj += d * d;
                }
            naive += traj / (static_cast<double>(L) * static_cast<double>(m));
        }
        naive /= static_cast<double>(z);
        CHECK(std::abs(response_loss(pred, meas, L) - naive) < 1e-12);

        double naive_state = 0.0;
        for (std::size_t t = 0; t < z; ++t) {
            double traj = 0.0;
            for (std::size_t k = 0; k < rows; ++k)
                for (std::size_t i = 0; i < m; ++i) {
                    const double d = pred[t](k, i) - meas[t](k, i);
                    traj += d * d;
                }
            naive_state += traj / (static_cast<double>(L - 1) * static_cast<double>(m));
        }
        naive_state /= static_cast<double>(z);
        CHECK(std::abs(state_loss(pred, meas, L) - naive_state) < 1e-12);
    }
}

TEST_CASE("adam_step: zero gradient from a fresh state leaves parameters unchanged") {
    std::vector<double> params{1.5, -2.0};
    std::vector<double> grads{0.0, 0.0};
    AdamState state(2);
    adam_step(params, grads, state, 0.1);
    CHECK(params[0] == 1.5);
    CHECK(params[1] == -2.0);
    CHECK(state.step_count == 1);
}

TEST_CASE("adam_step: first step moves by about lr in the gradient direction") {
    std::vector<double> params{0.0};
    std::vector<double> grads{0.3};
    AdamState state(1);
    adam_step(params, grads, state, 0.001);
    CHECK(params[0] == doctest::Approx(-0.001).epsilon(1e-6));
}

TEST_CASE("adam_step: equal gradients give equal updates") {
    std::vector<double> params{1.0, 1.0};
    std::vector<double> grads{0.7, 0.7};
    AdamState state(2);
    adam_step(params, grads, state, 0.01);
    CHECK(params[0] == params[1]);
}

TEST_CASE("adam_step: moments decay under zero gradients") {
    std::vector<double> params{0.0};
    AdamState state(1);
    state.first_moment[0] = 1.0;
    state.second_moment[0] = 1.0;
    std::vector<double> grads{0.0};
    adam_step(params, grads, state, 0.0);
    CHECK(state.first_moment[0] == doctest::Approx(0.9));
    CHECK(state.second_moment[0] == doctest::Approx(0.999));
}

TEST_CASE("fit: zero epochs returns the model unchanged") {
    SmallProblem p = small_problem(3);
    p.cfg.epochs = 0;
    NnssModel model = make_nnss(2, 1, 1, {}, p.cfg.gamma, 3);
    std::vector<double> before(model.param_count());
    model.export_params(before);

    const TrainReport report = fit(model, p.windows, p.splits.val, p.cfg);
    std::vector<double> after(model.param_count());
    model.export_params(after);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
    CHECK(report.train_loss.empty());
    CHECK(report.best_epoch == 0);
}

TEST_CASE("fit: identical seeds give identical reports and parameters") {
    SmallProblem p = small_problem(7);
    NnssModel m1 = make_nnss(2, 1, 1, {}, p.cfg.gamma, p.cfg.seed);
    NnssModel m2 = make_nnss(2, 1, 1, {}, p.cfg.gamma, p.cfg.seed);
    const TrainReport r1 = fit(m1, p.windows, p.splits.val, p.cfg);
    const TrainReport r2 = fit(m2, p.windows, p.splits.val, p.cfg);

    REQUIRE(r1.train_loss.size() == r2.train_loss.size());
    for (std::size_t e = 0; e < r1.train_loss.size(); ++e) {
        CHECK(r1.train_loss[e] == r2.train_loss[e]);
        CHECK(r1.val_rmse[e] == r2.val_rmse[e]);
    }
    std::vector<double> p1(m1.param_count()), p2(m2.param_count());
    m1.export_params(p1);
    m2.export_params(p2);
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);
}

TEST_CASE("fit: training reduces the loss on the small problem") {
    SmallProblem p = small_problem(5);
    p.cfg.epochs = 8;
    NnssModel model = make_nnss(2, 1, 1, {}, p.cfg.gamma, p.cfg.seed);
    const TrainReport report = fit(model, p.windows, p.splits.val, p.cfg);
    REQUIRE(report.train_loss.size() == 8);
    CHECK(report.train_loss.back() < report.train_loss.front());
    CHECK(report.audit_max_radius > 0.0);
    CHECK(report.audit_max_radius < p.cfg.gamma);
    CHECK(report.best_epoch >= 1);
}

TEST_CASE("fit: patience stops exactly patience epochs after the best") {
    SmallProblem p = small_problem(9);
    // a learning rate far below one ulp never changes the parameters, so the
    // validation metric can never improve after its first evaluation
    p.cfg.learning_rate = 1e-300;
    p.cfg.epochs = 50;
    p.cfg.patience = 2;
    NnssModel model = make_nnss(2, 1, 1, {}, p.cfg.gamma, p.cfg.seed);
    const TrainReport report = fit(model, p.windows, p.splits.val, p.cfg);
    CHECK(report.stopped_early);
    CHECK(report.best_epoch == 1);
    CHECK(report.train_loss.size() == 3);  // best epoch + 2 post-best epochs
}

TEST_CASE("fit: diverging training raises NonFiniteLoss") {
    SmallProblem p = small_problem(13);
    p.cfg.learning_rate = 1e12;
    p.cfg.epochs = 30;
    NnssModel model = make_nnss(2, 1, 1, {}, p.cfg.gamma, p.cfg.seed);
    CHECK_THROWS_AS(fit(model, p.windows, p.splits.val, p.cfg), NonFiniteLoss);
}

TEST_CASE("config validation rejects bad fields") {
    TrainConfig cfg;
    cfg.window_length = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.gamma = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.lambda = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.stride = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
