#include "lpvss/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lpvss/baseline.hpp"
#include "lpvss/eval.hpp"
#include "lpvss/model.hpp"
#include "lpvss/parallel.hpp"
#include "lpvss/rng.hpp"

namespace lpvss {

std::vector<TrajectoryWindow> make_windows(const RawSeries& series, std::size_t window_length,
                                           std::size_t stride) {
    const std::size_t k = series.rows();
    if (window_length < 1) throw ConfigError("make_windows: window length must be positive");
    if (stride < 1) throw ConfigError("make_windows: stride must be positive");
    if (window_length > k)
        throw WindowTooLong("make_windows: window length " + std::to_string(window_length) +
                            " exceeds the series length " + std::to_string(k));

    const std::size_t count = (k - window_length) / stride + 1;
    std::vector<TrajectoryWindow> windows;
    windows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t start = i * stride;
        TrajectoryWindow w;
        w.outputs = series.outputs.block(start, 0, window_length, series.m());
        w.inputs = series.inputs.block(start, 0, window_length, series.r());
        w.origin_index = start;
        windows.push_back(std::move(w));
    }
    return windows;
}

namespace {

double batch_mean_sum_sq(const std::vector<Mat>& a, const std::vector<Mat>& b, double denom) {
    double total = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (!a[t].same_shape(b[t])) throw ShapeMismatch("loss: trajectory shapes differ");
        double sum = 0.0;
        for (std::size_t i = 0; i < a[t].size(); ++i) {
            const double d = a[t].data()[i] - b[t].data()[i];
            sum += d * d;
        }
        total += sum / denom;
    }
    return total / static_cast<double>(a.size());
}

}  // namespace

double response_loss(const std::vector<Mat>& predicted, const std::vector<Mat>& measured,
                     std::size_t window_length, LossNorm norm) {
    if (predicted.empty() || predicted.size() != measured.size())
        throw ShapeMismatch("response_loss: batch sizes differ or batch empty");
    const std::size_t m = measured.front().cols();
    const double denom = norm == LossNorm::printed
                             ? static_cast<double>(window_length) * static_cast<double>(m)
                             : static_cast<double>(predicted.front().rows()) * static_cast<double>(m);
    return batch_mean_sum_sq(predicted, measured, denom);
}

double state_loss(const std::vector<Mat>& propagated, const std::vector<Mat>& encoded,
                  std::size_t window_length, LossNorm norm) {
    if (propagated.empty() || propagated.size() != encoded.size())
        throw ShapeMismatch("state_loss: batch sizes differ or batch empty");
    if (window_length <= 1)
        throw DegenerateWindow("state_loss: window length 1 makes the L-1 denominator vanish");
    const std::size_t n = propagated.front().cols();
    const double denom = norm == LossNorm::printed
                             ? static_cast<double>(window_length - 1) * static_cast<double>(n)
                             : static_cast<double>(propagated.front().rows()) * static_cast<double>(n);
    return batch_mean_sum_sq(propagated, encoded, denom);
}

double total_loss(double response, double state, double lambda) {
    if (!std::isfinite(response) || !std::isfinite(state) || !std::isfinite(lambda))
        throw NonFiniteLoss("total_loss: non-finite term");
    return response + lambda * state;
}

void TrainConfig::validate() const {
    if (window_length < 2) throw ConfigError("config: window length L must be at least 2");
    if (stride < 1) throw ConfigError("config: stride must be at least 1");
    if (batch_size < 1) throw ConfigError("config: batch size must be at least 1");
    if (!(learning_rate > 0.0)) throw ConfigError("config: learning rate must be positive");
    if (lambda < 0.0) throw ConfigError("config: lambda must be non-negative");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("config: gamma must lie in (0, 1]");
    if (order_n < 1) throw ConfigError("config: model order must be at least 1");
}

namespace {

// compile-time binding of each model type to its cache/grads machinery
template <typename Model>
struct FitOps;

template <>
struct FitOps<NnssModel> {
    using Cache = RolloutCache;
    using Grads = ModelGrads;
    static RolloutTrace forward(const NnssModel& m, std::span<const Vec> u, const Vec& y0,
                                const InferOptions& o, Cache& c) {
        return infer_cached(m, u, y0, o, c);
    }
};

template <>
struct FitOps<ConstantSsModel> {
    using Cache = BaselineCache;
    using Grads = BaselineGrads;
    static RolloutTrace forward(const ConstantSsModel& m, std::span<const Vec> u, const Vec& y0,
                                const InferOptions& o, Cache& c) {
        return infer_cached(m, u, y0, o, c);
    }
};

struct PreparedWindow {
    std::vector<Vec> y;  // L rows of m
    std::vector<Vec> u;  // L rows of r
};

template <typename Model>
struct TrajectorySlot {
    typename FitOps<Model>::Cache cache;
    typename FitOps<Model>::Grads grads;
    std::vector<double> flat_grad;
    double response_sum = 0.0;  // sum of squared output errors
    double state_sum = 0.0;     // sum of squared state gaps
    double max_radius = 0.0;
    std::vector<Vec> dY;
    std::vector<Vec> dXdirect;
    std::vector<EncoderTarget> enc_targets;
};

}  // namespace

template <typename Model>
TrainReport fit(Model& model, const std::vector<TrajectoryWindow>& windows, const RawSeries& val,
                const TrainConfig& config) {
    using Ops = FitOps<Model>;
    config.validate();
    model.validate();
    if (windows.empty()) throw ConfigError("fit: no training windows");
    if (val.rows() < 2) throw SegmentTooShort("fit: validation series needs at least 2 rows");

    const std::size_t L = config.window_length;
    const std::size_t n = model.n;
    const std::size_t m = model.m;
    for (const auto& w : windows)
        if (w.outputs.rows() != L || w.outputs.cols() != m || w.inputs.cols() != model.r)
            throw ShapeMismatch("fit: window shapes do not match the model/config");

    TrainReport report;
    report.seed = config.seed;
    if (config.epochs == 0) return report;

    std::vector<PreparedWindow> prepared(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        prepared[i].y.resize(L);
        prepared[i].u.resize(L);
        for (std::size_t k = 0; k < L; ++k) {
            prepared[i].y[k].assign(windows[i].outputs.data() + k * m,
                                    windows[i].outputs.data() + (k + 1) * m);
            prepared[i].u[k].assign(windows[i].inputs.data() + k * model.r,
                                    windows[i].inputs.data() + (k + 1) * model.r);
        }
    }

    const std::size_t param_count = model.param_count();
    std::vector<double> params(param_count), grads(param_count), best_params(param_count);
    model.export_params(params);
    best_params = params;
    AdamState adam(param_count);

    std::vector<TrajectorySlot<Model>> slots(config.batch_size);
    for (auto& slot : slots) {
        slot.grads.init_like(model);
        slot.flat_grad.resize(param_count);
    }

    // loss denominators: printed form per the loss definitions; with L-row
    // windows the rollout supplies L response terms (k = 0..L-1) and L-1
    // state terms (k = 1..L-1)
    const double resp_denom = static_cast<double>(L) * static_cast<double>(m);
    const double state_denom = static_cast<double>(L - 1) * static_cast<double>(n);

    Rng shuffle_rng(config.seed, 2);
    std::vector<std::size_t> order(windows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    double best_rmse = std::numeric_limits<double>::infinity();
    std::size_t epochs_since_best = 0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t batches = 0;

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t z = std::min(config.batch_size, order.size() - start);

            parallel_for(z, [&](std::size_t t) {
                TrajectorySlot<Model>& slot = slots[t];
                const PreparedWindow& w = prepared[order[start + t]];

                InferOptions opts;
                opts.audit = t == 0;  // sampled stability audit
                RolloutTrace trace =
                    Ops::forward(model, std::span<const Vec>(w.u), w.y[0], opts, slot.cache);

                slot.dY.assign(L, Vec(m, 0.0));
                slot.dXdirect.assign(L + 1, Vec(n, 0.0));
                slot.enc_targets.clear();
                slot.response_sum = 0.0;
                slot.state_sum = 0.0;
                slot.max_radius = 0.0;
                if (opts.audit)
                    for (double rad : trace.spectral_radii)
                        slot.max_radius = std::max(slot.max_radius, rad);

                const double zf = static_cast<double>(z);
                for (std::size_t k = 0; k < L; ++k) {
                    for (std::size_t i = 0; i < m; ++i) {
                        const double e = trace.outputs[k][i] - w.y[k][i];
                        slot.response_sum += e * e;
                        slot.dY[k][i] = 2.0 * e / (zf * resp_denom);
                    }
                }
                if (config.lambda > 0.0) {
                    const double wgt = config.lambda * 2.0 / (zf * state_denom);
                    for (std::size_t k = 1; k < L; ++k) {
                        EncoderTarget target;
                        target.y = w.y[k];
                        target.dxenc.resize(n);
                        Vec xenc = model.encoder.forward(w.y[k]);
                        for (std::size_t j = 0; j < n; ++j) {
                            const double gap = trace.states[k][j] - xenc[j];
                            slot.state_sum += gap * gap;
                            slot.dXdirect[k][j] = wgt * gap;
                            target.dxenc[j] = -wgt * gap;
                        }
                        slot.enc_targets.push_back(std::move(target));
                    }
                }

                slot.grads.zero();
                rollout_backward(model, std::span<const Vec>(w.u), trace, slot.cache, slot.dY,
                                 slot.dXdirect, slot.enc_targets, slot.grads);
                slot.grads.export_flat(slot.flat_grad);
            });

            // deterministic reduction in ascending trajectory order
            std::fill(grads.begin(), grads.end(), 0.0);
            double response = 0.0, state = 0.0;
            for (std::size_t t = 0; t < z; ++t) {
                response += slots[t].response_sum / resp_denom;
                state += slots[t].state_sum / state_denom;
                for (std::size_t i = 0; i < param_count; ++i) grads[i] += slots[t].flat_grad[i];
                report.audit_max_radius = std::max(report.audit_max_radius, slots[t].max_radius);
            }
            response /= static_cast<double>(z);
            state /= static_cast<double>(z);
            const double loss = response + config.lambda * state;
            if (!std::isfinite(loss))
                throw NonFiniteLoss("fit: loss became non-finite at epoch " + std::to_string(epoch) +
                                    ", batch " + std::to_string(batches + 1) +
                                    " (training diverged; consider a lower learning rate)");

            if (!model.train_eps) grads[param_count - 1] = 0.0;
            adam_step(params, grads, adam, config.learning_rate);
            model.import_params(params);

            epoch_loss += loss;
            ++batches;
        }

        report.train_loss.push_back(epoch_loss / static_cast<double>(batches));

        const double val_rmse = simulation_rmse(model, val);
        report.val_rmse.push_back(val_rmse);

        if (val_rmse < best_rmse) {
            best_rmse = val_rmse;
            best_params = params;
            report.best_epoch = epoch;
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
            if (config.patience > 0 && epochs_since_best >= config.patience) {
                report.stopped_early = true;
                break;
            }
        }
    }

    model.import_params(best_params);
    report.best_val_rmse = best_rmse;
    return report;
}

template TrainReport fit<NnssModel>(NnssModel&, const std::vector<TrajectoryWindow>&,
                                    const RawSeries&, const TrainConfig&);
template TrainReport fit<ConstantSsModel>(ConstantSsModel&, const std::vector<TrajectoryWindow>&,
                                          const RawSeries&, const TrainConfig&);

}  // namespace lpvss
