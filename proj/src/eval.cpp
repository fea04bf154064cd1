#include "lpvss/eval.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace lpvss {

RmseResult rmse(const Mat& measured, const Mat& predicted) {
    if (!measured.same_shape(predicted)) throw ShapeMismatch("rmse: shapes differ");
    if (measured.rows() == 0) throw ShapeMismatch("rmse: empty input");

    RmseResult result;
    result.per_channel.resize(measured.cols());
    for (std::size_t j = 0; j < measured.cols(); ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < measured.rows(); ++k) {
            const double d = measured(k, j) - predicted(k, j);
            sum += d * d;
        }
        result.per_channel[j] = std::sqrt(sum / static_cast<double>(measured.rows()));
        result.averaged += result.per_channel[j];
    }
    result.averaged /= static_cast<double>(measured.cols());
    return result;
}

template <typename Model>
Mat simulate_outputs(const Model& model, const RawSeries& series, double* radius_min,
                     double* radius_max) {
    if (series.rows() < 2) throw SegmentTooShort("simulate: series needs at least 2 rows");
    const std::vector<Vec> u = series.input_rows();
    InferOptions opts;
    opts.audit = radius_min != nullptr || radius_max != nullptr;

    RolloutTrace trace = infer(model, std::span<const Vec>(u), series.output_row(0), opts);

    if (opts.audit) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (double rad : trace.spectral_radii) {
            lo = std::min(lo, rad);
            hi = std::max(hi, rad);
        }
        if (radius_min) *radius_min = lo;
        if (radius_max) *radius_max = hi;
    }

    Mat pred(series.rows(), model.m);
    for (std::size_t k = 0; k < series.rows(); ++k)
        for (std::size_t j = 0; j < model.m; ++j) pred(k, j) = trace.outputs[k][j];
    return pred;
}

template <typename Model>
double simulation_rmse(const Model& model, const RawSeries& series) {
    const Mat pred = simulate_outputs(model, series);
    return rmse(series.outputs, pred).averaged;
}

template <typename Model>
SplitEval simulate_and_report(const Model& model, const RawSeries& split,
                              const Normalizer* denormalize, Mat* predictions) {
    SplitEval eval;
    Mat pred = simulate_outputs(model, split, &eval.radius_min, &eval.radius_max);
    Mat measured = split.outputs;
    if (denormalize) {
        pred = denormalize->invert_outputs(pred);
        measured = denormalize->invert_outputs(measured);
    }
    const RmseResult r = rmse(measured, pred);
    eval.per_channel_rmse = r.per_channel;
    eval.averaged_rmse = r.averaged;
    if (predictions) *predictions = std::move(pred);
    return eval;
}

NnssModel make_nnss(std::size_t n, std::size_t m, std::size_t r, const NnssSpec& spec,
                    double gamma, std::uint64_t seed) {
    NnssModel model;
    model.n = n;
    model.m = m;
    model.r = r;
    model.gamma = gamma;
    model.eps_tilde = spec.eps_tilde_init;
    model.train_eps = spec.train_eps;

    std::vector<std::size_t> enc_widths{m};
    enc_widths.insert(enc_widths.end(), spec.encoder_hidden.begin(), spec.encoder_hidden.end());
    enc_widths.push_back(n);
    model.encoder = make_encoder(enc_widths, seed);
    model.generator = make_generator(n, m, r, spec.generator_hidden, spec.hidden_activation, seed);
    model.validate();
    return model;
}

std::vector<SweepCell> sweep(const SplitSeries& splits, const SweepOptions& options) {
    if (options.orders.empty() || options.seeds.empty())
        throw ConfigError("sweep: need at least one order and one seed");

    std::vector<SweepCell> cells;
    for (std::size_t order : options.orders) {
        for (std::uint64_t seed : options.seeds) {
            SweepCell cell;
            cell.order = order;
            cell.seed = seed;
            try {
                TrainConfig cfg = options.config;
                cfg.order_n = order;
                cfg.seed = seed;

                std::vector<TrajectoryWindow> windows =
                    make_windows(splits.train, cfg.window_length, cfg.stride);

                const std::size_t m = splits.train.m();
                const std::size_t r = splits.train.r();
                if (options.kind == ModelKind::nnss) {
                    NnssModel model = make_nnss(order, m, r, options.spec, cfg.gamma, seed);
                    cell.training = fit(model, windows, splits.val, cfg);
                    cell.report.train = simulate_and_report(model, splits.train);
                    cell.report.val = simulate_and_report(model, splits.val);
                    cell.report.test = simulate_and_report(model, splits.test);
                } else {
                    std::vector<std::size_t> enc_widths{m};
                    enc_widths.insert(enc_widths.end(), options.spec.encoder_hidden.begin(),
                                      options.spec.encoder_hidden.end());
                    enc_widths.push_back(order);
                    ConstantSsModel model =
                        make_baseline(order, m, r, enc_widths, cfg.gamma, seed, options.baseline_init);
                    cell.training = fit(model, windows, splits.val, cfg);
                    cell.report.train = simulate_and_report(model, splits.train);
                    cell.report.val = simulate_and_report(model, splits.val);
                    cell.report.test = simulate_and_report(model, splits.test);
                }
                cell.report.seed = seed;
                cell.report.order = order;
            } catch (const Error& e) {
                cell.failed = true;
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_sweep_csv(const std::vector<SweepCell>& cells, std::size_t m, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot write '" + path + "'");
    std::fprintf(f, "order,seed,split,channel,rmse\n");
    for (const auto& cell : cells) {
        auto emit_split = [&](const char* name, const SplitEval& eval) {
            for (std::size_t j = 0; j < m; ++j) {
                const double v = cell.failed ? std::numeric_limits<double>::quiet_NaN()
                                             : eval.per_channel_rmse[j];
                std::fprintf(f, "%zu,%llu,%s,y%zu,%.17g\n", cell.order,
                             static_cast<unsigned long long>(cell.seed), name, j + 1, v);
            }
            const double avg =
                cell.failed ? std::numeric_limits<double>::quiet_NaN() : eval.averaged_rmse;
            std::fprintf(f, "%zu,%llu,%s,avg,%.17g\n", cell.order,
                         static_cast<unsigned long long>(cell.seed), name, avg);
        };
        emit_split("train", cell.report.train);
        emit_split("val", cell.report.val);
        emit_split("test", cell.report.test);
    }
    std::fclose(f);
}

void write_prediction_csv(const Mat& measured, const Mat& predicted, const std::string& path) {
    if (!measured.same_shape(predicted)) throw ShapeMismatch("prediction csv: shapes differ");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot write '" + path + "'");
    std::fprintf(f, "k");
    for (std::size_t j = 0; j < measured.cols(); ++j) std::fprintf(f, ",y%zu", j + 1);
    for (std::size_t j = 0; j < measured.cols(); ++j) std::fprintf(f, ",yhat%zu", j + 1);
    std::fputc('\n', f);
    for (std::size_t k = 0; k < measured.rows(); ++k) {
        std::fprintf(f, "%zu", k);
        for (std::size_t j = 0; j < measured.cols(); ++j) std::fprintf(f, ",%.17g", measured(k, j));
        for (std::size_t j = 0; j < measured.cols(); ++j) std::fprintf(f, ",%.17g", predicted(k, j));
        std::fputc('\n', f);
    }
    std::fclose(f);
}

template Mat simulate_outputs<NnssModel>(const NnssModel&, const RawSeries&, double*, double*);
template Mat simulate_outputs<ConstantSsModel>(const ConstantSsModel&, const RawSeries&, double*,
                                               double*);
template double simulation_rmse<NnssModel>(const NnssModel&, const RawSeries&);
template double simulation_rmse<ConstantSsModel>(const ConstantSsModel&, const RawSeries&);
template SplitEval simulate_and_report<NnssModel>(const NnssModel&, const RawSeries&,
                                                  const Normalizer*, Mat*);
template SplitEval simulate_and_report<ConstantSsModel>(const ConstantSsModel&, const RawSeries&,
                                                        const Normalizer*, Mat*);

}  // namespace lpvss
