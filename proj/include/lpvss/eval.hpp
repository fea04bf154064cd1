#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpvss/baseline.hpp"
#include "lpvss/data.hpp"
#include "lpvss/model.hpp"
#include "lpvss/train.hpp"

namespace lpvss {

struct RmseResult {
    Vec per_channel;
    double averaged = 0.0;  // arithmetic mean across output channels
};

// Per-channel root mean square error over K x m matrices.
RmseResult rmse(const Mat& measured, const Mat& predicted);

// Free-running simulation: one encoder call on the first measured output,
// then a rollout over the split's inputs alone. Returns the K x m predicted
// outputs; optionally audits per-step spectral radii.
template <typename Model>
Mat simulate_outputs(const Model& model, const RawSeries& series, double* radius_min = nullptr,
                     double* radius_max = nullptr);

// Channel-averaged simulation-mode RMSE in the series' own units.
template <typename Model>
double simulation_rmse(const Model& model, const RawSeries& series);

struct SplitEval {
    Vec per_channel_rmse;
    double averaged_rmse = 0.0;
    double radius_min = 0.0;
    double radius_max = 0.0;
};

// Simulation-mode evaluation of one split. RMSE is computed in normalized
// units unless `denormalize` is given, in which case predictions and errors
// are mapped back to physical units first. `predictions` (when non-null)
// receives the predicted outputs in the reported units.
template <typename Model>
SplitEval simulate_and_report(const Model& model, const RawSeries& split,
                              const Normalizer* denormalize = nullptr, Mat* predictions = nullptr);

struct EvalReport {
    SplitEval train, val, test;
    std::uint64_t seed = 0;
    std::size_t order = 0;
};

enum class ModelKind { nnss, constant };

struct NnssSpec {
    std::vector<std::size_t> encoder_hidden{32};
    std::vector<std::size_t> generator_hidden{32, 32};
    Activation hidden_activation = Activation::sigmoid;
    double eps_tilde_init = 0.0;
    bool train_eps = true;
};

NnssModel make_nnss(std::size_t n, std::size_t m, std::size_t r, const NnssSpec& spec,
                    double gamma, std::uint64_t seed);

struct SweepCell {
    std::size_t order = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    EvalReport report;
    TrainReport training;
};

struct SweepOptions {
    std::vector<std::size_t> orders;
    std::vector<std::uint64_t> seeds;
    TrainConfig config;  // order_n and seed fields are overridden per cell
    ModelKind kind = ModelKind::nnss;
    NnssSpec spec;
    const Mat* baseline_init = nullptr;
};

// Full (order x seed) grid of independently trained models evaluated on the
// given normalized splits. Failed cells are recorded and the sweep
// continues; cells are ordered by (order, seed).
std::vector<SweepCell> sweep(const SplitSeries& splits, const SweepOptions& options);

// columns: order,seed,split,channel,rmse  (channel is y1..ym or avg; failed
// cells carry nan)
void write_sweep_csv(const std::vector<SweepCell>& cells, std::size_t m, const std::string& path);

// columns: k,y1..ym,yhat1..yhatm
void write_prediction_csv(const Mat& measured, const Mat& predicted, const std::string& path);

extern template Mat simulate_outputs<NnssModel>(const NnssModel&, const RawSeries&, double*, double*);
extern template Mat simulate_outputs<ConstantSsModel>(const ConstantSsModel&, const RawSeries&, double*, double*);
extern template double simulation_rmse<NnssModel>(const NnssModel&, const RawSeries&);
extern template double simulation_rmse<ConstantSsModel>(const ConstantSsModel&, const RawSeries&);
extern template SplitEval simulate_and_report<NnssModel>(const NnssModel&, const RawSeries&,
                                                         const Normalizer*, Mat*);
extern template SplitEval simulate_and_report<ConstantSsModel>(const ConstantSsModel&,
                                                               const RawSeries&, const Normalizer*,
                                                               Mat*);

}  // namespace lpvss
