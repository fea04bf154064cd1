#pragma once

#include <cstdint>
#include <vector>

#include "lpvss/data.hpp"
#include "lpvss/mat.hpp"
#include "lpvss/optim.hpp"

namespace lpvss {

// One length-L slice of paired output/input rows. origin_index is the
// 0-based row of the source series the window starts at (the sliding-window
// start sequence 1, 1+s, ... counted 1-based becomes 0, s, ... here).
struct TrajectoryWindow {
    Mat outputs;  // L x m
    Mat inputs;   // L x r
    std::size_t origin_index = 0;
};

// Overlapping windows with stride s: starts 0, s, ..., floor((K-L)/s)*s,
// giving N = floor((K-L)/s) + 1 windows.
std::vector<TrajectoryWindow> make_windows(const RawSeries& series, std::size_t window_length,
                                           std::size_t stride);

// Printed keeps the normalizations exactly as the loss definitions state
// them (response / (L*m), state / ((L-1)*n)) regardless of how many terms
// the caller supplies; natural divides by the supplied term count instead.
enum class LossNorm { printed, natural };

// Multi-step prediction error, averaged over the mini-batch. Each pair of
// matrices holds one trajectory's predicted/measured outputs row per step.
double response_loss(const std::vector<Mat>& predicted, const std::vector<Mat>& measured,
                     std::size_t window_length, LossNorm norm = LossNorm::printed);

// State-consistency penalty between propagated and encoder states, the
// initial state excluded. window_length == 1 is degenerate (denominator
// L - 1) and rejected.
double state_loss(const std::vector<Mat>& propagated, const std::vector<Mat>& encoded,
                  std::size_t window_length, LossNorm norm = LossNorm::printed);

double total_loss(double response, double state, double lambda);

struct TrainConfig {
    std::size_t window_length = 80;  // L
    std::size_t stride = 2;          // s
    std::size_t batch_size = 64;     // |Z|
    double learning_rate = 0.001;
    std::size_t epochs = 200;
    double lambda = 0.01;
    std::uint64_t seed = 1;
    double gamma = 0.99;
    std::size_t patience = 20;  // 0 disables early stopping
    std::size_t order_n = 2;
    LossNorm loss_norm = LossNorm::printed;

    void validate() const;
};

struct TrainReport {
    std::vector<double> train_loss;  // one entry per finished epoch
    std::vector<double> val_rmse;    // simulation-mode RMSE per epoch
    std::size_t best_epoch = 0;      // 1-based; 0 when no epoch ran
    double best_val_rmse = 0.0;
    bool stopped_early = false;
    std::uint64_t seed = 0;
    double audit_max_radius = 0.0;  // largest sampled spectral radius seen
};

struct NnssModel;
struct ConstantSsModel;

// Algorithm-2 training loop: seeded shuffling, mini-batches, multi-step
// rollout loss with state-consistency regularization, Adam updates, and
// early stopping on full-series simulation RMSE over `val` with best-
// snapshot restoration. Deterministic for fixed seed and data.
template <typename Model>
TrainReport fit(Model& model, const std::vector<TrajectoryWindow>& windows, const RawSeries& val,
                const TrainConfig& config);

extern template TrainReport fit<NnssModel>(NnssModel&, const std::vector<TrajectoryWindow>&,
                                           const RawSeries&, const TrainConfig&);
extern template TrainReport fit<ConstantSsModel>(ConstantSsModel&,
                                                 const std::vector<TrajectoryWindow>&,
                                                 const RawSeries&, const TrainConfig&);

}  // namespace lpvss
