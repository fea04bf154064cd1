#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpvss/mat.hpp"

namespace lpvss {

// One measured input-output record set: K rows of m outputs and r inputs.
struct RawSeries {
    Mat outputs;  // K x m
    Mat inputs;   // K x r
    double sample_time = 1.0;
    std::vector<std::string> output_names;  // y1..ym
    std::vector<std::string> input_names;   // u1..ur

    std::size_t rows() const { return outputs.rows(); }
    std::size_t m() const { return outputs.cols(); }
    std::size_t r() const { return inputs.cols(); }

    Vec output_row(std::size_t k) const;
    Vec input_row(std::size_t k) const;
    std::vector<Vec> input_rows() const;

    RawSeries slice(std::size_t start, std::size_t count) const;
};

// CSV schema: header `y1,...,ym,u1,...,ur`, comma-separated decimal body,
// UTF-8, LF or CRLF. Errors carry the offending 1-based line number.
RawSeries load_csv(const std::string& path);
void save_csv(const RawSeries& series, const std::string& path);

// Headerless numeric CSV holding one matrix (used for baseline A-targets).
Mat load_matrix_csv(const std::string& path);

// Per-channel z-score statistics over the m output channels followed by the
// r input channels. Standard deviations use the sample convention (count-1);
// degenerate channels get sigma := 1 and are listed in constant_channels.
struct Normalizer {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::size_t m = 0, r = 0;
    std::vector<std::size_t> constant_channels;

    static Normalizer fit(const RawSeries& series, std::size_t fit_rows);
    RawSeries apply(const RawSeries& series) const;
    RawSeries invert(const RawSeries& series) const;
    // invert only the output channels of a K x m prediction block
    Mat invert_outputs(const Mat& outputs) const;
};

// Contiguous chronological train/val/test segmentation. Train and val sizes
// are floored, the remainder goes to test. Throws SegmentTooShort when a
// segment ends up shorter than min_rows.
struct SplitSeries {
    RawSeries train, val, test;
};
SplitSeries chrono_split(const RawSeries& series, double train_frac, double val_frac,
                         double test_frac, std::size_t min_rows = 1);

// Synthetic nonlinear two-tank benchmark: Euler-discretized
//   h1+ = h1 + Ts(-a1 sqrt(h1) + b u),  h2+ = h2 + Ts(a1 sqrt(h1) - a2 sqrt(h2))
// with levels clamped at zero and y = h2 + Gaussian noise.
struct TwoTankInput {
    enum class Kind { piecewise_constant, multisine };
    Kind kind = Kind::piecewise_constant;
    // piecewise-constant: hold each pseudo-random level for `hold` steps
    std::size_t hold = 50;
    double level_min = 0.0;
    double level_max = 2.0;
    // multisine: `sines` equally spaced frequencies in [freq_min, freq_max]
    // cycles/step, random phases, centered at `offset`
    std::size_t sines = 5;
    double amplitude = 0.8;
    double freq_min = 0.002;
    double freq_max = 0.02;
    double offset = 1.0;
};

struct TwoTankParams {
    double a1 = 0.5;
    double a2 = 0.4;
    double b = 1.0;
    double sample_time = 0.2;
    double h1_init = 0.0;
    double h2_init = 0.0;
};

RawSeries synth_two_tank(std::size_t steps, const TwoTankInput& input, double noise_std,
                         std::uint64_t seed, const TwoTankParams& params = {});

}  // namespace lpvss
