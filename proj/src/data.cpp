#include "lpvss/data.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lpvss/rng.hpp"

namespace lpvss {

Vec RawSeries::output_row(std::size_t k) const {
    Vec row(m());
    for (std::size_t j = 0; j < m(); ++j) row[j] = outputs(k, j);
    return row;
}

Vec RawSeries::input_row(std::size_t k) const {
    Vec row(r());
    for (std::size_t j = 0; j < r(); ++j) row[j] = inputs(k, j);
    return row;
}

std::vector<Vec> RawSeries::input_rows() const {
    std::vector<Vec> rows(this->rows());
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = input_row(k);
    return rows;
}

RawSeries RawSeries::slice(std::size_t start, std::size_t count) const {
    if (start + count > rows()) throw ShapeMismatch("RawSeries::slice: range out of bounds");
    RawSeries s;
    s.outputs = outputs.block(start, 0, count, m());
    s.inputs = inputs.block(start, 0, count, r());
    s.sample_time = sample_time;
    s.output_names = output_names;
    s.input_names = input_names;
    return s;
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, std::size_t line_no) {
    const std::string t = trim(cell);
    if (t.empty()) throw NonNumericCell("empty cell on line " + std::to_string(line_no));
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw NonNumericCell("cell '" + t + "' on line " + std::to_string(line_no) +
                             " is not a number");
    if (!std::isfinite(v))
        throw NonNumericCell("cell on line " + std::to_string(line_no) + " is not finite");
    return v;
}

}  // namespace

RawSeries load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw BadHeader("'" + path + "': empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto names = split_cells(line);
    std::size_t m = 0;
    while (m < names.size() && trim(names[m]) == "y" + std::to_string(m + 1)) ++m;
    std::size_t r = 0;
    while (m + r < names.size() && trim(names[m + r]) == "u" + std::to_string(r + 1)) ++r;
    if (m == 0 || r == 0 || m + r != names.size())
        throw BadHeader("'" + path + "': header must name channels y1..ym,u1..ur (line 1)");

    std::vector<double> ydata, udata;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_cells(line);
        if (cells.size() != m + r)
            throw RaggedRow("line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(m + r));
        for (std::size_t j = 0; j < m; ++j) ydata.push_back(parse_cell(cells[j], line_no));
        for (std::size_t j = 0; j < r; ++j) udata.push_back(parse_cell(cells[m + j], line_no));
        ++rows;
    }

    RawSeries s;
    s.outputs = Mat(rows, m, std::move(ydata));
    s.inputs = Mat(rows, r, std::move(udata));
    for (std::size_t j = 0; j < m; ++j) s.output_names.push_back("y" + std::to_string(j + 1));
    for (std::size_t j = 0; j < r; ++j) s.input_names.push_back("u" + std::to_string(j + 1));
    return s;
}

void save_csv(const RawSeries& series, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot write '" + path + "'");

    const std::size_t m = series.m(), r = series.r();
    for (std::size_t j = 0; j < m; ++j) std::fprintf(f, "%sy%zu", j ? "," : "", j + 1);
    for (std::size_t j = 0; j < r; ++j) std::fprintf(f, ",u%zu", j + 1);
    std::fputc('\n', f);

    for (std::size_t k = 0; k < series.rows(); ++k) {
        for (std::size_t j = 0; j < m; ++j)
            std::fprintf(f, "%s%.17g", j ? "," : "", series.outputs(k, j));
        for (std::size_t j = 0; j < r; ++j) std::fprintf(f, ",%.17g", series.inputs(k, j));
        std::fputc('\n', f);
    }
    std::fclose(f);
}

Mat load_matrix_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<double> data;
    std::size_t cols = 0, rows = 0, line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split_cells(line);
        if (cols == 0) cols = cells.size();
        if (cells.size() != cols)
            throw RaggedRow("line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " + std::to_string(cols));
        for (const auto& c : cells) data.push_back(parse_cell(c, line_no));
        ++rows;
    }
    if (rows == 0) throw DataError("'" + path + "': no rows");
    return Mat(rows, cols, std::move(data));
}

Normalizer Normalizer::fit(const RawSeries& series, std::size_t fit_rows) {
    if (fit_rows == 0 || fit_rows > series.rows())
        throw ShapeMismatch("Normalizer::fit: fit range empty or out of bounds");

    Normalizer nz;
    nz.m = series.m();
    nz.r = series.r();
    const std::size_t channels = nz.m + nz.r;
    nz.mean.assign(channels, 0.0);
    nz.stddev.assign(channels, 1.0);

    auto channel_value = [&](std::size_t k, std::size_t c) {
        return c < nz.m ? series.outputs(k, c) : series.inputs(k, c - nz.m);
    };

    for (std::size_t c = 0; c < channels; ++c) {
        double sum = 0.0;
        for (std::size_t k = 0; k < fit_rows; ++k) sum += channel_value(k, c);
        const double mu = sum / static_cast<double>(fit_rows);
        double sq = 0.0;
        for (std::size_t k = 0; k < fit_rows; ++k) {
            const double d = channel_value(k, c) - mu;
            sq += d * d;
        }
        // sample standard deviation (count - 1)
        double sigma = fit_rows > 1 ? std::sqrt(sq / static_cast<double>(fit_rows - 1)) : 0.0;
        if (sigma <= 0.0) {
            sigma = 1.0;
            nz.constant_channels.push_back(c);
        }
        nz.mean[c] = mu;
        nz.stddev[c] = sigma;
    }
    return nz;
}

RawSeries Normalizer::apply(const RawSeries& series) const {
    if (series.m() != m || series.r() != r) throw ShapeMismatch("Normalizer::apply: channel mismatch");
    RawSeries out = series;
    for (std::size_t k = 0; k < series.rows(); ++k) {
        for (std::size_t j = 0; j < m; ++j)
            out.outputs(k, j) = (series.outputs(k, j) - mean[j]) / stddev[j];
        for (std::size_t j = 0; j < r; ++j)
            out.inputs(k, j) = (series.inputs(k, j) - mean[m + j]) / stddev[m + j];
    }
    return out;
}

RawSeries Normalizer::invert(const RawSeries& series) const {
    if (series.m() != m || series.r() != r) throw ShapeMismatch("Normalizer::invert: channel mismatch");
    RawSeries out = series;
    for (std::size_t k = 0; k < series.rows(); ++k) {
        for (std::size_t j = 0; j < m; ++j)
            out.outputs(k, j) = series.outputs(k, j) * stddev[j] + mean[j];
        for (std::size_t j = 0; j < r; ++j)
            out.inputs(k, j) = series.inputs(k, j) * stddev[m + j] + mean[m + j];
    }
    return out;
}

Mat Normalizer::invert_outputs(const Mat& outputs) const {
    if (outputs.cols() != m) throw ShapeMismatch("Normalizer::invert_outputs: channel mismatch");
    Mat out = outputs;
    for (std::size_t k = 0; k < outputs.rows(); ++k)
        for (std::size_t j = 0; j < m; ++j) out(k, j) = outputs(k, j) * stddev[j] + mean[j];
    return out;
}

SplitSeries chrono_split(const RawSeries& series, double train_frac, double val_frac,
                         double test_frac, std::size_t min_rows) {
    if (train_frac <= 0.0 || val_frac <= 0.0 || test_frac <= 0.0)
        throw ConfigError("chrono_split: fractions must be positive");
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        throw ConfigError("chrono_split: fractions must sum to 1");

    const std::size_t k = series.rows();
    const auto n_train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(k)));
    const auto n_val = static_cast<std::size_t>(std::floor(val_frac * static_cast<double>(k)));
    if (n_train + n_val > k) throw SegmentTooShort("chrono_split: series too short");
    const std::size_t n_test = k - n_train - n_val;

    if (n_train < min_rows || n_val < min_rows || n_test < min_rows)
        throw SegmentTooShort("chrono_split: segment sizes " + std::to_string(n_train) + "/" +
                              std::to_string(n_val) + "/" + std::to_string(n_test) +
                              " fall below the required " + std::to_string(min_rows) + " rows");

    SplitSeries s;
    s.train = series.slice(0, n_train);
    s.val = series.slice(n_train, n_val);
    s.test = series.slice(n_train + n_val, n_test);
    return s;
}

RawSeries synth_two_tank(std::size_t steps, const TwoTankInput& input, double noise_std,
                         std::uint64_t seed, const TwoTankParams& p) {
    if (steps == 0) throw ConfigError("synth_two_tank: steps must be positive");
    if (noise_std < 0.0) throw ConfigError("synth_two_tank: noise_std must be non-negative");

    Rng input_rng(seed, 3);
    Rng noise_rng(seed, 4);

    // input sequence
    Vec u(steps, 0.0);
    if (input.kind == TwoTankInput::Kind::piecewise_constant) {
        const std::size_t hold = std::max<std::size_t>(1, input.hold);
        double level = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            if (k % hold == 0) level = input_rng.uniform(input.level_min, input.level_max);
            u[k] = level;
        }
    } else {
        std::vector<double> phase(input.sines);
        for (auto& ph : phase) ph = input_rng.uniform(0.0, 6.283185307179586);
        for (std::size_t k = 0; k < steps; ++k) {
            double v = input.offset;
            for (std::size_t j = 0; j < input.sines; ++j) {
                const double f = input.sines > 1
                                     ? input.freq_min + (input.freq_max - input.freq_min) *
                                                            static_cast<double>(j) /
                                                            static_cast<double>(input.sines - 1)
                                     : input.freq_min;
                v += input.amplitude / static_cast<double>(input.sines) *
                     std::sin(6.283185307179586 * f * static_cast<double>(k) + phase[j]);
            }
            u[k] = std::max(0.0, v);
        }
    }

    RawSeries s;
    s.outputs = Mat(steps, 1);
    s.inputs = Mat(steps, 1);
    s.sample_time = p.sample_time;
    s.output_names = {"y1"};
    s.input_names = {"u1"};

    double h1 = p.h1_init, h2 = p.h2_init;
    for (std::size_t k = 0; k < steps; ++k) {
        s.outputs(k, 0) = h2 + (noise_std > 0.0 ? noise_rng.normal(0.0, noise_std) : 0.0);
        s.inputs(k, 0) = u[k];

        const double q1 = p.a1 * std::sqrt(std::max(0.0, h1));
        const double q2 = p.a2 * std::sqrt(std::max(0.0, h2));
        h1 = std::max(0.0, h1 + p.sample_time * (-q1 + p.b * u[k]));
        h2 = std::max(0.0, h2 + p.sample_time * (q1 - q2));
    }
    return s;
}

}  // namespace lpvss
