#pragma once

#include <cstddef>
#include <vector>

#include "lpvss/mat.hpp"

namespace lpvss {

// Eigenvalue moduli of one square matrix, sorted descending.
// spectral_radius == eigenvalue_moduli.front(); iterations_used counts QR
// sweeps spent after Hessenberg reduction.
struct SpectralReport {
    std::vector<double> eigenvalue_moduli;
    double spectral_radius = 0.0;
    std::size_t iterations_used = 0;
};

// LU inversion with scaled partial pivoting. Throws SingularMatrix when a
// pivot falls below 1e-12 relative to the max magnitude of its source row.
Mat invert(const Mat& m);

// All eigenvalue moduli via Householder-Hessenberg reduction followed by
// Francis double-shift QR iteration. Dimension is capped at 64 (desk scale).
// max_sweeps == 0 selects the default cap of 100 * dimension; exceeding the
// cap throws NoConvergence carrying the moduli deflated so far.
SpectralReport spectral_radius(const Mat& m, std::size_t max_sweeps = 0);

}  // namespace lpvss
