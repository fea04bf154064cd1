#include "lpvss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lpvss {

namespace {

constexpr double kPivotTol = 1e-12;

struct LuFactors {
    Mat lu;                        // combined L (unit diagonal) and U
    std::vector<std::size_t> perm;  // row permutation
};

LuFactors lu_decompose(const Mat& m) {
    const std::size_t n = m.rows();
    LuFactors f{m, std::vector<std::size_t>(n)};
    Mat& a = f.lu;

    // scale of each row of the original matrix, for the relative pivot test
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s = std::max(s, std::abs(a(i, j)));
        scale[i] = s;
    }

    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        // pick the row with the largest scaled pivot
        std::size_t piv = k;
        double best = -1.0;
        for (std::size_t i = k; i < n; ++i) {
            const double s = scale[f.perm[i]];
            const double cand = s > 0.0 ? std::abs(a(i, k)) / s : 0.0;
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        const double pivot = a(k, k);
        if (std::abs(pivot) < kPivotTol * std::max(scale[f.perm[k]], std::numeric_limits<double>::min()))
            throw SingularMatrix("invert: pivot below tolerance at column " + std::to_string(k));

        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = a(i, k) / pivot;
            a(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
        }
    }
    return f;
}

void lu_solve(const LuFactors& f, const double* b, double* x) {
    const std::size_t n = f.lu.rows();
    // forward substitution on the permuted right-hand side
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[f.perm[i]];
        for (std::size_t j = 0; j < i; ++j) acc -= f.lu(i, j) * x[j];
        x[i] = acc;
    }
    // back substitution
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= f.lu(ii, j) * x[j];
        x[ii] = acc / f.lu(ii, ii);
    }
}

// Householder similarity reduction to upper Hessenberg form, in place.
void to_hessenberg(Mat& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<double> v(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm2 += a(i, k) * a(i, k);
        const double x0 = a(k + 1, k);
        const double norm = std::sqrt(norm2);
        if (norm == 0.0) continue;
        const double alpha = x0 >= 0.0 ? -norm : norm;

        // v = x - alpha e1
        double beta = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k);
            if (i == k + 1) v[i] -= alpha;
            beta += v[i] * v[i];
        }
        if (beta == 0.0) continue;
        const double inv_beta2 = 2.0 / beta;

        // A <- H A, H = I - 2 v v^T / (v^T v), acting on rows k+1..n-1
        for (std::size_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) dot += v[i] * a(i, j);
            dot *= inv_beta2;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= dot * v[i];
        }
        // A <- A H, acting on columns k+1..n-1
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
            dot *= inv_beta2;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= dot * v[j];
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

inline double sign_with(double magnitude, double sign_of) {
    return sign_of >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Francis double-shift QR on an upper Hessenberg matrix. Appends one modulus
// per eigenvalue to `moduli`; returns the number of sweeps used. Throws
// NoConvergence (with the moduli found so far) once the sweep cap is hit.
std::size_t hessenberg_qr_moduli(Mat& a, std::vector<double>& moduli, std::size_t max_sweeps) {
    const std::size_t n = a.rows();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) anorm += std::abs(a(i, j));

    std::size_t sweeps = 0;
    double shift_sum = 0.0;  // accumulated exceptional shifts
    long nn = static_cast<long>(n) - 1;
    long stalled = 0;

    while (nn >= 0) {
        // find the active block [l, nn]
        long l = nn;
        for (; l >= 1; --l) {
            double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
            if (s == 0.0) s = anorm;
            if (std::abs(a(l, l - 1)) <= eps * s) {
                a(l, l - 1) = 0.0;
                break;
            }
        }

        double x = a(nn, nn);
        if (l == nn) {
            moduli.push_back(std::abs(x + shift_sum));
            --nn;
            stalled = 0;
            continue;
        }
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
            double p = 0.5 * (y - x);
            double q = p * p + w;
            double z = std::sqrt(std::abs(q));
            x += shift_sum;
            if (q >= 0.0) {
                z = p + sign_with(z, p);
                moduli.push_back(std::abs(x + z));
                moduli.push_back(std::abs(z != 0.0 ? x - w / z : x + z));
            } else {
                // complex conjugate pair (x + p) +- i z
                const double re = x + p;
                const double modulus = std::sqrt(re * re + z * z);
                moduli.push_back(modulus);
                moduli.push_back(modulus);
            }
            nn -= 2;
            stalled = 0;
            continue;
        }

        if (sweeps >= max_sweeps)
            throw NoConvergence("spectral_radius: sweep cap of " + std::to_string(max_sweeps) + " reached", moduli);
        ++sweeps;
        ++stalled;

        if (stalled % 10 == 0) {
            // exceptional shift to break limit cycles
            shift_sum += x;
            for (long i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            x = y = 0.75 * s;
            w = -0.4375 * s * s;
        }

        // find two consecutive small subdiagonals
        long m = nn - 2;
        double p = 0.0, q = 0.0, r = 0.0;
        for (; m >= l; --m) {
            const double z = a(m, m);
            const double rr = x - z;
            const double ss = y - z;
            p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - rr - ss;
            r = a(m + 2, m + 1);
            const double scl = std::abs(p) + std::abs(q) + std::abs(r);
            p /= scl;
            q /= scl;
            r /= scl;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
        }
        for (long i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
        }

        // one implicit double-shift sweep on rows l..nn
        for (long k = m; k <= nn - 1; ++k) {
            if (k != m) {
                p = a(k, k - 1);
                q = a(k + 1, k - 1);
                r = k != nn - 1 ? a(k + 2, k - 1) : 0.0;
                x = std::abs(p) + std::abs(q) + std::abs(r);
                if (x != 0.0) {
                    p /= x;
                    q /= x;
                    r /= x;
                }
            }
            const double s = sign_with(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
                a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            double z = r / s;
            q /= p;
            r /= p;
            for (long j = k; j <= nn; ++j) {
                double pp = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                    pp += r * a(k + 2, j);
                    a(k + 2, j) -= pp * z;
                }
                a(k + 1, j) -= pp * y;
                a(k, j) -= pp * x;
            }
            const long imax = std::min(nn, k + 3);
            for (long i = l; i <= imax; ++i) {
                double pp = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                    pp += z * a(i, k + 2);
                    a(i, k + 2) -= pp * r;
                }
                a(i, k + 1) -= pp * q;
                a(i, k) -= pp;
            }
        }
    }
    return sweeps;
}

}  // namespace

Mat invert(const Mat& m) {
    if (m.rows() != m.cols()) throw ShapeMismatch("invert: matrix is not square");
    const std::size_t n = m.rows();
    const LuFactors f = lu_decompose(m);

    Mat inv(n, n);
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        lu_solve(f, e.data(), col.data());
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    return inv;
}

SpectralReport spectral_radius(const Mat& m, std::size_t max_sweeps) {
    if (m.rows() != m.cols()) throw ShapeMismatch("spectral_radius: matrix is not square");
    const std::size_t n = m.rows();
    if (n == 0) throw ShapeMismatch("spectral_radius: empty matrix");
    if (n > 64) throw UsageError("spectral_radius: dimension above the documented limit of 64");
    if (max_sweeps == 0) max_sweeps = 100 * n;

    SpectralReport report;
    if (n == 1) {
        report.eigenvalue_moduli = {std::abs(m(0, 0))};
        report.spectral_radius = report.eigenvalue_moduli[0];
        return report;
    }

    Mat h = m;
    to_hessenberg(h);
    report.iterations_used = hessenberg_qr_moduli(h, report.eigenvalue_moduli, max_sweeps);
    std::sort(report.eigenvalue_moduli.begin(), report.eigenvalue_moduli.end(), std::greater<>());
    report.spectral_radius = report.eigenvalue_moduli.front();
    return report;
}

}  // namespace lpvss
