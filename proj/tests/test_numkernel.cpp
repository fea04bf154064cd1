#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lpvss/linalg.hpp"
#include "lpvss/rng.hpp"

using namespace lpvss;

namespace {

Mat random_mat(std::size_t n, Rng& rng, double span = 1.0) {
    Mat m(n, n);
    for (std::size_t i = 0; i < m.size(); ++i) m.raw()[i] = rng.uniform(-span, span);
    return m;
}

double identity_residual(const Mat& m, const Mat& minv) {
    Mat p = matmul(m, minv);
    for (std::size_t i = 0; i < p.rows(); ++i) p(i, i) -= 1.0;
    return max_abs(p);
}

// independent oracle for symmetric matrices: cyclic Jacobi rotations
std::vector<double> jacobi_moduli(Mat a) {
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> mod(n);
    for (std::size_t i = 0; i < n; ++i) mod[i] = std::abs(a(i, i));
    std::sort(mod.begin(), mod.end(), std::greater<>());
    return mod;
}

}  // namespace

TEST_CASE("invert: identity stays identity") {
    const Mat inv = invert(Mat::identity(3));
    CHECK(identity_residual(Mat::identity(3), inv) == doctest::Approx(0.0).epsilon(1e-15));
    for (std::size_t i = 0; i < 3; ++i) CHECK(inv(i, i) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("invert: diagonal case") {
    const Mat inv = invert(Mat{{2.0, 0.0}, {0.0, 4.0}});
    CHECK(inv(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(inv(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(inv(0, 1) == 0.0);
    CHECK(inv(1, 0) == 0.0);
}

TEST_CASE("invert: multiply-back residual on random 4x4") {
    Rng rng(7);
    for (int c = 0; c < 25; ++c) {
        const Mat m = random_mat(4, rng);
        const Mat minv = invert(m);
        CHECK(identity_residual(m, minv) < 1e-9);
    }
}

TEST_CASE("invert: double inversion returns the matrix") {
    Rng rng(8);
    for (int c = 0; c < 10; ++c) {
        Mat m = random_mat(5, rng);
        for (std::size_t i = 0; i < 5; ++i) m(i, i) += 2.0;  // keep it well conditioned
        const Mat round = invert(invert(m));
        CHECK(max_abs(round - m) < 1e-8);
    }
}

TEST_CASE("invert: singular input raises SingularMatrix") {
    CHECK_THROWS_AS(invert(Mat{{1.0, 1.0}, {1.0, 1.0}}), SingularMatrix);
    CHECK_THROWS_AS(invert(Mat(3, 3)), SingularMatrix);
    CHECK_THROWS_AS(invert(Mat{{1.0, 2.0, 3.0}}), ShapeMismatch);
}

TEST_CASE("spectral_radius: diagonal eigenvalues") {
    const SpectralReport r = spectral_radius(Mat{{0.3, 0.0}, {0.0, -0.8}});
    CHECK(r.spectral_radius == doctest::Approx(0.8).epsilon(1e-12));
    REQUIRE(r.eigenvalue_moduli.size() == 2);
    CHECK(r.eigenvalue_moduli[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r.eigenvalue_moduli[1] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("spectral_radius: complex pair from the rotation block") {
    // characteristic polynomial lambda^2 + 0.25 = 0 by hand
    const SpectralReport r = spectral_radius(Mat{{0.0, 0.5}, {-0.5, 0.0}});
    CHECK(r.spectral_radius == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.eigenvalue_moduli[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("spectral_radius: identity") {
    const SpectralReport r = spectral_radius(Mat::identity(2));
    CHECK(r.spectral_radius == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral_radius: 1x1") {
    CHECK(spectral_radius(Mat{{-2.5}}).spectral_radius == doctest::Approx(2.5));
}

TEST_CASE("spectral_radius: frozen general references") {
    // reference moduli computed with an independent eigensolver
    const Mat m1{{0.2, -0.5, 0.1, 0.7},
                 {0.3, 0.4, -0.2, 0.1},
                 {-0.6, 0.2, 0.5, -0.3},
                 {0.1, 0.8, -0.4, 0.2}};
    const std::vector<double> ref1{1.029120348968053, 0.551808341505464, 0.551808341505464,
                                   0.282423338500084};
    const SpectralReport r1 = spectral_radius(m1);
    REQUIRE(r1.eigenvalue_moduli.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(r1.eigenvalue_moduli[i] == doctest::Approx(ref1[i]).epsilon(1e-9));

    const Mat m2{{1, 2, 0, -1, 3}, {0, -2, 1, 4, 1}, {2, 0, 3, 1, -2}, {1, 1, -1, 0, 2},
                 {3, -2, 1, 1, 0}};
    const std::vector<double> ref2{4.080470730623813, 3.095376572332745, 3.095376572332745,
                                   2.022978963032115, 2.022978963032115};
    const SpectralReport r2 = spectral_radius(m2);
    REQUIRE(r2.eigenvalue_moduli.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(r2.eigenvalue_moduli[i] == doctest::Approx(ref2[i]).epsilon(1e-9));
}

TEST_CASE("spectral_radius: triangular matrices expose their diagonal") {
    Rng rng(11);
    for (int c = 0; c < 20; ++c) {
        const std::size_t n = 2 + rng.index(5);
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) m(i, j) = rng.uniform(-2.0, 2.0);
        double expect = 0.0;
        for (std::size_t i = 0; i < n; ++i) expect = std::max(expect, std::abs(m(i, i)));
        CHECK(spectral_radius(m).spectral_radius == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("spectral_radius: symmetric matrices against the Jacobi oracle") {
    Rng rng(12);
    for (int c = 0; c < 30; ++c) {
        const std::size_t n = 3 + rng.index(4);
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);
        const std::vector<double> ref = jacobi_moduli(m);
        const SpectralReport r = spectral_radius(m);
        REQUIRE(r.eigenvalue_moduli.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i)
            CHECK(r.eigenvalue_moduli[i] == doctest::Approx(ref[i]).epsilon(1e-9));
    }
}

TEST_CASE("spectral_radius scales linearly with |c|") {
    Rng rng(13);
    for (int c = 0; c < 20; ++c) {
        const std::size_t n = 2 + rng.index(5);
        const Mat m = random_mat(n, rng);
        const double factor = rng.uniform(-3.0, 3.0);
        const double base = spectral_radius(m).spectral_radius;
        const double scaled = spectral_radius(m * factor).spectral_radius;
        CHECK(std::abs(scaled - std::abs(factor) * base) <= 1e-9 * (1.0 + std::abs(factor) * base));
    }
}

TEST_CASE("spectral_radius is transpose invariant") {
    Rng rng(14);
    for (int c = 0; c < 20; ++c) {
        const std::size_t n = 2 + rng.index(5);
        const Mat m = random_mat(n, rng);
        const double a = spectral_radius(m).spectral_radius;
        const double b = spectral_radius(m.transposed()).spectral_radius;
        CHECK(std::abs(a - b) <= 1e-9 * (1.0 + a));
    }
}

TEST_CASE("spectral_radius: sweep cap raises NoConvergence with partial moduli") {
    Rng rng(15);
    const Mat m = random_mat(6, rng);
    CHECK_THROWS_AS(spectral_radius(m, 1), NoConvergence);
    try {
        spectral_radius(m, 1);
    } catch (const NoConvergence& e) {
        CHECK(e.partial_moduli.size() < 6);
    }
}

TEST_CASE("spectral_radius: dimension limit enforced") {
    CHECK_THROWS_AS(spectral_radius(Mat(65, 65)), UsageError);
}
