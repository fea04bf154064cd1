#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpvss/checks.hpp"
#include "lpvss/linalg.hpp"
#include "lpvss/rng.hpp"
#include "lpvss/schur.hpp"

using namespace lpvss;

namespace {

SchurFactors draw_factors(std::size_t n, double gamma, Rng& rng) {
    SchurFactors f;
    f.W = Mat(2 * n, 2 * n);
    for (std::size_t i = 0; i < f.W.size(); ++i) f.W.raw()[i] = rng.uniform(-3.0, 3.0);
    f.V = Mat(n, n);
    for (std::size_t i = 0; i < f.V.size(); ++i) f.V.raw()[i] = rng.uniform(-3.0, 3.0);
    f.eps_tilde = rng.uniform(-6.0, 2.0);
    f.gamma = gamma;
    return f;
}

}  // namespace

TEST_CASE("assemble_S: identity W gives 2I") {
    const Mat s = assemble_S(Mat::identity(2), 0.0);
    CHECK(s(0, 0) == doctest::Approx(2.0));
    CHECK(s(1, 1) == doctest::Approx(2.0));
    CHECK(s(0, 1) == 0.0);
}

TEST_CASE("assemble_S: zero W gives I") {
    const Mat s = assemble_S(Mat(2, 2), 0.0);
    CHECK(s(0, 0) == doctest::Approx(1.0));
    CHECK(s(1, 1) == doctest::Approx(1.0));
    CHECK(s(0, 1) == 0.0);
}

TEST_CASE("assemble_S: upper triangular fixture") {
    const Mat s = assemble_S(Mat{{1.0, 1.0}, {0.0, 1.0}}, 0.0);
    CHECK(s(0, 0) == doctest::Approx(2.0));
    CHECK(s(0, 1) == doctest::Approx(1.0));
    CHECK(s(1, 0) == doctest::Approx(1.0));
    CHECK(s(1, 1) == doctest::Approx(3.0));
}

TEST_CASE("assemble_S: eps_tilde clamping is reported") {
    bool clamped = false;
    const Mat s = assemble_S(Mat(2, 2), 40.0, &clamped);
    CHECK(clamped);
    CHECK(s(0, 0) == doctest::Approx(std::exp(30.0)));
    assemble_S(Mat(2, 2), 3.0, &clamped);
    CHECK_FALSE(clamped);
}

TEST_CASE("build_transition: zero off-diagonal block gives A = 0") {
    SchurFactors f{Mat::identity(2), Mat(1, 1), 0.0, 1.0};
    const Mat a = build_transition(f);
    CHECK(a.rows() == 1);
    CHECK(a(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("build_transition: scalar fixture evaluates to 0.2") {
    SchurFactors f{Mat{{1.0, 1.0}, {0.0, 1.0}}, Mat(1, 1), 0.0, 1.0};
    const Mat a = build_transition(f);
    CHECK(a(0, 0) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("build_transition: random n=3 factors stay inside the 0.9 disk") {
    Rng rng(21);
    for (int c = 0; c < 50; ++c) {
        SchurFactors f = draw_factors(3, 0.9, rng);
        const Mat a = build_transition(f);
        CHECK(spectral_radius(a).spectral_radius < 0.9);
    }
}

TEST_CASE("build_transition_backward: zero upstream gives zero gradients") {
    Rng rng(22);
    SchurFactors f = draw_factors(2, 0.95, rng);
    const SchurGradients g = build_transition_backward(f, Mat(2, 2));
    CHECK(max_abs(g.dW) == 0.0);
    CHECK(max_abs(g.dV) == 0.0);
    CHECK(g.dEpsTilde == 0.0);
}

TEST_CASE("build_transition_backward: scalar case against hand derivatives") {
    // n = 1, W = [[1,1],[0,1]], V = 0, gamma = 1, eps_tilde = 0, dA = 1:
    // A = S12 / (S11 + S22) = 1/5 and the partials follow by scalar calculus
    SchurFactors f{Mat{{1.0, 1.0}, {0.0, 1.0}}, Mat(1, 1), 0.0, 1.0};
    const SchurGradients g = build_transition_backward(f, Mat{{1.0}});
    CHECK(g.dW(0, 0) == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(g.dW(0, 1) == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(g.dW(1, 0) == doctest::Approx(0.20).epsilon(1e-12));
    CHECK(g.dW(1, 1) == doctest::Approx(-0.08).epsilon(1e-12));
    CHECK(g.dV(0, 0) == doctest::Approx(0.0));
    CHECK(g.dEpsTilde == doctest::Approx(-0.08).epsilon(1e-12));
}

TEST_CASE("build_transition_backward: finite differences over random factors") {
    GradCheckResult r = check_schur_backward(1, 1.0, 31, 20);
    CHECK(r.max_rel_err < 1e-6);
    r = check_schur_backward(2, 0.9, 32, 40);
    CHECK(r.max_rel_err < 1e-5);
    r = check_schur_backward(3, 0.7, 33, 40);
    CHECK(r.max_rel_err < 1e-5);
}

TEST_CASE("stability property: sampled draws never violate the disk") {
    Rng rng(23);
    int draws = 0;
    for (std::size_t n = 1; n <= 6; ++n) {
        for (double gamma : {0.5, 0.9, 1.0}) {
            for (int c = 0; c < 120; ++c) {
                SchurFactors f = draw_factors(n, gamma, rng);
                Mat a;
                CHECK_NOTHROW(a = build_transition(f));  // bracket always nonsingular
                CHECK(spectral_radius(a).spectral_radius < gamma);
                ++draws;
            }
        }
    }
    CHECK(draws == 6 * 3 * 120);
}

TEST_CASE("monotone gamma dependence at fixed factors") {
    Rng rng(24);
    SchurFactors f = draw_factors(3, 1.0, rng);
    for (double gamma : {0.3, 0.5, 0.7, 0.9, 1.0}) {
        f.gamma = gamma;
        CHECK(spectral_radius(build_transition(f)).spectral_radius < gamma);
    }
}

TEST_CASE("fit_to_target: zero target is reachable") {
    const FitResult r = fit_to_target(Mat(2, 2), 0.99, 5);
    CHECK(r.residual < 1e-6);
    CHECK_FALSE(r.target_unstable);
}

TEST_CASE("fit_to_target: round trip on self-generated targets") {
    Rng rng(25);
    for (int c = 0; c < 3; ++c) {
        SchurFactors truth = draw_factors(2, 0.9, rng);
        truth.eps_tilde = rng.uniform(-1.0, 1.0);
        const Mat target = build_transition(truth);
        const FitResult r = fit_to_target(target, 0.9, 100 + c);
        CHECK(r.residual / frobenius_norm(target) < 1e-3);
    }
}

TEST_CASE("fit_to_target: unreachable scalar target keeps a floor residual") {
    const FitResult r = fit_to_target(Mat{{1.5}}, 0.99, 3);
    CHECK(r.target_unstable);
    CHECK(r.residual >= 0.51);  // |1.5 - 0.99| lower-bounds the floor
}
