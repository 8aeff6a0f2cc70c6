#include <cmath>

#include "doctest.h"
#include "torsionlab/special_zeta.hpp"

using namespace torsionlab;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kLog2 = 0.69314718055994530941723212145817657;

// Independent oracle: plain partial sum with integral + midpoint tail, no
// Bernoulli machinery shared with the implementation.
double zeta_oracle_1e6(double s) {
    double sum = 0.0;
    for (int k = 1000000; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
    const double n = 1e6;
    return sum + std::pow(n, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(n, -s);
}

double shifted_zeta_series(double s) {
    double sum = 0.0;
    for (int k = 2000000; k >= 1; --k) sum += std::pow(k - 0.5, -s);
    // Tail beyond N: integral approximation of (k - 1/2)^{-s}.
    const double n = 2e6;
    return sum + std::pow(n, 1.0 - s) / (s - 1.0);
}

}  // namespace

TEST_CASE("riemann_zeta reproduces classical values") {
    CHECK(std::abs(zeta::riemann_zeta(2.0) - kPi * kPi / 6.0) < 1e-12);
    CHECK(std::abs(zeta::riemann_zeta(4.0) - std::pow(kPi, 4) / 90.0) < 1e-12);
    CHECK(std::abs(zeta::riemann_zeta(10.0) - 1.0009945751278180853) < 1e-12);
}

TEST_CASE("riemann_zeta matches the Euler-Maclaurin oracle") {
    for (double s : {1.5, 2.0, 3.0, 5.0, 7.5}) {
        CHECK(std::abs(zeta::riemann_zeta(s) - zeta_oracle_1e6(s)) < 1e-12);
    }
}

TEST_CASE("riemann_zeta rejects s <= 1") {
    CHECK_THROWS_AS(zeta::riemann_zeta(1.0), std::domain_error);
    CHECK_THROWS_AS(zeta::riemann_zeta(0.3), std::domain_error);
}

TEST_CASE("shifted zeta functional identity and direct series") {
    // (2^s - 1) zeta(s) identity at sampled s.
    for (double s : {1.5, 2.0, 3.0, 5.0}) {
        const double lhs = zeta::shifted_zeta(s);
        const double rhs = (std::pow(2.0, s) - 1.0) * zeta::riemann_zeta(s);
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
    CHECK(std::abs(zeta::shifted_zeta(2.0) - kPi * kPi / 2.0) < 1e-10);
    CHECK(std::abs(zeta::shifted_zeta(2.0) - shifted_zeta_series(2.0)) < 1e-8);
    CHECK(std::abs(zeta::shifted_zeta(4.0) - 15.0 * zeta::riemann_zeta(4.0)) < 1e-10);
}

TEST_CASE("stored anchors at s = 0") {
    const auto z = zeta::riemann_zeta_at_0();
    CHECK(z.value_at_0 == -0.5);
    CHECK(std::abs(z.deriv_at_0 - (-0.9189385332046727)) < 1e-15);
    CHECK(std::abs(z.deriv_at_0 + 0.5 * (std::log(2.0) + std::log(kPi))) < 1e-15);
    CHECK(z.error_bound == 0.0);

    const auto zt = zeta::shifted_zeta_at_0();
    CHECK(zt.value_at_0 == 0.0);
    CHECK(std::abs(zt.deriv_at_0 - (-0.34657359027997264)) < 1e-15);
    CHECK(zt.error_bound == 0.0);
}

TEST_CASE("closed-form boundary zetas and their derivatives at 0") {
    CHECK(std::abs(zeta::zeta_dd_closed_at_0().deriv_at_0 - (-4.0 * kLog2)) < 1e-12);
    CHECK(std::abs(zeta::zeta_dn_closed_at_0().deriv_at_0 - (-2.0 * kLog2)) < 1e-12);
    CHECK(zeta::zeta_dn_closed_at_0().value_at_0 == 0.0);
    CHECK(zeta::zeta_dd_closed_at_0().value_at_0 == -1.0);

    // Sample the closed forms where the series converge.
    const double s = 1.0;
    CHECK(std::abs(zeta::zeta_dd_closed(s) -
                   2.0 * std::pow(2.0 / kPi, 2.0) * zeta::riemann_zeta(2.0)) < 1e-13);
    CHECK(std::abs(zeta::zeta_dn_closed(s) -
                   2.0 * std::pow(2.0 / kPi, 2.0) * zeta::shifted_zeta(2.0)) < 1e-13);
}

TEST_CASE("product-rule derivative matches central differences") {
    // A B^{2s} Z(2s) near s = 0, differentiated analytically vs numerically.
    const auto inner = zeta::riemann_zeta_at_0();
    const double a = 2.0, b = 2.0 / kPi;
    const auto analytic = zeta::scaled_zeta_at_0(a, b, inner);
    const double h = 1e-5;
    auto f = [&](double s) {
        // Z(2s) ~ Z(0) + 2s Z'(0) + O(s^2) suffices at |s| = 1e-5: the
        // quadratic remainder cancels in the central difference.
        return a * std::pow(b, 2.0 * s) * (inner.value_at_0 + 2.0 * s * inner.deriv_at_0);
    };
    const double numeric = (f(h) - f(-h)) / (2.0 * h);
    CHECK(std::abs(analytic.deriv_at_0 - numeric) < 1e-7);
}

TEST_CASE("error bounds are nonnegative and small") {
    CHECK(zeta::riemann_zeta_at_0().error_bound >= 0.0);
    CHECK(zeta::zeta_dd_closed_at_0().error_bound >= 0.0);
    CHECK(zeta::zeta_dd_closed_at_0().error_bound <= 1e-12);
}
