#include <cmath>

#include "doctest.h"
#include "torsionlab/heat_kernel.hpp"

using namespace torsionlab;
using namespace torsionlab::heat;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kLog2 = 0.69314718055994530941723212145817657;

// Independent image-series oracle with a fixed 50-image budget, written from
// the theta identities directly.
double image_oracle(double half_length, const ScalarBCPair& bc, double t) {
    const double len = 2.0 * half_length;
    const double pref = len / std::sqrt(kPi * t);
    double c0 = 0.0;
    if (bc == kDD) c0 = -0.5;
    if (bc == kNN) c0 = 0.5;
    double sum = pref + c0;
    for (int j = 1; j <= 50; ++j) {
        double sign = 1.0;
        if (bc == kDN || bc == kND) sign = (j % 2 == 1) ? -1.0 : 1.0;
        sum += sign * 2.0 * pref * std::exp(-4.0 * j * j * len * len / t);
    }
    return sum;
}

}  // namespace

TEST_CASE("bc pair serialization round-trips") {
    for (const auto& bc : {kDD, kDN, kND, kNN}) {
        CHECK(bc_pair_from_string(to_string(bc)) == bc);
    }
    CHECK_THROWS_AS(bc_pair_from_string("dx"), std::invalid_argument);
}

TEST_CASE("interval spectra agree with the closed forms") {
    const IntervalSpec unit{1.0};
    CHECK(interval_spectrum(unit, kDD).at(0).value == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-15));
    CHECK(interval_spectrum(unit, kDN).at(0).value == doctest::Approx(kPi * kPi / 16.0).epsilon(1e-15));
    CHECK(interval_spectrum(unit, kNN).at(0).value == 0.0);
    CHECK(interval_spectrum(unit, kNN).at(0).multiplicity == 1);
    // Nondecreasing and positive multiplicities.
    const auto s = interval_spectrum(IntervalSpec{0.7}, kND);
    for (std::size_t k = 0; k + 1 < 20; ++k) {
        CHECK(s.at(k).value <= s.at(k + 1).value);
        CHECK(s.at(k).multiplicity >= 1);
    }
}

TEST_CASE("spectrum tail bound dominates one extra block of terms") {
    const auto s = interval_spectrum(IntervalSpec{1.0}, kDD);
    for (double t : {0.5, 1.0, 3.0}) {
        for (std::size_t cutoff : {std::size_t(3), std::size_t(8)}) {
            double omitted = 0.0;
            for (std::size_t k = cutoff; k < cutoff + 40; ++k)
                omitted += s.at(k).multiplicity * std::exp(-0.25 * t * s.at(k).value);
            CHECK(s.tail_bound(t, cutoff) >= omitted);
        }
    }
}

TEST_CASE("eigen and image series agree through the crossover window") {
    for (double l : {0.5, 1.0, 2.0}) {
        const IntervalSpec spec{l};
        for (const auto& bc : {kDD, kDN, kND, kNN}) {
            for (double t = 0.5; t <= 2.0; t += 0.125) {
                const double a = heat_trace_eigen_series(spec, bc, t);
                const double b = heat_trace_image_series(spec, bc, t);
                CHECK(std::abs(a - b) < 2e-12);
            }
        }
    }
}

TEST_CASE("McKean-Singer: NN trace minus DD trace is 1") {
    for (double l : {0.5, 1.0, 2.0}) {
        const IntervalSpec spec{l};
        for (double t : {0.1, 1.0, 10.0}) {
            const double diff = heat_trace(spec, kNN, t) - heat_trace(spec, kDD, t);
            CHECK(std::abs(diff - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("trace limits: spectral gap and zero mode") {
    const IntervalSpec unit{1.0};
    CHECK(heat_trace(unit, kDN, 400.0) < 1e-12);
    CHECK(std::abs(heat_trace(unit, kNN, 400.0) - 1.0) < 1e-12);
    // Small-t leading behavior 2l / sqrt(pi t): exact to 1% for the mixed
    // conditions; DD and NN carry the constant coefficient -+1/2 as the next
    // term, which is 4.4% of the leading one at t = 0.01.
    const double t = 0.01;
    const double lead = 2.0 / std::sqrt(kPi * t);
    CHECK(std::abs(heat_trace(unit, kDN, t) - lead) / lead < 0.01);
    for (const auto& bc : {kDD, kDN, kNN}) {
        CHECK(std::abs(heat_trace(unit, bc, t) - lead) / lead < 0.05);
        CHECK(std::abs(heat_trace(unit, bc, t) - image_oracle(1.0, bc, t)) < 1e-14);
    }
    CHECK_THROWS_AS(heat_trace(unit, kDD, 0.0), std::domain_error);
    CHECK_THROWS_AS(heat_trace(unit, kDD, -1.0), std::domain_error);
}

TEST_CASE("trace is strictly decreasing in t for DD and DN") {
    const IntervalSpec spec{1.3};
    for (const auto& bc : {kDD, kDN}) {
        double prev = heat_trace(spec, bc, 0.05);
        for (double t = 0.1; t < 6.0; t += 0.15) {
            const double cur = heat_trace(spec, bc, t);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("analytic t-derivative matches central differences") {
    for (double l : {0.5, 1.0, 2.0}) {
        const IntervalSpec spec{l};
        for (const auto& bc : {kDD, kDN, kND, kNN}) {
            for (double t : {0.5, 1.0, 5.0}) {
                const double h = 1e-5 * t;
                const double numeric =
                    (heat_trace(spec, bc, t + h) - heat_trace(spec, bc, t - h)) / (2.0 * h);
                const double analytic = heat_trace_t_dt(spec, bc, t) / t;
                CHECK(std::abs(numeric - analytic) < 1e-7);
            }
        }
    }
}

TEST_CASE("corrected integrands vanish at both ends") {
    // Small-t limits via the image-series expansion: the t^{-1/2} parts are
    // annihilated and the DD constant cancels against the counterterm.
    for (double t : {1e-4, 1e-3, 1e-2}) {
        CHECK(std::abs(corrected_integrand(kDD, t)) < 0.5 * t);
        CHECK(std::abs(corrected_integrand(kDN, t)) < 1e-10);
    }
    // DN integrand is negative for small t: the leading image carries a
    // negative sign.  Below t ~ 0.02 the images underflow to exactly zero.
    CHECK(corrected_integrand(kDN, 0.1) < 0.0);
    CHECK(corrected_integrand(kDN, 0.5) < 0.0);
    // Large t: the DD integrand reduces to the counterterm profile, which
    // underflows to zero far out.
    CHECK(corrected_integrand(kDD, 1e6) == 0.0);
    CHECK_THROWS_AS(corrected_integrand(kNN, 1.0), std::invalid_argument);
}

TEST_CASE("corrected-integrand quadrature reproduces the boundary-zeta derivatives") {
    const auto [dd, dn] = lemma22_by_quadrature();
    CHECK(std::abs(dd - (-4.0 * kLog2)) < 1e-6);
    CHECK(std::abs(dn - (-2.0 * kLog2)) < 1e-6);
    CHECK(dd == doctest::Approx(-2.772588722239781).epsilon(1e-6));
    CHECK(dn == doctest::Approx(-1.3862943611198906).epsilon(1e-6));
}

TEST_CASE("halving the quadrature tolerance moves the integrals by < 1e-7") {
    // Re-run the DN integral at two tolerances through the public machinery.
    std::function<double(double)> g = [](double t) { return corrected_integrand(kDN, t); };
    quad::QuadratureOptions loose, tight;
    loose.panel_tolerance = 1e-9;
    tight.panel_tolerance = 5e-10;
    const double a = quad::integrate_dt_over_t(g, 1e-8, 1.0, loose) +
                     quad::integrate_dt_over_t(g, 1.0, 200.0, loose);
    const double b = quad::integrate_dt_over_t(g, 1e-8, 1.0, tight) +
                     quad::integrate_dt_over_t(g, 1.0, 200.0, tight);
    CHECK(std::abs(a - b) < 1e-7);
}

TEST_CASE("zeta_from_trace matches the closed forms, single-component count") {
    const IntervalSpec unit{1.0};
    const auto dn = zeta_from_trace(unit, kDN);
    CHECK(std::abs(dn.value_at_0 - 0.0) < 1e-9);
    CHECK(std::abs(dn.deriv_at_0 - (-kLog2)) < 1e-9);

    const auto dd = zeta_from_trace(unit, kDD);
    CHECK(std::abs(dd.value_at_0 - (-0.5)) < 1e-9);
    CHECK(std::abs(dd.deriv_at_0 - (-2.0 * kLog2)) < 1e-9);

    // Difference of the derivatives is -log 2 regardless of the component
    // count convention.
    CHECK(std::abs(dd.deriv_at_0 - dn.deriv_at_0 - (-kLog2)) < 1e-9);

    CHECK(dd.error_bound >= 0.0);
    CHECK(dd.error_bound < 1e-6);
}

TEST_CASE("zeta_from_trace heat-coefficient identity for NN") {
    // NN at l = 1: constant heat coefficient +1/2, one zero mode, so
    // zeta(0) = -1/2; the positive spectrum equals the DD family.
    const IntervalSpec unit{1.0};
    const auto nn = zeta_from_trace(unit, kNN);
    const auto dd = zeta_from_trace(unit, kDD);
    CHECK(std::abs(nn.value_at_0 - (-0.5)) < 1e-9);
    CHECK(std::abs(nn.deriv_at_0 - dd.deriv_at_0) < 1e-9);
}

TEST_CASE("zeta_from_trace scales as the closed form in the length") {
    // DD on [-l, l]: zeta'(0) = -log(4l); DN: -log 2 independent of l.
    for (double l : {0.5, 2.0}) {
        const auto dd = zeta_from_trace(IntervalSpec{l}, kDD);
        CHECK(std::abs(dd.deriv_at_0 - (-std::log(4.0 * l))) < 1e-9);
        const auto dn = zeta_from_trace(IntervalSpec{l}, kDN);
        CHECK(std::abs(dn.deriv_at_0 - (-kLog2)) < 1e-9);
    }
}
