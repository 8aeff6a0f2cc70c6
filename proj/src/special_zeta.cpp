#include "torsionlab/special_zeta.hpp"

#include <cmath>

namespace torsionlab::zeta {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kLog2 = 0.69314718055994530941723212145817657;

// Bernoulli numbers B_2, B_4, B_6, B_8 for the Euler-Maclaurin correction.
constexpr double kBernoulli[4] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0};

// Sum of k^(-s) for k = 1..N plus tail: integral term, half endpoint term and
// four Bernoulli corrections.  Error below 1e-13 for s >= 1.5 with N = 1e4.
double euler_maclaurin_zeta(double s, int cutoff) {
    double partial = 0.0;
    // Backward summation keeps the small terms from being swallowed.
    for (int k = cutoff; k >= 1; --k) partial += std::pow(static_cast<double>(k), -s);
    const double n = static_cast<double>(cutoff);
    double tail = std::pow(n, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(n, -s);
    // Derivative factors s (s+1) ... (s+2j-2) / (2j)! paired with N^(-s-2j+1).
    double factor = s;
    double fact = 2.0;  // (2j)!
    for (int j = 1; j <= 4; ++j) {
        tail += kBernoulli[j - 1] * factor / fact * std::pow(n, -s - 2.0 * j + 1.0);
        factor *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    return partial + tail;
}

}  // namespace

double riemann_zeta(double s) {
    if (s <= 1.0) throw std::domain_error("riemann_zeta: requires s > 1");
    // Large s: the direct series converges geometrically; 60 terms suffice.
    if (s >= 8.0) {
        double sum = 0.0;
        for (int k = 60; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
        return sum;
    }
    return euler_maclaurin_zeta(s, 10000);
}

double shifted_zeta(double s) {
    if (s <= 1.0) throw std::domain_error("shifted_zeta: requires s > 1");
    return (std::pow(2.0, s) - 1.0) * riemann_zeta(s);
}

ZetaValue riemann_zeta_at_0() { return {-0.5, -0.5 * std::log(2.0 * kPi), 0.0}; }

ZetaValue shifted_zeta_at_0() { return {0.0, -0.5 * kLog2, 0.0}; }

ZetaValue scaled_zeta_at_0(double factor, double base, const ZetaValue& inner) {
    ZetaValue out;
    out.value_at_0 = factor * inner.value_at_0;
    out.deriv_at_0 = 2.0 * std::log(base) * factor * inner.value_at_0 +
                     2.0 * factor * inner.deriv_at_0;
    out.error_bound = inner.error_bound * (2.0 * std::abs(std::log(base)) + 2.0) *
                      std::abs(factor);
    return out;
}

double zeta_dd_closed(double s) {
    if (2.0 * s <= 1.0) throw std::domain_error("zeta_dd_closed: requires s > 1/2");
    return 2.0 * std::pow(2.0 / kPi, 2.0 * s) * riemann_zeta(2.0 * s);
}

double zeta_dn_closed(double s) {
    if (2.0 * s <= 1.0) throw std::domain_error("zeta_dn_closed: requires s > 1/2");
    return 2.0 * std::pow(2.0 / kPi, 2.0 * s) * shifted_zeta(2.0 * s);
}

ZetaValue zeta_dd_closed_at_0() { return scaled_zeta_at_0(2.0, 2.0 / kPi, riemann_zeta_at_0()); }

ZetaValue zeta_dn_closed_at_0() { return scaled_zeta_at_0(2.0, 2.0 / kPi, shifted_zeta_at_0()); }

}  // namespace torsionlab::zeta
