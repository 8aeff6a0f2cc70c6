#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace torsionlab::quad {

// Raised when an adaptive quadrature exhausts its budget; carries the partial
// estimate so callers can report it.
class NumericalFailure : public std::runtime_error {
  public:
    NumericalFailure(const std::string& what, double partial)
        : std::runtime_error(what), partial_estimate(partial) {}
    double partial_estimate;
};

struct QuadratureOptions {
    double panel_tolerance = 1e-9;  // absolute, per panel
    int max_depth = 48;
    long max_evaluations = 4'000'000;
};

namespace detail {

struct AdaptiveState {
    const std::function<double(double)>* f;
    QuadratureOptions opts;
    long evaluations = 0;

    double eval(double x) {
        if (++evaluations > opts.max_evaluations)
            throw NumericalFailure("adaptive quadrature: evaluation budget exhausted", 0.0);
        return (*f)(x);
    }

    // Classic adaptive Simpson bisection with Richardson acceptance.
    double simpson(double a, double fa, double b, double fb, double fm, double whole,
                   int depth, double tol) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = eval(lm), frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (depth <= 0)
            throw NumericalFailure("adaptive quadrature: max depth reached", whole);
        if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        return simpson(a, fa, m, fm, flm, left, depth - 1, 0.5 * tol) +
               simpson(m, fm, b, fb, frm, right, depth - 1, 0.5 * tol);
    }
};

}  // namespace detail

// Integral of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts = {}) {
    if (!(a < b)) return 0.0;
    detail::AdaptiveState st{&f, opts};
    const double fa = st.eval(a), fb = st.eval(b), fm = st.eval(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    try {
        return st.simpson(a, fa, b, fb, fm, whole, opts.max_depth, opts.panel_tolerance);
    } catch (NumericalFailure& e) {
        e.partial_estimate = whole;
        throw;
    }
}

// Integral of g(t) dt/t over [t_lo, t_hi] via the substitution u = log t,
// which turns it into the integral of g(e^u) du.
inline double integrate_dt_over_t(const std::function<double(double)>& g, double t_lo,
                                  double t_hi, const QuadratureOptions& opts = {}) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw std::domain_error("integrate_dt_over_t: need 0 < t_lo < t_hi");
    auto h = [&g](double u) { return g(std::exp(u)); };
    return integrate(h, std::log(t_lo), std::log(t_hi), opts);
}

}  // namespace torsionlab::quad
