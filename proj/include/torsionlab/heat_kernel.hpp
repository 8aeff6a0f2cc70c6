#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "torsionlab/quadrature.hpp"
#include "torsionlab/special_zeta.hpp"

namespace torsionlab::heat {

enum class EndpointBC { dirichlet, neumann };

// Scalar boundary conditions at the two endpoints of an interval.
struct ScalarBCPair {
    EndpointBC left = EndpointBC::dirichlet;
    EndpointBC right = EndpointBC::dirichlet;

    bool operator==(const ScalarBCPair&) const = default;
};

std::string to_string(const ScalarBCPair& bc);          // "dd", "dn", "nd", "nn"
ScalarBCPair bc_pair_from_string(const std::string& s);

inline constexpr ScalarBCPair kDD{EndpointBC::dirichlet, EndpointBC::dirichlet};
inline constexpr ScalarBCPair kDN{EndpointBC::dirichlet, EndpointBC::neumann};
inline constexpr ScalarBCPair kND{EndpointBC::neumann, EndpointBC::dirichlet};
inline constexpr ScalarBCPair kNN{EndpointBC::neumann, EndpointBC::neumann};

// Interval [-l, l]; geometric length is 2l.
struct IntervalSpec {
    double half_length = 1.0;
};

struct EigenvaluePoint {
    double value = 0.0;
    int multiplicity = 1;
};

// Closed-form eigenvalue family for one form degree: enumerator plus a bound
// on the heat-trace mass omitted after `cutoff` terms.
struct SpectrumStream {
    int degree_label = 0;
    std::function<EigenvaluePoint(std::size_t)> at;
    std::function<double(double, std::size_t)> tail_bound;  // (t, cutoff)
};

// Eigenvalues of -d^2/dx^2 on [-l, l]:
//   DD: (k pi / 2l)^2, k >= 1      NN: (k pi / 2l)^2, k >= 0
//   DN, ND: ((k - 1/2) pi / 2l)^2, k >= 1
SpectrumStream interval_spectrum(const IntervalSpec& spec, const ScalarBCPair& bc);

// Trace of e^{(t/4) d^2/dx^2} on [-l, l]: eigenvalue series for t >= 1, image
// (theta) series for t < 1.  Throws std::domain_error for t <= 0.
double heat_trace(const IntervalSpec& spec, const ScalarBCPair& bc, double t);

// t * d/dt of the trace, differentiated term by term on the active series.
double heat_trace_t_dt(const IntervalSpec& spec, const ScalarBCPair& bc, double t);

// Both series exposed individually for the crossover agreement checks.
double heat_trace_eigen_series(const IntervalSpec& spec, const ScalarBCPair& bc, double t);
double heat_trace_image_series(const IntervalSpec& spec, const ScalarBCPair& bc, double t);

// (1 - t/2) e^{-t/4}, the value of (1 + 2x^2) e^{x^2} at x = i sqrt(t)/2.
double counterterm_profile(double t);

// Corrected integrand at l = 1:
//   DD: Tr[(1 + 2t d/dt) e_{D,D}] + (1/2)(1 - t/2) e^{-t/4}
//   DN: Tr[(1 + 2t d/dt) e_{D,N}]
// Both vanish as t -> 0+ and decay exponentially as t -> infinity.
double corrected_integrand(const ScalarBCPair& bc, double t);

// Integrals of the corrected integrands against dt/t in the two-component
// trace count (both form factors share the scalar spectrum), which is the
// normalization the closed forms 2 (2/pi)^{2s} zeta(2s) correspond to.
// Returns (dd, dn) ~ (-4 log 2, -2 log 2).
std::pair<double, double> lemma22_by_quadrature();

// --- Mellin machinery -------------------------------------------------------

// Small-tau expansion of a tau-normalized trace h(tau) = Tr e^{-tau Delta}:
// sum of coeff * tau^{-power} terms plus a constant; the remainder is
// exponentially small as tau -> 0.
struct SmallTauExpansion {
    std::vector<std::pair<double, double>> singular;  // (power > 0, coeff)
    double constant = 0.0;
};

// Spectral zeta value and derivative at s = 0 for the positive spectrum,
// from the Mellin transform of the trace:
//   zeta(0)  = constant - zero_modes
//   zeta'(0) = gamma zeta(0) - sum coeff_i / power_i
//              + int_0^1 (h - singular - constant) dtau/tau
//              + int_1^inf (h - zero_modes) dtau/tau
zeta::ZetaValue zeta_from_mellin(const std::function<double(double)>& trace_tau,
                                 const SmallTauExpansion& expansion, int zero_modes,
                                 double lambda_min_positive,
                                 const quad::QuadratureOptions& opts = {});

// zeta(0), zeta'(0) of the positive interval spectrum via the Mellin route;
// cross-checked against the closed forms in the tests.
zeta::ZetaValue zeta_from_trace(const IntervalSpec& spec, const ScalarBCPair& bc);

// tau-normalized expansion of the interval trace (used by the model catalog).
SmallTauExpansion interval_trace_expansion(const IntervalSpec& spec, const ScalarBCPair& bc);

}  // namespace torsionlab::heat
