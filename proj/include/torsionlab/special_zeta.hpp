#pragma once

#include <stdexcept>

namespace torsionlab::zeta {

// Value and first derivative of a zeta-type function at s = 0, together with
// a rigorous bound on the numerical error of whichever route produced them.
struct ZetaValue {
    double value_at_0 = 0.0;
    double deriv_at_0 = 0.0;
    double error_bound = 0.0;
};

// Riemann zeta via direct series plus Euler-Maclaurin tail correction.
// Requires s > 1; throws std::domain_error otherwise.
double riemann_zeta(double s);

// Half-integer shifted zeta: sum over k >= 1 of (k - 1/2)^(-s), s > 1.
// Satisfies shifted_zeta(s) = (2^s - 1) * riemann_zeta(s).
double shifted_zeta(double s);

// Stored normalization anchors at s = 0.
ZetaValue riemann_zeta_at_0();   // (-1/2, -(1/2) log(2 pi))
ZetaValue shifted_zeta_at_0();   // (0, -(1/2) log 2)

// Boundary zeta functions in closed form, valid for s > 1/2:
//   zeta_dd_closed(s) = 2 (2/pi)^(2s) zeta(2s)
//   zeta_dn_closed(s) = 2 (2/pi)^(2s) shifted_zeta(2s)
double zeta_dd_closed(double s);
double zeta_dn_closed(double s);

// Values/derivatives of the closed forms at s = 0, computed analytically by
// the product rule applied to A * B^(2s) * zeta(2s) with the stored anchors.
ZetaValue zeta_dd_closed_at_0();  // deriv = -4 log 2
ZetaValue zeta_dn_closed_at_0();  // deriv = -2 log 2

// d/ds [ A * B^(2s) * Z(2s) ] at s = 0 given Z(0), Z'(0):
//   value = A * Z(0),  deriv = 2 log(B) * A * Z(0) + 2 A * Z'(0).
ZetaValue scaled_zeta_at_0(double factor, double base, const ZetaValue& inner);

}  // namespace torsionlab::zeta
