#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "torsionlab/model_spaces.hpp"

namespace torsionlab::engine {

enum class TorsionMode { paper_closed_form, direct_spectral };

enum class CalibrationTarget { final_torsion, heat_trace };

std::string to_string(TorsionMode mode);
std::string to_string(CalibrationTarget target);

// Convention factor reconciling the single-component eigenvalue count with
// the closed-form trace normalization, determined empirically from the two
// cylinder-over-points anchors.
struct CalibrationRecord {
    double kappa = 1.0;
    CalibrationTarget applied_to = CalibrationTarget::final_torsion;
    double anchor_residual = 0.0;
};

class CalibrationFailure : public std::runtime_error {
  public:
    explicit CalibrationFailure(const std::string& dump) : std::runtime_error(dump) {}
};

struct TorsionScalar {
    double value = 0.0;  // log scale
    TorsionMode mode = TorsionMode::direct_spectral;
    CalibrationRecord calibration;
};

// (1 + 2x^2) e^{x^2} for real or purely imaginary input (re, im); one of the
// two components must vanish.
double f_prime(double re, double im);

// Weighted supertrace sum_q (-1)^q (q/2) sum_k m (1 - (t/2) lambda) e^{-(t/4) lambda}
// over the per-degree spectra, times kappa when the record applies to traces.
double f_hat_supertrace(const models::ModelFiber& fiber, double t,
                        const CalibrationRecord& calibration = {});

// Torsion scalar by adaptive quadrature of the defining integral.
TorsionScalar torsion_by_definition(const models::ModelFiber& fiber,
                                    const CalibrationRecord& calibration = {});

// The same quantity assembled from per-degree zeta derivatives at 0.
TorsionScalar torsion_by_zeta(const models::ModelFiber& fiber,
                              const CalibrationRecord& calibration = {});

// Catalog closed forms in the calibrated (trace-normalized) convention.
TorsionScalar torsion_paper_closed_form(const models::ModelFiber& fiber);

// Evaluate in the requested mode (direct spectral uses the zeta route).
TorsionScalar torsion(const models::ModelFiber& fiber, TorsionMode mode,
                      const CalibrationRecord& calibration);

// Determine (kappa, applied_to) from the two anchors at half length 1 over a
// single point; throws CalibrationFailure with the full residual table when
// no unique candidate satisfies both within 1e-6.
CalibrationRecord calibrate();

struct SweepRow {
    double half_length = 0.0;
    double torsion_mixed = 0.0;    // absolute/relative: constant in the length
    double torsion_absolute = 0.0; // absolute/absolute: affine in log(l)
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double mixed_spread = 0.0;
    double measured_slope = 0.0;        // of torsion_absolute against log(l)
    double predicted_slope = 0.0;       // rank * chi(cross-section) / 2
    double collinearity_residual = 0.0;
};

SweepReport theorem23_sweep(const models::CrossSection& cross_section, int rank,
                            const std::vector<double>& lengths,
                            const CalibrationRecord& calibration);

}  // namespace torsionlab::engine
