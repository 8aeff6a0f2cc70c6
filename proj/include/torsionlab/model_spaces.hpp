#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "torsionlab/heat_kernel.hpp"
#include "torsionlab/metrized_complex.hpp"

namespace torsionlab::models {

enum class BoundaryKind { absolute, relative };

// Form-level boundary conditions at the two ends of an interval direction.
struct FormBCPair {
    BoundaryKind left = BoundaryKind::absolute;
    BoundaryKind right = BoundaryKind::absolute;

    bool operator==(const FormBCPair&) const = default;
};

std::string to_string(const FormBCPair& bc);        // "aa", "ar", "ra", "rr"
FormBCPair form_bc_from_string(const std::string&);

inline constexpr FormBCPair kAbsAbs{BoundaryKind::absolute, BoundaryKind::absolute};
inline constexpr FormBCPair kAbsRel{BoundaryKind::absolute, BoundaryKind::relative};
inline constexpr FormBCPair kRelAbs{BoundaryKind::relative, BoundaryKind::absolute};
inline constexpr FormBCPair kRelRel{BoundaryKind::relative, BoundaryKind::relative};

struct PointSet {
    int count = 1;
};

struct Circle {
    double length = 1.0;
    double holonomy = 0.0;  // in [0, 2 pi); nonzero makes the circle acyclic
};

// Boundaryless cross-sections admissible under a cylinder.
using CrossSection = std::variant<PointSet, Circle>;

struct Interval {
    double half_length = 1.0;
    FormBCPair bc = kAbsAbs;
};

struct Cylinder {
    CrossSection cross_section;
    double half_length = 1.0;
    FormBCPair bc = kAbsAbs;
};

struct ModelFiber {
    std::variant<PointSet, Interval, Circle, Cylinder> shape;
    int bundle_rank = 1;
};

// Throws std::invalid_argument on inadmissible data (nonpositive lengths,
// rank < 1, holonomy with rank > 1).
void validate_fiber(const ModelFiber& fiber);

int dimension(const ModelFiber& fiber);
std::string describe(const ModelFiber& fiber);

// Per-degree dimensions of the cohomology under the fiber's conditions.
std::vector<int> betti(const ModelFiber& fiber);

struct EulerChars {
    int chi = 0;        // sum (-1)^p b_p
    int chi_prime = 0;  // sum (-1)^p p b_p
};
EulerChars euler_chars(const ModelFiber& fiber);

// Closed-form eigenvalue family of the form Laplacian in each degree, with
// the convention of heat_kernel_1d (trace of e^{(t/4) Laplacian}).
std::vector<heat::SpectrumStream> form_spectrum(const ModelFiber& fiber);

// L^2 Gram matrices of harmonic representatives, one per degree (0 x 0 when
// the degree is trivial).
struct CohomologyData {
    std::vector<Eigen::MatrixXd> grams;
};
CohomologyData harmonic_metric(const ModelFiber& fiber);

// Heat trace of the form Laplacian in one degree, with analytic t-derivative
// and the tau = t/4 small-time expansion needed by the Mellin route.
struct DegreeTrace {
    std::function<double(double)> value;  // trace at time t
    std::function<double(double)> t_dt;   // t * d/dt of the trace
    heat::SmallTauExpansion expansion;
    int zero_modes = 0;
    double lambda_min_positive = 0.0;     // 0 when the positive spectrum is empty
};
std::vector<DegreeTrace> degree_traces(const ModelFiber& fiber);

// --- Mayer-Vietoris catalog -------------------------------------------------

// Circle of length len1 + len2 split into two arcs; collar > 0 extends each
// piece by a collar of that half-length at both cut points (the pieces then
// have lengths len_i + 2 * collar and overlap on two collar cylinders).
struct CircleFromArcs {
    double len1 = 1.0;
    double len2 = 1.0;
    int rank = 1;
    double collar = 0.0;
};

// Interval split into two subintervals at an interior point.  The outer
// endpoints carry absolute conditions when outer_absolute, otherwise the
// right outer endpoint is relative (a fully mixed, acyclic instance).
struct IntervalSplit {
    double len1 = 1.0;
    double len2 = 1.0;
    int rank = 1;
    bool outer_absolute = true;
};

using MVInstance = std::variant<CircleFromArcs, IntervalSplit>;

// The long exact sequence of the splitting with L^2 Gram matrices and maps
// from closed-form harmonic representatives.
complexes::MetrizedComplex mayer_vietoris(const MVInstance& instance);

// The three interlocking sequences of the collared splitting, in the
// arrangement accepted by additivity_check (h_dd, h, h_d).
struct SequenceTriple {
    complexes::MetrizedComplex h_dd;
    complexes::MetrizedComplex h;
    complexes::MetrizedComplex h_d;
};
SequenceTriple mv_circle_triple(const CircleFromArcs& instance);  // collar > 0

// Pair sequence H^0(Z1) -> H^0(boundary) -> H^1(Z1, boundary) for an interval
// piece of the given length; y_gram_scale rescales the boundary-slot Gram
// (1 = point metric, 2*collar = collar-cylinder metric).
complexes::MetrizedComplex interval_comparison_sequence(double length, int rank,
                                                        double y_gram_scale);

// Same sequence for a cylinder over a circle (boundary = two circles).
complexes::MetrizedComplex cylinder_circle_comparison_sequence(double circle_length,
                                                               double half_length, int rank,
                                                               double y_gram_scale);

}  // namespace torsionlab::models
