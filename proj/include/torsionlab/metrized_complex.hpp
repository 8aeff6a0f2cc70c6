#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace torsionlab::complexes {

// One term of a metrized cochain complex: an integer grading label and the
// Gram matrix of the chosen basis (symmetric positive definite).
struct MetrizedTerm {
    int grading = 0;
    Eigen::MatrixXd gram;  // dim x dim

    Eigen::Index dim() const { return gram.rows(); }
};

// Finite complex  ... -> E_i -> E_{i+1} -> ...  with differentials mapping
// term i to term i+1 and strictly increasing consecutive grading labels.
struct MetrizedComplex {
    std::vector<MetrizedTerm> terms;
    std::vector<Eigen::MatrixXd> differentials;  // size terms.size() - 1
};

struct Diagnostics {
    std::vector<double> dd_residuals;        // |d_{i+1} d_i| relative to norms
    std::vector<double> gram_conditions;     // spectral condition numbers
    std::vector<int> cohomology_dims;        // per-term, SVD rank cutoff 1e-10
    double max_dd_residual = 0.0;
    bool shape_ok = true;
    bool grams_spd = true;
    bool exact = true;

    std::string summary() const;
};

struct TorsionOfComplex {
    double value = 0.0;  // log scale
};

// Structural and numerical diagnostics; never throws on bad data.
Diagnostics validate(const MetrizedComplex& c);

// Torsion of an exact complex:
//   T = (1/2) sum_k (-1)^{g_k} g_k log det Delta_k
// with Delta_k the whitened combinatorial Laplacian; the log-determinants are
// assembled from singular values of the whitened differentials.
// Throws std::invalid_argument naming the failing degree if not exact.
TorsionOfComplex torsion_acyclic(const MetrizedComplex& c);

// All grading labels increased by l; torsion flips sign with parity of l.
MetrizedComplex shift_grading(const MetrizedComplex& c, int l);

// Truncation at grading label k: 0 -> E_0 -> ... -> E_k -> Im(f_k) -> 0 with
// the image carrying the restricted Gram metric.
MetrizedComplex truncate(const MetrizedComplex& c, int k);

// |T(shift(h_dd, 1)) + T(h) - T(shift(h_d, 1))| for a compatible triple.
double additivity_check(const MetrizedComplex& h_dd, const MetrizedComplex& h,
                        const MetrizedComplex& h_d);

// T(scaled) - T(base) where the Gram at each listed term index is replaced by
// factor^{-2} * Gram (the map factor * Id becomes an isometry onto the
// rescaled term).  Factors must be positive.
double compare_scaled_sequences(const MetrizedComplex& base,
                                const std::vector<std::pair<int, double>>& scale_positions);

// Plain-text matrix-file format: dimensions line, grading line, then the Gram
// matrices and differentials row-major.  See the repository README.
MetrizedComplex read_complex(std::istream& in);
void write_complex(std::ostream& out, const MetrizedComplex& c);

// A compatible triple for the additivity identity, built by splicing two
// random exact complexes through a short exact ladder with orthogonal
// per-degree splittings (Gaussian data orthonormalized by QR).  Satisfies
// additivity_check(h_dd, h, h_d) = 0 up to rounding.
struct CompatibleTriple {
    MetrizedComplex h_dd;  // the middle (spliced) complex
    MetrizedComplex h;     // the subcomplex
    MetrizedComplex h_d;   // the quotient complex
};
CompatibleTriple random_compatible_triple(std::uint64_t seed);

// A random exact metrized complex (same staircase construction), for the
// orthogonal-invariance and direct-sum property tests.
MetrizedComplex random_exact_complex(std::uint64_t seed, int terms, int max_rank);

}  // namespace torsionlab::complexes
