#include "torsionlab/metrized_complex.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace torsionlab::complexes {

namespace {

constexpr double kRankCutoff = 1e-10;      // relative to largest singular value
constexpr double kComposeCutoff = 1e-12;   // d∘d residual relative to norms

struct Whitened {
    std::vector<Eigen::MatrixXd> maps;       // whitened differentials
    std::vector<Eigen::Index> ranks;         // SVD ranks
    std::vector<double> log_volumes;         // sum of log of nonzero svs
};

std::vector<Eigen::MatrixXd> cholesky_factors(const MetrizedComplex& c) {
    std::vector<Eigen::MatrixXd> ls;
    ls.reserve(c.terms.size());
    for (const auto& term : c.terms) {
        if (term.dim() == 0) {
            ls.emplace_back(0, 0);
            continue;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(term.gram);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("metrized complex: Gram matrix is not SPD");
        ls.push_back(Eigen::MatrixXd(llt.matrixL()));
    }
    return ls;
}

// Transform every differential so adjoints become plain transposes:
// d~ = L_{i+1}^T d L_i^{-T}.
Whitened whiten(const MetrizedComplex& c) {
    const auto ls = cholesky_factors(c);
    Whitened w;
    for (std::size_t i = 0; i + 1 < c.terms.size(); ++i) {
        const auto& d = c.differentials[i];
        Eigen::MatrixXd wd;
        if (d.rows() == 0 || d.cols() == 0) {
            wd = Eigen::MatrixXd::Zero(d.rows(), d.cols());
        } else {
            wd = ls[i + 1].transpose() * d *
                 ls[i].transpose().triangularView<Eigen::Upper>().solve(
                     Eigen::MatrixXd::Identity(d.cols(), d.cols()));
        }
        Eigen::Index rank = 0;
        double logvol = 0.0;
        if (wd.rows() > 0 && wd.cols() > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(wd);
            const auto& sv = svd.singularValues();
            const double cutoff = sv.size() ? kRankCutoff * sv(0) : 0.0;
            for (Eigen::Index j = 0; j < sv.size(); ++j) {
                if (sv(j) > cutoff && sv(j) > 0.0) {
                    ++rank;
                    logvol += std::log(sv(j));
                }
            }
        }
        w.maps.push_back(std::move(wd));
        w.ranks.push_back(rank);
        w.log_volumes.push_back(logvol);
    }
    return w;
}

void check_shapes(const MetrizedComplex& c) {
    if (c.terms.empty()) return;
    if (c.differentials.size() + 1 != c.terms.size())
        throw std::invalid_argument("metrized complex: need one differential per adjacent pair");
    for (std::size_t i = 0; i < c.terms.size(); ++i) {
        if (c.terms[i].gram.rows() != c.terms[i].gram.cols())
            throw std::invalid_argument("metrized complex: Gram matrices must be square");
        if (i + 1 < c.terms.size()) {
            if (c.differentials[i].rows() != c.terms[i + 1].dim() ||
                c.differentials[i].cols() != c.terms[i].dim())
                throw std::invalid_argument("metrized complex: differential shape mismatch");
            if (c.terms[i + 1].grading != c.terms[i].grading + 1)
                throw std::invalid_argument("metrized complex: gradings must be consecutive");
        }
    }
}

}  // namespace

std::string Diagnostics::summary() const {
    std::ostringstream os;
    os << "exact=" << (exact ? "yes" : "no") << " max_dd_residual=" << max_dd_residual
       << " cohomology=[";
    for (std::size_t i = 0; i < cohomology_dims.size(); ++i)
        os << (i ? "," : "") << cohomology_dims[i];
    os << "]";
    return os.str();
}

Diagnostics validate(const MetrizedComplex& c) {
    Diagnostics diag;
    try {
        check_shapes(c);
    } catch (const std::invalid_argument&) {
        diag.shape_ok = false;
        diag.exact = false;
        return diag;
    }
    if (c.terms.empty()) return diag;

    for (const auto& term : c.terms) {
        if (term.dim() == 0) {
            diag.gram_conditions.push_back(1.0);
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(term.gram);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (!(lo > 0.0)) diag.grams_spd = false;
        diag.gram_conditions.push_back(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    }
    if (!diag.grams_spd) {
        diag.exact = false;
        return diag;
    }

    for (std::size_t i = 0; i + 1 < c.differentials.size(); ++i) {
        const auto& a = c.differentials[i + 1];
        const auto& b = c.differentials[i];
        double residual = 0.0;
        if (a.rows() > 0 && b.cols() > 0 && a.cols() > 0) {
            const double scale = a.norm() * b.norm();
            residual = scale > 0.0 ? (a * b).norm() / scale : (a * b).norm();
        }
        diag.dd_residuals.push_back(residual);
        diag.max_dd_residual = std::max(diag.max_dd_residual, residual);
    }
    if (diag.max_dd_residual > kComposeCutoff) diag.exact = false;

    const Whitened w = whiten(c);
    for (std::size_t i = 0; i < c.terms.size(); ++i) {
        const Eigen::Index in_rank = i > 0 ? w.ranks[i - 1] : 0;
        const Eigen::Index out_rank = i < w.ranks.size() ? w.ranks[i] : 0;
        const int h = static_cast<int>(c.terms[i].dim() - in_rank - out_rank);
        diag.cohomology_dims.push_back(h);
        if (h != 0) diag.exact = false;
    }
    return diag;
}

TorsionOfComplex torsion_acyclic(const MetrizedComplex& c) {
    check_shapes(c);
    if (c.terms.empty()) return {0.0};
    const Diagnostics diag = validate(c);
    if (!diag.exact) {
        for (std::size_t i = 0; i < diag.cohomology_dims.size(); ++i) {
            if (diag.cohomology_dims[i] != 0) {
                throw std::invalid_argument(
                    "torsion_acyclic: complex is not exact at grading " +
                    std::to_string(c.terms[i].grading) + " (cohomology dimension " +
                    std::to_string(diag.cohomology_dims[i]) + ")");
            }
        }
        throw std::invalid_argument("torsion_acyclic: complex is not exact (d*d != 0)");
    }

    const Whitened w = whiten(c);
    // log det Delta_k = 2 (logvol_{k-1} + logvol_k); assembled from the
    // singular values, never from determinant products.
    double torsion = 0.0;
    for (std::size_t k = 0; k < c.terms.size(); ++k) {
        const double in_vol = k > 0 ? w.log_volumes[k - 1] : 0.0;
        const double out_vol = k < w.log_volumes.size() ? w.log_volumes[k] : 0.0;
        const double logdet = 2.0 * (in_vol + out_vol);
        const int g = c.terms[k].grading;
        const double sign = (g % 2 == 0) ? 1.0 : -1.0;
        torsion += 0.5 * sign * g * logdet;
    }
    return {torsion};
}

MetrizedComplex shift_grading(const MetrizedComplex& c, int l) {
    MetrizedComplex out = c;
    for (auto& term : out.terms) term.grading += l;
    return out;
}

MetrizedComplex truncate(const MetrizedComplex& c, int k) {
    check_shapes(c);
    std::size_t idx = c.terms.size();
    for (std::size_t i = 0; i < c.terms.size(); ++i)
        if (c.terms[i].grading == k) idx = i;
    if (idx == c.terms.size())
        throw std::domain_error("truncate: grading label not present");
    if (idx + 1 == c.terms.size()) return c;

    MetrizedComplex out;
    out.terms.assign(c.terms.begin(), c.terms.begin() + idx + 1);
    out.differentials.assign(c.differentials.begin(), c.differentials.begin() + idx);

    // Basis of Im(f_k) inside E_{k+1}, orthonormal for the E_{k+1} metric, via
    // the whitened image; the restricted Gram is then the identity.
    const auto& d = c.differentials[idx];
    const auto& g_next = c.terms[idx + 1].gram;
    Eigen::LLT<Eigen::MatrixXd> llt(g_next);
    Eigen::MatrixXd wd = Eigen::MatrixXd(llt.matrixL()).transpose() * d;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(wd, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() ? kRankCutoff * sv(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index j = 0; j < sv.size(); ++j)
        if (sv(j) > cutoff) ++rank;

    Eigen::MatrixXd u = svd.matrixU().leftCols(rank);  // whitened frame of the image
    // New differential: coordinates of the whitened d in that frame.
    Eigen::MatrixXd new_d = u.transpose() * wd;

    MetrizedTerm image_term;
    image_term.grading = k + 1;
    image_term.gram = Eigen::MatrixXd::Identity(rank, rank);
    out.terms.push_back(std::move(image_term));
    out.differentials.push_back(std::move(new_d));
    return out;
}

double additivity_check(const MetrizedComplex& h_dd, const MetrizedComplex& h,
                        const MetrizedComplex& h_d) {
    const double a = torsion_acyclic(shift_grading(h_dd, 1)).value;
    const double b = torsion_acyclic(h).value;
    const double c = torsion_acyclic(shift_grading(h_d, 1)).value;
    return std::abs(a + b - c);
}

double compare_scaled_sequences(const MetrizedComplex& base,
                                const std::vector<std::pair<int, double>>& scale_positions) {
    MetrizedComplex scaled = base;
    for (const auto& [index, factor] : scale_positions) {
        if (!(factor > 0.0))
            throw std::domain_error("compare_scaled_sequences: factors must be positive");
        if (index < 0 || static_cast<std::size_t>(index) >= scaled.terms.size())
            throw std::domain_error("compare_scaled_sequences: term index out of range");
        scaled.terms[index].gram /= factor * factor;
    }
    return torsion_acyclic(scaled).value - torsion_acyclic(base).value;
}

MetrizedComplex read_complex(std::istream& in) {
    std::string line;
    auto read_int_line = [&in, &line]() {
        std::vector<int> values;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            int v;
            while (ls >> v) values.push_back(v);
            if (!values.empty()) return values;
        }
        throw std::runtime_error("complex file: missing header line");
    };
    const std::vector<int> dims = read_int_line();
    const std::vector<int> gradings = read_int_line();
    if (dims.size() != gradings.size())
        throw std::runtime_error("complex file: dimensions and gradings disagree");

    MetrizedComplex c;
    auto read_matrix = [&in](Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index cc = 0; cc < cols; ++cc)
                if (!(in >> m(r, cc)))
                    throw std::runtime_error("complex file: truncated matrix data");
        return m;
    };
    for (std::size_t i = 0; i < dims.size(); ++i) {
        MetrizedTerm term;
        term.grading = gradings[i];
        term.gram = read_matrix(dims[i], dims[i]);
        c.terms.push_back(std::move(term));
    }
    for (std::size_t i = 0; i + 1 < dims.size(); ++i)
        c.differentials.push_back(read_matrix(dims[i + 1], dims[i]));
    return c;
}

namespace {

Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = gauss(rng);
    return m;
}

Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, Eigen::Index n) {
    if (n == 0) return Eigen::MatrixXd(0, 0);
    const Eigen::MatrixXd g = gaussian_matrix(rng, n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Fix the sign ambiguity so the frame is deterministic in the seed.
    for (Eigen::Index c = 0; c < n; ++c)
        if (qr.matrixQR()(c, c) < 0.0) q.col(c) *= -1.0;
    return q;
}

// Exact complex with prescribed consecutive ranks: term k has dimension
// rank_{k-1} + rank_k and the differential carries the "new" frame columns
// onto the next term's "image" frame columns with random positive weights.
MetrizedComplex staircase_complex(std::mt19937_64& rng, const std::vector<int>& ranks,
                                  int first_grading) {
    const std::size_t n_terms = ranks.size() + 1;
    std::vector<int> dims(n_terms);
    for (std::size_t k = 0; k < n_terms; ++k) {
        const int in_rank = k > 0 ? ranks[k - 1] : 0;
        const int out_rank = k < ranks.size() ? ranks[k] : 0;
        dims[k] = in_rank + out_rank;
    }
    std::vector<Eigen::MatrixXd> frames;
    for (std::size_t k = 0; k < n_terms; ++k)
        frames.push_back(random_orthogonal(rng, dims[k]));

    std::uniform_real_distribution<double> weight(0.5, 2.0);
    MetrizedComplex c;
    for (std::size_t k = 0; k < n_terms; ++k) {
        MetrizedTerm term;
        term.grading = first_grading + static_cast<int>(k);
        term.gram = Eigen::MatrixXd::Identity(dims[k], dims[k]);
        c.terms.push_back(std::move(term));
    }
    for (std::size_t k = 0; k + 1 < n_terms; ++k) {
        const int r = ranks[k];
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dims[k + 1], dims[k]);
        if (r > 0) {
            Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(r, r);
            for (int j = 0; j < r; ++j) sigma(j, j) = weight(rng);
            // Image frame of term k+1 = first r columns; coimage frame of
            // term k = last r columns (orthogonal to its own image frame).
            d = frames[k + 1].leftCols(r) * sigma * frames[k].rightCols(r).transpose();
        }
        c.differentials.push_back(std::move(d));
    }
    return c;
}

std::vector<int> random_ranks(std::mt19937_64& rng, std::size_t n, int max_rank) {
    std::uniform_int_distribution<int> pick(0, max_rank);
    std::vector<int> ranks(n);
    bool any = false;
    for (auto& r : ranks) {
        r = pick(rng);
        any = any || r > 0;
    }
    if (!any) ranks[n / 2] = 1;
    return ranks;
}

}  // namespace

MetrizedComplex random_exact_complex(std::uint64_t seed, int terms, int max_rank) {
    if (terms < 2) throw std::invalid_argument("random_exact_complex: need at least two terms");
    std::mt19937_64 rng(seed);
    return staircase_complex(rng, random_ranks(rng, terms - 1, max_rank), 0);
}

CompatibleTriple random_compatible_triple(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> n_maps(3, 5);
    const std::size_t n = n_maps(rng);

    const MetrizedComplex sub = staircase_complex(rng, random_ranks(rng, n, 2), 0);
    const MetrizedComplex quot = staircase_complex(rng, random_ranks(rng, n, 2), 0);

    // Middle complex: per-degree orthogonal sum of the two, with an
    // upper-triangular coupling d_mid = [[d_sub, u],[0, d_quot]] where
    // u = d_sub psi - psi d_quot for Gaussian psi keeps d^2 = 0.
    std::vector<Eigen::MatrixXd> psi;
    for (std::size_t k = 0; k <= n; ++k)
        psi.push_back(gaussian_matrix(rng, sub.terms[k].dim(), quot.terms[k].dim()));

    MetrizedComplex mid;
    for (std::size_t k = 0; k <= n; ++k) {
        MetrizedTerm term;
        term.grading = sub.terms[k].grading;
        const Eigen::Index dim = sub.terms[k].dim() + quot.terms[k].dim();
        term.gram = Eigen::MatrixXd::Identity(dim, dim);
        mid.terms.push_back(std::move(term));
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Index ps = sub.terms[k].dim(), pq = quot.terms[k].dim();
        const Eigen::Index ns = sub.terms[k + 1].dim(), nq = quot.terms[k + 1].dim();
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ns + nq, ps + pq);
        d.topLeftCorner(ns, ps) = sub.differentials[k];
        d.bottomRightCorner(nq, pq) = quot.differentials[k];
        d.topRightCorner(ns, pq) =
            sub.differentials[k] * psi[k] - psi[k + 1] * quot.differentials[k];
        mid.differentials.push_back(std::move(d));
    }
    return {mid, sub, quot};
}

void write_complex(std::ostream& out, const MetrizedComplex& c) {
    for (std::size_t i = 0; i < c.terms.size(); ++i)
        out << (i ? " " : "") << c.terms[i].dim();
    out << "\n";
    for (std::size_t i = 0; i < c.terms.size(); ++i)
        out << (i ? " " : "") << c.terms[i].grading;
    out << "\n";
    const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, " ", "\n");
    for (const auto& term : c.terms)
        if (term.dim() > 0) out << term.gram.format(fmt) << "\n";
    for (const auto& d : c.differentials)
        if (d.rows() > 0 && d.cols() > 0) out << d.format(fmt) << "\n";
}

}  // namespace torsionlab::complexes
