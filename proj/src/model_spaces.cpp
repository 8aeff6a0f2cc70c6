#include "torsionlab/model_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace torsionlab::models {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInf = std::numeric_limits<double>::infinity();

heat::ScalarBCPair scalar_bc_for_degree(const FormBCPair& bc, int degree) {
    auto ep = [degree](BoundaryKind k) {
        const bool neumann = (k == BoundaryKind::absolute) == (degree == 0);
        return neumann ? heat::EndpointBC::neumann : heat::EndpointBC::dirichlet;
    };
    return {ep(bc.left), ep(bc.right)};
}

// ----- spectra ---------------------------------------------------------------

heat::SpectrumStream scale_multiplicity(heat::SpectrumStream s, int factor) {
    auto base = s.at;
    s.at = [base, factor](std::size_t k) {
        heat::EigenvaluePoint p = base(k);
        p.multiplicity *= factor;
        return p;
    };
    auto tail = s.tail_bound;
    s.tail_bound = [tail, factor](double t, std::size_t cutoff) {
        return factor * tail(t, cutoff);
    };
    return s;
}

heat::SpectrumStream point_set_stream(int total_rank) {
    heat::SpectrumStream s;
    s.degree_label = 0;
    s.at = [total_rank](std::size_t k) {
        return k == 0 ? heat::EigenvaluePoint{0.0, total_rank}
                      : heat::EigenvaluePoint{kInf, 1};
    };
    s.tail_bound = [](double, std::size_t cutoff) { return cutoff >= 1 ? 0.0 : kInf; };
    return s;
}

// Sorted enumeration of ((2 pi k + theta)/L)^2 over k in Z.
heat::SpectrumStream circle_stream(double length, double holonomy, int rank, int degree) {
    heat::SpectrumStream s;
    s.degree_label = degree;
    const double two_pi = 2.0 * kPi;
    if (holonomy == 0.0) {
        s.at = [length, rank, two_pi](std::size_t k) {
            if (k == 0) return heat::EigenvaluePoint{0.0, rank};
            const double v = two_pi * k / length;
            return heat::EigenvaluePoint{v * v, 2 * rank};
        };
    } else if (holonomy == kPi) {
        s.at = [length, rank](std::size_t k) {
            const double v = (2.0 * k + 1.0) * kPi / length;
            return heat::EigenvaluePoint{v * v, 2 * rank};
        };
    } else {
        const double lo = std::min(holonomy, two_pi - holonomy);
        const double hi = std::max(holonomy, two_pi - holonomy);
        s.at = [length, rank, lo, hi, two_pi](std::size_t k) {
            const double x = (k % 2 == 0) ? lo + two_pi * (k / 2) : hi + two_pi * (k / 2);
            const double v = x / length;
            return heat::EigenvaluePoint{v * v, rank};
        };
    }
    s.tail_bound = [at = s.at, length, two_pi](double t, std::size_t cutoff) {
        const heat::EigenvaluePoint next = at(cutoff);
        const double step = two_pi / length;
        const double ratio = std::exp(-0.25 * t * step * step);
        return 2.0 * next.multiplicity * std::exp(-0.25 * t * next.value) / (1.0 - ratio);
    };
    return s;
}

// Sorted union of several sorted streams, merging exactly equal values.
heat::SpectrumStream merge_streams(std::vector<heat::SpectrumStream> sources, int degree) {
    struct State {
        std::vector<heat::SpectrumStream> sources;
        std::vector<std::size_t> next;
        std::vector<heat::EigenvaluePoint> cache;
    };
    auto st = std::make_shared<State>();
    st->sources = std::move(sources);
    st->next.assign(st->sources.size(), 0);

    auto materialize = [st](std::size_t upto) {
        while (st->cache.size() <= upto) {
            double best = kInf;
            for (std::size_t i = 0; i < st->sources.size(); ++i)
                best = std::min(best, st->sources[i].at(st->next[i]).value);
            int mult = 0;
            for (std::size_t i = 0; i < st->sources.size(); ++i) {
                while (st->sources[i].at(st->next[i]).value == best) {
                    mult += st->sources[i].at(st->next[i]).multiplicity;
                    ++st->next[i];
                    if (best == kInf) break;
                }
            }
            st->cache.push_back({best, mult});
        }
    };

    heat::SpectrumStream out;
    out.degree_label = degree;
    out.at = [st, materialize](std::size_t k) {
        materialize(k);
        return st->cache[k];
    };
    out.tail_bound = [st](double t, std::size_t cutoff) {
        double bound = 0.0;
        // Split the cutoff across sources conservatively: each source has
        // consumed at least zero terms, so its own tail from index 0 after
        // the merged prefix is bounded by its full tail at the consumed count.
        for (std::size_t i = 0; i < st->sources.size(); ++i) {
            const std::size_t used = cutoff < st->next[i] ? st->next[i] : 0;
            bound += st->sources[i].tail_bound(t, used);
        }
        return bound;
    };
    return out;
}

// Sorted enumeration of pairwise sums of two sorted streams.
heat::SpectrumStream minkowski_sum(const heat::SpectrumStream& a, const heat::SpectrumStream& b,
                                   int degree) {
    struct Node {
        double value;
        std::size_t i, j;
        bool operator>(const Node& o) const {
            if (value != o.value) return value > o.value;
            if (i != o.i) return i > o.i;
            return j > o.j;
        }
    };
    struct State {
        heat::SpectrumStream a, b;
        std::priority_queue<Node, std::vector<Node>, std::greater<Node>> heap;
        std::vector<heat::EigenvaluePoint> cache;
    };
    auto st = std::make_shared<State>();
    st->a = a;
    st->b = b;
    st->heap.push({a.at(0).value + b.at(0).value, 0, 0});

    auto materialize = [st](std::size_t upto) {
        while (st->cache.size() <= upto) {
            if (st->heap.empty()) {
                st->cache.push_back({kInf, 1});
                continue;
            }
            const double value = st->heap.top().value;
            int mult = 0;
            while (!st->heap.empty() && st->heap.top().value == value) {
                const Node n = st->heap.top();
                st->heap.pop();
                mult += st->a.at(n.i).multiplicity * st->b.at(n.j).multiplicity;
                // Standard frontier expansion generating each (i, j) once.
                if (value < kInf) {
                    st->heap.push({st->a.at(n.i).value + st->b.at(n.j + 1).value, n.i, n.j + 1});
                    if (n.j == 0)
                        st->heap.push({st->a.at(n.i + 1).value + st->b.at(0).value, n.i + 1, 0});
                }
            }
            st->cache.push_back({value, mult});
        }
    };

    heat::SpectrumStream out;
    out.degree_label = degree;
    out.at = [st, materialize](std::size_t k) {
        materialize(k);
        return st->cache[k];
    };
    out.tail_bound = [st](double t, std::size_t cutoff) {
        // Mass omitted beyond the merged cutoff is at most the full product
        // trace restricted to either factor's tail past sqrt(cutoff) terms.
        const std::size_t per_factor = static_cast<std::size_t>(std::sqrt(double(cutoff))) + 1;
        double full_a = 0.0, full_b = 0.0;
        for (std::size_t k = 0; k < per_factor; ++k) {
            full_a += st->a.at(k).multiplicity * std::exp(-0.25 * t * st->a.at(k).value);
            full_b += st->b.at(k).multiplicity * std::exp(-0.25 * t * st->b.at(k).value);
        }
        full_a += st->a.tail_bound(t, per_factor);
        full_b += st->b.tail_bound(t, per_factor);
        return st->a.tail_bound(t, per_factor) * full_b + full_a * st->b.tail_bound(t, per_factor);
    };
    return out;
}

// ----- analytic trace models -------------------------------------------------

struct TraceModel {
    std::function<double(double)> value;  // trace at time t
    std::function<double(double)> t_dt;   // t * d/dt
    heat::SmallTauExpansion expansion;    // in tau = t/4
    bool zero = false;
};

TraceModel zero_model() {
    TraceModel m;
    m.value = [](double) { return 0.0; };
    m.t_dt = [](double) { return 0.0; };
    m.zero = true;
    return m;
}

TraceModel constant_model(double c) {
    TraceModel m;
    m.value = [c](double) { return c; };
    m.t_dt = [](double) { return 0.0; };
    m.expansion.constant = c;
    return m;
}

TraceModel interval_model(double half_length, const heat::ScalarBCPair& bc) {
    TraceModel m;
    const heat::IntervalSpec spec{half_length};
    m.value = [spec, bc](double t) { return heat::heat_trace(spec, bc, t); };
    m.t_dt = [spec, bc](double t) { return heat::heat_trace_t_dt(spec, bc, t); };
    m.expansion = heat::interval_trace_expansion(spec, bc);
    return m;
}

TraceModel circle_model(double length, double holonomy) {
    TraceModel m;
    const heat::SpectrumStream s = circle_stream(length, holonomy, 1, 0);
    m.value = [s, length, holonomy](double t) {
        if (!(t > 0.0)) throw std::domain_error("circle trace: requires t > 0");
        if (t >= 1.0) {
            double sum = 0.0;
            for (std::size_t k = 0;; ++k) {
                const auto p = s.at(k);
                const double term = p.multiplicity * std::exp(-0.25 * t * p.value);
                sum += term;
                if (k > 4 && term < 1e-17 * (sum + 1e-300)) break;
            }
            return sum;
        }
        const double pref = length / std::sqrt(kPi * t);
        double sum = pref;
        for (int j = 1; j <= 50; ++j) {
            const double img =
                2.0 * pref * std::exp(-j * j * length * length / t) * std::cos(j * holonomy);
            sum += img;
            if (std::abs(img) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    };
    m.t_dt = [s, length, holonomy](double t) {
        if (!(t > 0.0)) throw std::domain_error("circle trace: requires t > 0");
        if (t >= 1.0) {
            double sum = 0.0;
            for (std::size_t k = 0;; ++k) {
                const auto p = s.at(k);
                const double term =
                    p.multiplicity * (-0.25 * t * p.value) * std::exp(-0.25 * t * p.value);
                sum += term;
                if (k > 4 && std::abs(term) < 1e-17 * (std::abs(sum) + 1e-300)) break;
            }
            return sum;
        }
        const double pref = length / std::sqrt(kPi * t);
        double sum = -0.5 * pref;
        for (int j = 1; j <= 50; ++j) {
            const double a = j * j * length * length;
            const double img =
                2.0 * pref * std::exp(-a / t) * std::cos(j * holonomy) * (a / t - 0.5);
            sum += img;
            if (std::abs(img) < 1e-18 * (std::abs(sum) + 1e-300)) break;
        }
        return sum;
    };
    m.expansion.singular.push_back({0.5, length / (2.0 * std::sqrt(kPi))});
    return m;
}

void accumulate_expansion(heat::SmallTauExpansion& into, const heat::SmallTauExpansion& from,
                          double weight) {
    into.constant += weight * from.constant;
    for (const auto& [p, c] : from.singular) {
        bool merged = false;
        for (auto& [q, d] : into.singular) {
            if (q == p) {
                d += weight * c;
                merged = true;
                break;
            }
        }
        if (!merged) into.singular.push_back({p, weight * c});
    }
}

TraceModel scale_model(TraceModel m, double factor) {
    if (m.zero || factor == 0.0) return zero_model();
    TraceModel out;
    auto v = m.value;
    auto d = m.t_dt;
    out.value = [v, factor](double t) { return factor * v(t); };
    out.t_dt = [d, factor](double t) { return factor * d(t); };
    accumulate_expansion(out.expansion, m.expansion, factor);
    return out;
}

TraceModel product_model(const TraceModel& a, const TraceModel& b) {
    if (a.zero || b.zero) return zero_model();
    TraceModel out;
    auto av = a.value, bv = b.value, ad = a.t_dt, bd = b.t_dt;
    out.value = [av, bv](double t) { return av(t) * bv(t); };
    out.t_dt = [av, bv, ad, bd](double t) { return ad(t) * bv(t) + av(t) * bd(t); };
    auto terms_of = [](const heat::SmallTauExpansion& e) {
        std::vector<std::pair<double, double>> ts = e.singular;
        ts.push_back({0.0, e.constant});
        return ts;
    };
    for (const auto& [pa, ca] : terms_of(a.expansion)) {
        for (const auto& [pb, cb] : terms_of(b.expansion)) {
            const double p = pa + pb;
            const double c = ca * cb;
            if (c == 0.0) continue;
            if (p == 0.0) {
                out.expansion.constant += c;
            } else {
                heat::SmallTauExpansion single;
                single.singular.push_back({p, c});
                accumulate_expansion(out.expansion, single, 1.0);
            }
        }
    }
    return out;
}

TraceModel sum_model(const TraceModel& a, const TraceModel& b) {
    if (a.zero) return b;
    if (b.zero) return a;
    TraceModel out;
    auto av = a.value, bv = b.value, ad = a.t_dt, bd = b.t_dt;
    out.value = [av, bv](double t) { return av(t) + bv(t); };
    out.t_dt = [ad, bd](double t) { return ad(t) + bd(t); };
    out.expansion = a.expansion;
    accumulate_expansion(out.expansion, b.expansion, 1.0);
    return out;
}

// Cross-section degree data shared by the cylinder assembly.
struct CrossSectionData {
    std::vector<heat::SpectrumStream> spectra;  // per degree, rank-scaled
    std::vector<TraceModel> traces;             // per degree, rank-scaled
    std::vector<int> betti;                     // rank-scaled
    std::vector<Eigen::MatrixXd> grams;
    double volume = 0.0;
};

CrossSectionData cross_section_data(const CrossSection& cs, int rank) {
    CrossSectionData d;
    if (std::holds_alternative<PointSet>(cs)) {
        const auto& p = std::get<PointSet>(cs);
        d.spectra = {point_set_stream(p.count * rank)};
        d.traces = {constant_model(double(p.count) * rank)};
        d.betti = {p.count * rank};
        d.grams = {Eigen::MatrixXd::Identity(p.count * rank, p.count * rank)};
        d.volume = p.count;
    } else {
        const auto& c = std::get<Circle>(cs);
        d.spectra = {circle_stream(c.length, c.holonomy, rank, 0),
                     circle_stream(c.length, c.holonomy, rank, 1)};
        const TraceModel one = scale_model(circle_model(c.length, c.holonomy), rank);
        d.traces = {one, one};
        const int b = c.holonomy == 0.0 ? rank : 0;
        d.betti = {b, b};
        Eigen::MatrixXd g = c.length * Eigen::MatrixXd::Identity(b, b);
        d.grams = {g, g};
        d.volume = c.length;
    }
    return d;
}

int count_zero_modes(const heat::SpectrumStream& s) {
    int zm = 0;
    for (std::size_t k = 0; k < 64; ++k) {
        const auto p = s.at(k);
        if (p.value == 0.0)
            zm += p.multiplicity;
        else
            break;
    }
    return zm;
}

double first_positive(const heat::SpectrumStream& s) {
    for (std::size_t k = 0; k < 1024; ++k) {
        const auto p = s.at(k);
        if (p.value > 0.0) return p.value;  // kInf signals an empty positive part
    }
    throw std::logic_error("spectrum enumeration failed to reach a positive value");
}

}  // namespace

// ----- public surface ---------------------------------------------------------

std::string to_string(const FormBCPair& bc) {
    auto c = [](BoundaryKind k) { return k == BoundaryKind::absolute ? 'a' : 'r'; };
    return std::string{c(bc.left), c(bc.right)};
}

FormBCPair form_bc_from_string(const std::string& s) {
    if (s.size() != 2) throw std::invalid_argument("form bc: expected two letters from {a,r}");
    auto e = [](char c) {
        if (c == 'a' || c == 'A') return BoundaryKind::absolute;
        if (c == 'r' || c == 'R') return BoundaryKind::relative;
        throw std::invalid_argument("form bc: expected letters from {a,r}");
    };
    return {e(s[0]), e(s[1])};
}

void validate_fiber(const ModelFiber& fiber) {
    if (fiber.bundle_rank < 1)
        throw std::invalid_argument("model fiber: bundle rank must be positive");
    if (const auto* p = std::get_if<PointSet>(&fiber.shape)) {
        if (p->count < 1) throw std::invalid_argument("model fiber: point count must be positive");
    } else if (const auto* i = std::get_if<Interval>(&fiber.shape)) {
        if (!(i->half_length > 0.0))
            throw std::invalid_argument("model fiber: interval half length must be positive");
    } else if (const auto* c = std::get_if<Circle>(&fiber.shape)) {
        if (!(c->length > 0.0))
            throw std::invalid_argument("model fiber: circle length must be positive");
        if (c->holonomy != 0.0 && fiber.bundle_rank != 1)
            throw std::invalid_argument("model fiber: holonomy requires bundle rank 1");
        if (c->holonomy < 0.0 || c->holonomy >= 2.0 * kPi)
            throw std::invalid_argument("model fiber: holonomy must lie in [0, 2 pi)");
    } else if (const auto* cyl = std::get_if<Cylinder>(&fiber.shape)) {
        if (!(cyl->half_length > 0.0))
            throw std::invalid_argument("model fiber: cylinder half length must be positive");
        if (const auto* cc = std::get_if<Circle>(&cyl->cross_section)) {
            if (!(cc->length > 0.0))
                throw std::invalid_argument("model fiber: circle length must be positive");
            if (cc->holonomy != 0.0 && fiber.bundle_rank != 1)
                throw std::invalid_argument("model fiber: holonomy requires bundle rank 1");
        } else if (std::get_if<PointSet>(&cyl->cross_section)) {
            if (std::get<PointSet>(cyl->cross_section).count < 1)
                throw std::invalid_argument("model fiber: point count must be positive");
        }
    }
}

int dimension(const ModelFiber& fiber) {
    if (std::holds_alternative<PointSet>(fiber.shape)) return 0;
    if (std::holds_alternative<Cylinder>(fiber.shape)) {
        const auto& cyl = std::get<Cylinder>(fiber.shape);
        return std::holds_alternative<PointSet>(cyl.cross_section) ? 1 : 2;
    }
    return 1;
}

std::string describe(const ModelFiber& fiber) {
    std::ostringstream os;
    if (const auto* p = std::get_if<PointSet>(&fiber.shape)) {
        os << "points(" << p->count << ")";
    } else if (const auto* i = std::get_if<Interval>(&fiber.shape)) {
        os << "interval(l=" << i->half_length << ",bc=" << to_string(i->bc) << ")";
    } else if (const auto* c = std::get_if<Circle>(&fiber.shape)) {
        os << "circle(L=" << c->length << ",theta=" << c->holonomy << ")";
    } else {
        const auto& cyl = std::get<Cylinder>(fiber.shape);
        os << "cylinder(";
        if (const auto* p = std::get_if<PointSet>(&cyl.cross_section))
            os << "points(" << p->count << ")";
        else {
            const auto& cc = std::get<Circle>(cyl.cross_section);
            os << "circle(L=" << cc.length << ",theta=" << cc.holonomy << ")";
        }
        os << ",l=" << cyl.half_length << ",bc=" << to_string(cyl.bc) << ")";
    }
    os << " rank=" << fiber.bundle_rank;
    return os.str();
}

std::vector<int> betti(const ModelFiber& fiber) {
    validate_fiber(fiber);
    const int r = fiber.bundle_rank;
    if (const auto* p = std::get_if<PointSet>(&fiber.shape)) return {p->count * r};
    if (const auto* i = std::get_if<Interval>(&fiber.shape)) {
        if (i->bc == kAbsAbs) return {r, 0};
        if (i->bc == kRelRel) return {0, r};
        return {0, 0};
    }
    if (const auto* c = std::get_if<Circle>(&fiber.shape)) {
        const int b = c->holonomy == 0.0 ? r : 0;
        return {b, b};
    }
    const auto& cyl = std::get<Cylinder>(fiber.shape);
    const CrossSectionData cs = cross_section_data(cyl.cross_section, r);
    const int m = dimension(fiber);
    std::vector<int> out(m + 1, 0);
    for (int q = 0; q <= m; ++q) {
        if (cyl.bc == kAbsAbs && q < static_cast<int>(cs.betti.size())) out[q] = cs.betti[q];
        if (cyl.bc == kRelRel && q >= 1 && q - 1 < static_cast<int>(cs.betti.size()))
            out[q] = cs.betti[q - 1];
    }
    return out;
}

EulerChars euler_chars(const ModelFiber& fiber) {
    const std::vector<int> b = betti(fiber);
    EulerChars e;
    for (std::size_t p = 0; p < b.size(); ++p) {
        const int sign = (p % 2 == 0) ? 1 : -1;
        e.chi += sign * b[p];
        e.chi_prime += sign * static_cast<int>(p) * b[p];
    }
    return e;
}

std::vector<heat::SpectrumStream> form_spectrum(const ModelFiber& fiber) {
    validate_fiber(fiber);
    const int r = fiber.bundle_rank;
    if (std::holds_alternative<PointSet>(fiber.shape)) {
        const auto& p = std::get<PointSet>(fiber.shape);
        return {point_set_stream(p.count * r)};
    }
    if (const auto* i = std::get_if<Interval>(&fiber.shape)) {
        const heat::IntervalSpec spec{i->half_length};
        auto s0 = scale_multiplicity(
            heat::interval_spectrum(spec, scalar_bc_for_degree(i->bc, 0)), r);
        auto s1 = scale_multiplicity(
            heat::interval_spectrum(spec, scalar_bc_for_degree(i->bc, 1)), r);
        s0.degree_label = 0;
        s1.degree_label = 1;
        return {s0, s1};
    }
    if (const auto* c = std::get_if<Circle>(&fiber.shape)) {
        return {circle_stream(c->length, c->holonomy, r, 0),
                circle_stream(c->length, c->holonomy, r, 1)};
    }
    const auto& cyl = std::get<Cylinder>(fiber.shape);
    const CrossSectionData cs = cross_section_data(cyl.cross_section, r);
    const heat::IntervalSpec spec{cyl.half_length};
    const auto int0 = heat::interval_spectrum(spec, scalar_bc_for_degree(cyl.bc, 0));
    const auto int1 = heat::interval_spectrum(spec, scalar_bc_for_degree(cyl.bc, 1));
    const int m = dimension(fiber);
    std::vector<heat::SpectrumStream> out;
    for (int q = 0; q <= m; ++q) {
        std::vector<heat::SpectrumStream> parts;
        if (q < static_cast<int>(cs.spectra.size()))
            parts.push_back(minkowski_sum(cs.spectra[q], int0, q));
        if (q >= 1 && q - 1 < static_cast<int>(cs.spectra.size()))
            parts.push_back(minkowski_sum(cs.spectra[q - 1], int1, q));
        if (parts.size() == 1) {
            parts[0].degree_label = q;
            out.push_back(parts[0]);
        } else {
            out.push_back(merge_streams(parts, q));
        }
    }
    return out;
}

CohomologyData harmonic_metric(const ModelFiber& fiber) {
    validate_fiber(fiber);
    const int r = fiber.bundle_rank;
    CohomologyData data;
    auto empty = Eigen::MatrixXd(0, 0);
    if (const auto* p = std::get_if<PointSet>(&fiber.shape)) {
        data.grams = {Eigen::MatrixXd::Identity(p->count * r, p->count * r)};
        return data;
    }
    if (const auto* i = std::get_if<Interval>(&fiber.shape)) {
        const double len = 2.0 * i->half_length;
        if (i->bc == kAbsAbs)
            data.grams = {len * Eigen::MatrixXd::Identity(r, r), empty};
        else if (i->bc == kRelRel)
            data.grams = {empty, len * Eigen::MatrixXd::Identity(r, r)};
        else
            data.grams = {empty, empty};
        return data;
    }
    if (const auto* c = std::get_if<Circle>(&fiber.shape)) {
        if (c->holonomy != 0.0) {
            data.grams = {empty, empty};
        } else {
            data.grams = {c->length * Eigen::MatrixXd::Identity(r, r),
                          c->length * Eigen::MatrixXd::Identity(r, r)};
        }
        return data;
    }
    const auto& cyl = std::get<Cylinder>(fiber.shape);
    const CrossSectionData cs = cross_section_data(cyl.cross_section, r);
    const double len = 2.0 * cyl.half_length;
    const int m = dimension(fiber);
    data.grams.assign(m + 1, empty);
    for (int q = 0; q <= m; ++q) {
        // Pulled-back representatives pick up the cylinder length as a volume
        // factor: |phi|^2_cyl = 2l |phi|^2_Y, and du wedge phi likewise.
        if (cyl.bc == kAbsAbs && q < static_cast<int>(cs.grams.size()))
            data.grams[q] = len * cs.grams[q];
        if (cyl.bc == kRelRel && q >= 1 && q - 1 < static_cast<int>(cs.grams.size()))
            data.grams[q] = len * cs.grams[q - 1];
    }
    return data;
}

std::vector<DegreeTrace> degree_traces(const ModelFiber& fiber) {
    validate_fiber(fiber);
    const int r = fiber.bundle_rank;
    std::vector<TraceModel> models;
    if (std::holds_alternative<PointSet>(fiber.shape)) {
        const auto& p = std::get<PointSet>(fiber.shape);
        models = {constant_model(double(p.count) * r)};
    } else if (const auto* i = std::get_if<Interval>(&fiber.shape)) {
        models = {scale_model(interval_model(i->half_length, scalar_bc_for_degree(i->bc, 0)), r),
                  scale_model(interval_model(i->half_length, scalar_bc_for_degree(i->bc, 1)), r)};
    } else if (const auto* c = std::get_if<Circle>(&fiber.shape)) {
        const TraceModel one = scale_model(circle_model(c->length, c->holonomy), r);
        models = {one, one};
    } else {
        const auto& cyl = std::get<Cylinder>(fiber.shape);
        const CrossSectionData cs = cross_section_data(cyl.cross_section, r);
        const TraceModel int0 = interval_model(cyl.half_length, scalar_bc_for_degree(cyl.bc, 0));
        const TraceModel int1 = interval_model(cyl.half_length, scalar_bc_for_degree(cyl.bc, 1));
        const int m = dimension(fiber);
        for (int q = 0; q <= m; ++q) {
            TraceModel acc = zero_model();
            if (q < static_cast<int>(cs.traces.size()))
                acc = sum_model(acc, product_model(cs.traces[q], int0));
            if (q >= 1 && q - 1 < static_cast<int>(cs.traces.size()))
                acc = sum_model(acc, product_model(cs.traces[q - 1], int1));
            models.push_back(acc);
        }
    }

    const std::vector<heat::SpectrumStream> spectra = form_spectrum(fiber);
    std::vector<DegreeTrace> out;
    for (std::size_t q = 0; q < models.size(); ++q) {
        DegreeTrace d;
        d.value = models[q].value;
        d.t_dt = models[q].t_dt;
        d.expansion = models[q].expansion;
        d.zero_modes = count_zero_modes(spectra[q]);
        const double fp = first_positive(spectra[q]);
        d.lambda_min_positive = std::isfinite(fp) ? fp : 0.0;
        out.push_back(std::move(d));
    }
    return out;
}

// ----- Mayer-Vietoris builders -------------------------------------------------

namespace {

complexes::MetrizedTerm term_of(int grading, const Eigen::MatrixXd& gram) {
    return {grading, gram};
}

Eigen::MatrixXd ident(int n) { return Eigen::MatrixXd::Identity(n, n); }

// [I; I] stacked restriction to a two-component boundary.
Eigen::MatrixXd stack_two(int r) {
    Eigen::MatrixXd m(2 * r, r);
    m << ident(r), ident(r);
    return m;
}

// (1/denom) [ -I  I ] difference of boundary values.
Eigen::MatrixXd difference_map(int r, double denom) {
    Eigen::MatrixXd m(r, 2 * r);
    m << -ident(r) / denom, ident(r) / denom;
    return m;
}

void check_circle_instance(const CircleFromArcs& inst) {
    if (!(inst.len1 > 0.0) || !(inst.len2 > 0.0))
        throw std::domain_error("mayer_vietoris: arc lengths must be positive");
    if (inst.rank < 1) throw std::domain_error("mayer_vietoris: rank must be positive");
    if (inst.collar < 0.0) throw std::domain_error("mayer_vietoris: collar must be nonnegative");
}

}  // namespace

complexes::MetrizedComplex mayer_vietoris(const MVInstance& instance) {
    if (std::holds_alternative<CircleFromArcs>(instance)) {
        const auto& inst = std::get<CircleFromArcs>(instance);
        check_circle_instance(inst);
        const int r = inst.rank;
        const double total = inst.len1 + inst.len2;
        const double a = inst.len1 + 2.0 * inst.collar;  // piece carrying the relative class
        const double b = inst.len2 + 2.0 * inst.collar;  // piece carrying the restriction
        // Grading labels follow the 3p rule: the relative slot of degree p
        // sits at 3p, the total space at 3p + 1, the second piece at 3p + 2.
        complexes::MetrizedComplex c;
        c.terms = {term_of(0, Eigen::MatrixXd(0, 0)),
                   term_of(1, total * ident(r)),   // H^0 of the circle
                   term_of(2, b * ident(r)),       // H^0 of the second piece
                   term_of(3, a * ident(r)),       // relative H^1 of the first piece
                   term_of(4, total * ident(r)),   // H^1 of the circle
                   term_of(5, Eigen::MatrixXd(0, 0))};
        c.differentials = {Eigen::MatrixXd(r, 0),
                           ident(r),                       // restriction of constants
                           Eigen::MatrixXd::Zero(r, r),    // connecting map vanishes
                           (a / total) * ident(r),         // extension by zero of dx classes
                           Eigen::MatrixXd(0, r)};
        return c;
    }
    const auto& inst = std::get<IntervalSplit>(instance);
    if (!(inst.len1 > 0.0) || !(inst.len2 > 0.0))
        throw std::domain_error("mayer_vietoris: subinterval lengths must be positive");
    if (inst.rank < 1) throw std::domain_error("mayer_vietoris: rank must be positive");
    const int r = inst.rank;
    if (!inst.outer_absolute) {
        // Mixed outer conditions: every cohomology vanishes; empty sequence.
        complexes::MetrizedComplex c;
        c.terms = {term_of(0, Eigen::MatrixXd(0, 0)), term_of(1, Eigen::MatrixXd(0, 0)),
                   term_of(2, Eigen::MatrixXd(0, 0))};
        c.differentials = {Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0)};
        return c;
    }
    const double total = inst.len1 + inst.len2;
    complexes::MetrizedComplex c;
    // First piece keeps its outer absolute end and is relative at the cut, so
    // it is acyclic; only the restriction of constants survives.
    c.terms = {term_of(0, Eigen::MatrixXd(0, 0)),
               term_of(1, total * ident(r)),       // H^0 of the full interval
               term_of(2, inst.len2 * ident(r)),   // H^0 of the second piece
               term_of(3, Eigen::MatrixXd(0, 0))};
    c.differentials = {Eigen::MatrixXd(r, 0), ident(r), Eigen::MatrixXd(0, r)};
    return c;
}

SequenceTriple mv_circle_triple(const CircleFromArcs& inst) {
    check_circle_instance(inst);
    if (!(inst.collar > 0.0))
        throw std::domain_error("mv_circle_triple: requires a positive collar");
    const int r = inst.rank;
    const double total = inst.len1 + inst.len2;
    const double a = inst.len1 + 2.0 * inst.collar;
    const double overlap = 2.0 * inst.collar;  // each of the two collar cylinders

    SequenceTriple triple;
    triple.h = mayer_vietoris(CircleFromArcs{inst.len1, inst.len2, r, inst.collar});

    // Pair sequence of the first piece against its collar neighborhood.
    triple.h_dd = interval_comparison_sequence(a, r, overlap);

    // Mayer-Vietoris of the covering by the two extended pieces.
    const double b = inst.len2 + 2.0 * inst.collar;
    complexes::MetrizedComplex hp;
    Eigen::MatrixXd middle_gram(2 * r, 2 * r);
    middle_gram.setZero();
    middle_gram.topLeftCorner(r, r) = a * ident(r);
    middle_gram.bottomRightCorner(r, r) = b * ident(r);
    hp.terms = {term_of(0, total * ident(r)),            // H^0 of the circle
                term_of(1, middle_gram),                 // H^0 of the two pieces
                term_of(2, overlap * ident(2 * r)),      // H^0 of the overlap collars
                term_of(3, total * ident(r)),            // H^1 of the circle
                term_of(4, Eigen::MatrixXd(0, 0))};
    Eigen::MatrixXd beta(2 * r, 2 * r);
    beta << ident(r), -ident(r), ident(r), -ident(r);
    hp.differentials = {stack_two(r), beta, difference_map(r, total), Eigen::MatrixXd(0, r)};
    triple.h_d = hp;
    return triple;
}

complexes::MetrizedComplex interval_comparison_sequence(double length, int rank,
                                                        double y_gram_scale) {
    if (!(length > 0.0) || rank < 1 || !(y_gram_scale > 0.0))
        throw std::domain_error("interval_comparison_sequence: invalid parameters");
    const int r = rank;
    complexes::MetrizedComplex c;
    c.terms = {term_of(0, Eigen::MatrixXd(0, 0)),
               term_of(1, length * ident(r)),              // H^0 of the interval
               term_of(2, y_gram_scale * ident(2 * r)),    // H^0 of the two-point boundary
               term_of(3, length * ident(r)),              // relative H^1
               term_of(4, Eigen::MatrixXd(0, 0))};
    c.differentials = {Eigen::MatrixXd(r, 0), stack_two(r), difference_map(r, length),
                       Eigen::MatrixXd(0, r)};
    return c;
}

complexes::MetrizedComplex cylinder_circle_comparison_sequence(double circle_length,
                                                               double half_length, int rank,
                                                               double y_gram_scale) {
    if (!(circle_length > 0.0) || !(half_length > 0.0) || rank < 1 || !(y_gram_scale > 0.0))
        throw std::domain_error("cylinder_circle_comparison_sequence: invalid parameters");
    const int r = rank;
    const double vol = 2.0 * half_length * circle_length;  // cylinder volume
    const double ygram = y_gram_scale * circle_length;     // per boundary circle
    complexes::MetrizedComplex c;
    c.terms = {term_of(0, Eigen::MatrixXd(0, 0)),
               term_of(1, vol * ident(r)),          // H^0 of the cylinder
               term_of(2, ygram * ident(2 * r)),    // H^0 of the two boundary circles
               term_of(3, vol * ident(r)),          // relative H^1 (du class)
               term_of(4, vol * ident(r)),          // H^1 of the cylinder (circle class)
               term_of(5, ygram * ident(2 * r)),    // H^1 of the boundary circles
               term_of(6, vol * ident(r)),          // relative H^2 (du wedge circle class)
               term_of(7, Eigen::MatrixXd(0, 0))};
    c.differentials = {Eigen::MatrixXd(r, 0),
                       stack_two(r),
                       difference_map(r, 2.0 * half_length),
                       Eigen::MatrixXd::Zero(r, r),   // du classes become exact
                       stack_two(r),
                       difference_map(r, 2.0 * half_length),
                       Eigen::MatrixXd(0, r)};
    return c;
}

}  // namespace torsionlab::models
