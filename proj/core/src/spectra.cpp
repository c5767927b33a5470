#include "pairdeg/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace pairdeg {

cplx c_product(const CVector& u, const CVector& v) { return (u.array() * v.array()).sum(); }

double Spectrum::max_residual(const CMatrix& h) const {
    double worst = 0.0;
    for (Eigen::Index m = 0; m < size(); ++m) {
        const CVector u = eigenvectors.col(m);
        const double r = (h * u - eigenvalues(m) * u).norm() / u.norm();
        worst = std::max(worst, r);
    }
    return worst;
}

Spectrum eigendecompose(const CMatrix& h, cplx g) {
    if (!h.allFinite()) throw NumericFailure(fmt::format("non-finite Hamiltonian at g = {}", format_complex(g)));
    Eigen::ComplexEigenSolver<CMatrix> solver(h, true);
    if (solver.info() != Eigen::Success)
        throw NumericFailure(fmt::format("eigensolver did not converge at g = {}", format_complex(g)));

    const CVector& values = solver.eigenvalues();
    const CMatrix& vectors = solver.eigenvectors();
    const Eigen::Index n = values.size();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values(a).imag() != values(b).imag()) return values(a).imag() < values(b).imag();
        return values(a).real() < values(b).real();
    });

    Spectrum s;
    s.g = g;
    s.eigenvalues.resize(n);
    s.eigenvectors.resize(n, n);
    s.self_overlap.resize(static_cast<std::size_t>(n));
    s.self_orthogonal.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index m = 0; m < n; ++m) {
        const Eigen::Index src = order[static_cast<std::size_t>(m)];
        s.eigenvalues(m) = values(src);
        CVector v = vectors.col(src);
        v.normalize();
        s.eigenvectors.col(m) = v;
        s.self_overlap[static_cast<std::size_t>(m)] = c_product(v, v);
    }
    return s;
}

namespace {

Eigen::Index largest_component(const CVector& v) {
    Eigen::Index best = 0;
    v.cwiseAbs().maxCoeff(&best);
    return best;
}

// Sign so that the largest component has argument in (-pi/2, pi/2].
void fix_sign(CVector& v) {
    const cplx lead = v(largest_component(v));
    const bool keep = lead.real() > 0.0 || (lead.real() == 0.0 && lead.imag() > 0.0);
    if (!keep) v = -v;
}

// Phase so that the largest component is real and positive.
void fix_phase(CVector& v) {
    const cplx lead = v(largest_component(v));
    if (std::abs(lead) > 0.0) v *= std::conj(lead) / std::abs(lead);
}

}  // namespace

Spectrum c_normalize(Spectrum spectrum, double tau_c) {
    for (Eigen::Index m = 0; m < spectrum.size(); ++m) {
        const auto idx = static_cast<std::size_t>(m);
        CVector v = spectrum.eigenvectors.col(m);
        v.normalize();
        const cplx b = c_product(v, v);
        spectrum.self_overlap[idx] = b;
        if (std::abs(b) > tau_c) {
            v /= std::sqrt(b);
            fix_sign(v);
            spectrum.self_orthogonal[idx] = false;
        } else {
            fix_phase(v);
            spectrum.self_orthogonal[idx] = true;
        }
        spectrum.eigenvectors.col(m) = v;
    }
    return spectrum;
}

Spectrum c_normalize_raw(Spectrum spectrum, double floor) {
    for (Eigen::Index m = 0; m < spectrum.size(); ++m) {
        const auto idx = static_cast<std::size_t>(m);
        CVector v = spectrum.eigenvectors.col(m);
        v.normalize();
        const cplx b = c_product(v, v);
        spectrum.self_overlap[idx] = b;
        if (std::abs(b) <= floor)
            throw NumericFailure(fmt::format(
                "eigenvector {} is self-orthogonal at g = {} (|b| = {:.3g}); move further from the degeneracy", m + 1,
                format_complex(spectrum.g), std::abs(b)));
        v /= std::sqrt(b);
        fix_sign(v);
        spectrum.self_orthogonal[idx] = false;
        spectrum.eigenvectors.col(m) = v;
    }
    return spectrum;
}

Spectrum spectrum_at(const PairingHamiltonian& h, cplx g, double tau_c) {
    return c_normalize(eigendecompose(h.at(g), g), tau_c);
}

namespace {

double assignment_cost(const CVector& prev, const CVector& next, std::span<const int> perm) {
    double cost = 0.0;
    for (std::size_t m = 0; m < perm.size(); ++m)
        cost += std::abs(prev(static_cast<Eigen::Index>(m)) - next(perm[m]));
    return cost;
}

bool same_sequence(const CVector& next, std::span<const int> a, std::span<const int> b) {
    const double scale = 1.0 + next.cwiseAbs().maxCoeff();
    for (std::size_t m = 0; m < a.size(); ++m)
        if (std::abs(next(a[m]) - next(b[m])) > kAmbiguityTolerance * scale) return false;
    return true;
}

StateMatch exhaustive_match(const CVector& prev, const CVector& next) {
    const auto n = static_cast<int>(prev.size());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);

    StateMatch best{perm, assignment_cost(prev, next, perm), false};
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double c = assignment_cost(prev, next, perm);
        if (c < best.cost) best = {perm, c, false};
    }
    std::iota(perm.begin(), perm.end(), 0);
    do {
        const double c = assignment_cost(prev, next, perm);
        if (c - best.cost < kAmbiguityTolerance && !same_sequence(next, perm, best.permutation)) {
            best.ambiguous = true;
            break;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

StateMatch greedy_match(const CVector& prev, const CVector& next) {
    const auto n = static_cast<int>(prev.size());
    struct Candidate {
        double distance;
        int from, to;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) candidates.push_back({std::abs(prev(i) - next(j)), i, j});
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });

    std::vector<int> perm(static_cast<std::size_t>(n), -1);
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (const auto& c : candidates) {
        if (perm[static_cast<std::size_t>(c.from)] >= 0 || taken[static_cast<std::size_t>(c.to)]) continue;
        perm[static_cast<std::size_t>(c.from)] = c.to;
        taken[static_cast<std::size_t>(c.to)] = true;
    }

    // Pairwise-swap refinement.
    bool improved = true;
    while (improved) {
        improved = false;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
                const double before = std::abs(prev(a) - next(perm[ia])) + std::abs(prev(b) - next(perm[ib]));
                const double after = std::abs(prev(a) - next(perm[ib])) + std::abs(prev(b) - next(perm[ia]));
                if (after < before - 1e-15) {
                    std::swap(perm[ia], perm[ib]);
                    improved = true;
                }
            }
        }
    }

    StateMatch result{perm, assignment_cost(prev, next, perm), false};
    for (int a = 0; a < n && !result.ambiguous; ++a) {
        for (int b = a + 1; b < n; ++b) {
            auto swapped = perm;
            std::swap(swapped[static_cast<std::size_t>(a)], swapped[static_cast<std::size_t>(b)]);
            if (assignment_cost(prev, next, swapped) - result.cost < kAmbiguityTolerance &&
                !same_sequence(next, swapped, perm)) {
                result.ambiguous = true;
                break;
            }
        }
    }
    return result;
}

}  // namespace

StateMatch match_states(const CVector& prev, const CVector& next) {
    if (prev.size() != next.size())
        throw std::invalid_argument(
            fmt::format("match_states: dimension mismatch {} vs {}", prev.size(), next.size()));
    if (prev.size() <= 8) return exhaustive_match(prev, next);
    return greedy_match(prev, next);
}

StateMatch match_states(const Spectrum& prev, const Spectrum& next) {
    return match_states(prev.eigenvalues, next.eigenvalues);
}

Spectrum permuted(const Spectrum& spectrum, std::span<const int> perm) {
    Spectrum out = spectrum;
    for (std::size_t m = 0; m < perm.size(); ++m) {
        const auto src = static_cast<Eigen::Index>(perm[m]);
        const auto dst = static_cast<Eigen::Index>(m);
        out.eigenvalues(dst) = spectrum.eigenvalues(src);
        out.eigenvectors.col(dst) = spectrum.eigenvectors.col(src);
        out.self_overlap[m] = spectrum.self_overlap[static_cast<std::size_t>(src)];
        out.self_orthogonal[m] = spectrum.self_orthogonal[static_cast<std::size_t>(src)];
    }
    return out;
}

namespace {

struct Continued {
    Spectrum spectrum;
    CVector slope;  // dE/dg per label from the last accepted step
    bool has_slope = false;
};

// Keeps each vector on the branch closest to its predecessor: the sign for
// c-normalized vectors, the full phase for Hermitian-normalized ones.
void align_vectors(const Spectrum& prev, Spectrum& next) {
    for (Eigen::Index m = 0; m < next.size(); ++m) {
        const cplx overlap = prev.eigenvectors.col(m).dot(next.eigenvectors.col(m));
        if (next.self_orthogonal[static_cast<std::size_t>(m)]) {
            if (std::abs(overlap) > 0.0) next.eigenvectors.col(m) *= std::conj(overlap) / std::abs(overlap);
        } else if (overlap.real() < 0.0) {
            next.eigenvectors.col(m) = -next.eigenvectors.col(m);
        }
    }
}

class Continuation {
public:
    Continuation(const PairingHamiltonian& h, const ContinuationOptions& options, std::vector<ContinuationFlag>& flags)
        : h_(h), options_(options), flags_(flags) {}

    Continued step(const Continued& from, cplx target) { return advance(from, target, 0); }

private:
    Continued advance(const Continued& from, cplx target, int depth) {
        const cplx g_from = from.spectrum.g;
        Spectrum next = spectrum_at(h_, target, options_.tau_c);

        CVector reference = from.spectrum.eigenvalues;
        if (options_.predictor && from.has_slope) reference += from.slope * (target - g_from);

        const StateMatch match = match_states(reference, next.eigenvalues);
        if (match.ambiguous) {
            if (depth >= options_.max_bisections) {
                flags_.push_back({g_from, target, depth, false});
                throw NumericFailure(fmt::format("ambiguous state matching between g = {} and g = {} after {} bisections",
                                                 format_complex(g_from), format_complex(target), depth));
            }
            if (depth == 0) flags_.push_back({g_from, target, 1, true});
            else flags_.back().refinements = std::max(flags_.back().refinements, depth + 1);
            const cplx mid = 0.5 * (g_from + target);
            const Continued half = advance(from, mid, depth + 1);
            return advance(half, target, depth + 1);
        }

        Continued out;
        out.spectrum = permuted(next, match.permutation);
        align_vectors(from.spectrum, out.spectrum);
        const cplx dg = target - g_from;
        if (std::abs(dg) > 0.0) {
            out.slope = (out.spectrum.eigenvalues - from.spectrum.eigenvalues) / dg;
            out.has_slope = true;
        } else {
            out.slope = from.slope;
            out.has_slope = from.has_slope;
        }
        return out;
    }

    const PairingHamiltonian& h_;
    const ContinuationOptions& options_;
    std::vector<ContinuationFlag>& flags_;
};

CutSample to_row(const Spectrum& s) { return CutSample{s.g, s.eigenvalues, s.eigenvectors, s.self_orthogonal}; }

}  // namespace

CutTable continue_along(const PairingHamiltonian& h, std::span<const cplx> points, const ContinuationOptions& options) {
    if (points.empty()) throw std::invalid_argument("continue_along: no points");
    CutTable table;
    table.start = points.front();
    table.end = points.back();
    table.samples = static_cast<int>(points.size());

    Continuation continuation(h, options, table.flags);
    Continued current{spectrum_at(h, points.front(), options.tau_c), {}, false};
    table.rows.push_back(to_row(current.spectrum));
    for (std::size_t k = 1; k < points.size(); ++k) {
        current = continuation.step(current, points[k]);
        table.rows.push_back(to_row(current.spectrum));
    }
    return table;
}

std::vector<cplx> segment_points(cplx start, cplx end, int n) {
    if (n < 2) throw std::invalid_argument(fmt::format("a segment needs at least 2 samples, got {}", n));
    std::vector<cplx> points(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) points[static_cast<std::size_t>(k)] = start + (end - start) * (double(k) / (n - 1));
    return points;
}

CutTable spectrum_along(const PairingHamiltonian& h, cplx start, cplx end, int n, const ContinuationOptions& options) {
    const auto points = segment_points(start, end, n);
    return continue_along(h, points, options);
}

std::string cut_table_csv(const CutTable& table, const OutputMeta& meta) {
    std::string out = meta.csv_comment();
    const Eigen::Index n = table.rows.empty() ? 0 : table.rows.front().eigenvalues.size();
    out += "g_re,g_im";
    for (Eigen::Index m = 1; m <= n; ++m) out += fmt::format(",E{0}_re,E{0}_im", m);
    out += "\n";
    for (const auto& row : table.rows) {
        out += fmt::format("{:.17g},{:.17g}", row.g.real(), row.g.imag());
        for (Eigen::Index m = 0; m < n; ++m)
            out += fmt::format(",{:.17g},{:.17g}", row.eigenvalues(m).real(), row.eigenvalues(m).imag());
        out += "\n";
    }
    return out;
}

}  // namespace pairdeg
