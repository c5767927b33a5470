#include "pairdeg/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "json.hpp"
#include "pairdeg/parallel.hpp"

namespace pairdeg {

std::string to_string(DegeneracyKind kind) {
    switch (kind) {
        case DegeneracyKind::EP: return "EP";
        case DegeneracyKind::DP: return "DP";
        case DegeneracyKind::PseudoDP: return "PSEUDO_DP";
        case DegeneracyKind::Unresolved: return "UNRESOLVED";
    }
    return "UNRESOLVED";
}

namespace {

struct NullSpace {
    int dimension = 0;
    double coalescence = 0.0;
};

NullSpace null_space(const CMatrix& hg, cplx e0, double tolerance) {
    const Eigen::Index n = hg.rows();
    const CMatrix shifted = hg - e0 * CMatrix::Identity(n, n);
    Eigen::JacobiSVD<CMatrix> svd(shifted, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double cutoff = tolerance * hg.norm();
    int k = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) < cutoff) ++k;
    // Always look at least at the weakest direction.
    const int used = std::max(k, 1);
    const CMatrix v = svd.matrixV().rightCols(used);
    NullSpace out;
    out.dimension = k;
    if (used == 1) {
        out.coalescence = std::abs((v.col(0).transpose() * v.col(0))(0, 0));
    } else {
        const CMatrix gram = v.transpose() * v;
        Eigen::JacobiSVD<CMatrix> gsvd(gram);
        out.coalescence = gsvd.singularValues()(gsvd.singularValues().size() - 1);
    }
    return out;
}

double loop_radius_for(const DegeneracyRoot& root, std::span<const DegeneracyRoot> all, double radius) {
    for (const auto& other : all) {
        const double d = std::abs(other.g0 - root.g0);
        if (d > 0.0) radius = std::min(radius, 0.5 * d);
    }
    return radius;
}

}  // namespace

DegeneracyPoint classify(const PairingHamiltonian& h, const DegeneracyRoot& root,
                         std::span<const DegeneracyRoot> all_roots, const AtlasOptions& options) {
    DegeneracyPoint point;
    point.root = root;

    const CMatrix hg = h.at(root.g0);
    const Spectrum s = eigendecompose(hg, root.g0);
    const auto [p, q] = root.involved_pair;
    const cplx e0 = 0.5 * (s.eigenvalues(p) + s.eigenvalues(q));
    const NullSpace ns = null_space(hg, e0, options.null_tolerance);
    point.coalescence = ns.coalescence;
    point.geometric_multiplicity = std::max(ns.dimension, 1);
    const bool coalescing = ns.coalescence <= options.tau_c;

    const bool want_loop = root.multiplicity >= 2 || options.loops_for_simple_roots;
    if (want_loop) {
        LoopSpec loop;
        loop.center = root.g0;
        loop.radius = loop_radius_for(root, all_roots, options.loop_radius);
        loop.steps = options.loop_steps;
        try {
            const LoopTrace trace = trace_loop(h, loop, LoopOptions{options.tau_c, 12, all_roots});
            MonodromySummary summary;
            summary.permutation = trace.single_loop_permutation();
            summary.radius = loop.radius;
            const CVector theta = trace.phases_after(1);
            for (Eigen::Index m = 0; m < theta.size(); ++m) summary.phase_shift.push_back(theta(m).real());
            point.monodromy = std::move(summary);
        } catch (const std::exception& e) {
            point.diagnostics = fmt::format("monodromy loop failed: {}", e.what());
        }
    }

    if (root.multiplicity == 1) {
        point.kind = coalescing ? DegeneracyKind::EP : DegeneracyKind::Unresolved;
        if (!coalescing)
            point.diagnostics = fmt::format("simple root without eigenvector coalescence ({:.3g})", ns.coalescence);
    } else if (root.multiplicity == 2) {
        if (!coalescing) {
            point.kind = DegeneracyKind::DP;
        } else if (point.monodromy && is_identity(point.monodromy->permutation)) {
            point.kind = DegeneracyKind::PseudoDP;
        } else {
            point.kind = DegeneracyKind::Unresolved;
            if (point.diagnostics.empty())
                point.diagnostics = fmt::format("double root with coalescing eigenvectors exchanges states {}",
                                                cycle_notation(point.monodromy->permutation));
        }
    } else {
        point.kind = DegeneracyKind::Unresolved;
        point.diagnostics = fmt::format("root of multiplicity {}", root.multiplicity);
    }
    if (!root.converged) {
        if (!point.diagnostics.empty()) point.diagnostics += "; ";
        point.diagnostics += fmt::format("root residual {:.3g} did not converge", root.residual);
    }
    return point;
}

std::vector<DegeneracyPoint> build_atlas(const PairingHamiltonian& h, const AtlasOptions& options) {
    const auto roots = find_degeneracies(h, options.roots);
    std::vector<DegeneracyPoint> points(roots.size());
    parallel_for(roots.size(), options.roots.poly.threads,
                 [&](std::size_t i) { points[i] = classify(h, roots[i], roots, options); });
    return points;
}

std::vector<cplx> reduced_pair_discriminant_roots(const PairingHamiltonian& h, cplx reference,
                                                  std::array<int, 2> pair) {
    const Spectrum s = c_normalize_raw(eigendecompose(h.at(reference), reference));
    const CMatrix& u = s.eigenvectors;
    const CMatrix a = u.transpose() * h.operators().single_particle.cast<cplx>() * u;
    const CMatrix b = u.transpose() * h.coupling().cast<cplx>() * u;
    const auto [p, q] = pair;
    const cplx da = a(p, p) - a(q, q), db = b(p, p) - b(q, q);
    const cplx oa = a(p, q), ob = b(p, q);
    Coefficients c{da * da + 4.0 * oa * oa, 2.0 * da * db + 8.0 * oa * ob, db * db + 4.0 * ob * ob};
    const double size = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]);
    while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * size) c.pop_back();
    if (c.size() <= 1) return {};
    return companion_roots(c);
}

// ---------------------------------------------------------------------------
// gamma sweep

namespace {

std::vector<cplx> expanded(const std::vector<DegeneracyRoot>& roots) {
    std::vector<cplx> out;
    for (const auto& r : roots)
        for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.g0);
    return out;
}

std::vector<cplx> expanded(const std::vector<DegeneracyPoint>& points) {
    std::vector<cplx> out;
    for (const auto& p : points)
        for (int k = 0; k < p.root.multiplicity; ++k) out.push_back(p.root.g0);
    return out;
}

// link[i] = index in `prev` nearest to cur[i], unique, closest pairs first.
std::vector<int> nearest_link(const std::vector<cplx>& prev, const std::vector<cplx>& cur, double ambiguity,
                              bool& ambiguous) {
    struct Candidate {
        double d;
        int i, j;
    };
    std::vector<Candidate> all;
    for (std::size_t i = 0; i < cur.size(); ++i)
        for (std::size_t j = 0; j < prev.size(); ++j) all.push_back({std::abs(cur[i] - prev[j]), int(i), int(j)});
    std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.d < b.d; });
    std::vector<int> link(cur.size(), -1);
    std::vector<bool> taken(prev.size(), false);
    for (const auto& c : all) {
        if (link[static_cast<std::size_t>(c.i)] >= 0 || taken[static_cast<std::size_t>(c.j)]) continue;
        link[static_cast<std::size_t>(c.i)] = c.j;
        taken[static_cast<std::size_t>(c.j)] = true;
    }
    ambiguous = false;
    for (std::size_t i = 0; i < cur.size(); ++i) {
        if (link[i] < 0) continue;
        const double best = std::abs(cur[i] - prev[static_cast<std::size_t>(link[i])]);
        for (std::size_t j = 0; j < prev.size(); ++j)
            if (int(j) != link[i] && prev[j] != prev[static_cast<std::size_t>(link[i])] &&
                std::abs(cur[i] - prev[j]) - best < ambiguity)
                ambiguous = true;
    }
    return link;
}

struct Pair {
    cplx p, q;
    cplx s() const { return (p - q) * (p - q); }
    cplx mid() const { return 0.5 * (p + q); }
    double separation() const { return std::abs(p - q); }
};

// The two roots continuing (p, q) best.
Pair follow(const std::vector<cplx>& roots, const Pair& from) {
    Pair best = from;
    double cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (i == j) continue;
            const double c = std::abs(roots[i] - from.p) + std::abs(roots[j] - from.q);
            if (c < cost) {
                cost = c;
                best = {roots[i], roots[j]};
            }
        }
    return best;
}

}  // namespace

GammaTrajectory sweep_gamma(const ModelSpec& model, double gamma_min, double gamma_max, int steps,
                            const SweepOptions& options) {
    if (steps < 2) throw InvalidModel(fmt::format("a gamma sweep needs at least 2 samples, got {}", steps));
    if (!(gamma_max > gamma_min)) throw InvalidModel("gamma_max must exceed gamma_min");
    model.validate();
    const PairingHamiltonian base(model);

    GammaTrajectory out;
    out.samples.resize(static_cast<std::size_t>(steps));
    AtlasOptions atlas = options.atlas;
    atlas.roots.poly.threads = 1;
    parallel_for(out.samples.size(), options.threads, [&](std::size_t k) {
        const double gamma = gamma_min + (gamma_max - gamma_min) * double(k) / (steps - 1);
        out.samples[k].gamma = gamma;
        out.samples[k].points = build_atlas(base.with_gamma(gamma), atlas);
    });

    for (std::size_t k = 0; k < out.samples.size(); ++k) {
        auto& sample = out.samples[k];
        if (k == 0) {
            sample.link.assign(sample.points.size(), -1);
            continue;
        }
        std::vector<cplx> prev, cur;
        for (const auto& p : out.samples[k - 1].points) prev.push_back(p.root.g0);
        for (const auto& p : sample.points) cur.push_back(p.root.g0);
        bool ambiguous = false;
        sample.link = nearest_link(prev, cur, options.link_ambiguity, ambiguous);
        if (ambiguous) out.flags.push_back(fmt::format("ambiguous root linking at gamma = {:.10g}", sample.gamma));
    }

    auto roots_at = [&](double gamma) { return expanded(find_degeneracies(base.with_gamma(gamma), atlas.roots)); };

    for (std::size_t k = 0; k + 1 < out.samples.size(); ++k) {
        const auto a = expanded(out.samples[k].points);
        const auto b = expanded(out.samples[k + 1].points);
        if (a.size() != b.size()) {
            out.flags.push_back(fmt::format("root count changes between gamma = {:.10g} and {:.10g}",
                                            out.samples[k].gamma, out.samples[k + 1].gamma));
            continue;
        }
        bool ambiguous = false;
        const auto link = nearest_link(a, b, options.link_ambiguity, ambiguous);
        std::vector<int> back(a.size(), -1);
        for (std::size_t i = 0; i < b.size(); ++i)
            if (link[i] >= 0) back[static_cast<std::size_t>(link[i])] = int(i);

        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = i + 1; j < a.size(); ++j) {
                if (back[i] < 0 || back[j] < 0) continue;
                Pair before{a[i], a[j]};
                const Pair after{b[static_cast<std::size_t>(back[i])], b[static_cast<std::size_t>(back[j])]};
                const bool merged_a = before.separation() < options.merge_radius;
                const bool merged_b = after.separation() < options.merge_radius;
                if (merged_a && merged_b) continue;
                const bool turned = !merged_a && !merged_b && (after.s() * std::conj(before.s())).real() < 0.0;
                if (!turned && !merged_a && !merged_b) continue;

                double lo = out.samples[k].gamma, hi = out.samples[k + 1].gamma;
                Pair closest = merged_a ? before : after;
                double closest_gamma = merged_a ? lo : hi;
                if (!merged_a && !merged_b) {
                    Pair at_lo = before;
                    for (int it = 0; it < options.max_bisections && hi - lo > options.gamma_tolerance; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const Pair m = follow(roots_at(mid), at_lo);
                        if (m.separation() < closest.separation()) {
                            closest = m;
                            closest_gamma = mid;
                        }
                        if (m.separation() == 0.0) break;
                        if ((m.s() * std::conj(at_lo.s())).real() < 0.0) {
                            hi = mid;
                        } else {
                            lo = mid;
                            at_lo = m;
                        }
                    }
                }
                if (closest.separation() >= options.merge_radius) continue;
                CoalescenceEvent event{closest_gamma, closest.mid(), closest.separation(), int(k), int(k) + 1};
                const bool duplicate = std::any_of(out.events.begin(), out.events.end(), [&](const CoalescenceEvent& e) {
                    return std::abs(e.gamma - event.gamma) < std::max(1e-8, 10 * options.gamma_tolerance) &&
                           std::abs(e.g - event.g) < options.merge_radius;
                });
                if (!duplicate) out.events.push_back(event);
            }
        }
    }
    std::sort(out.events.begin(), out.events.end(), [](const CoalescenceEvent& x, const CoalescenceEvent& y) {
        if (x.gamma != y.gamma) return x.gamma < y.gamma;
        if (x.g.imag() != y.g.imag()) return x.g.imag() < y.g.imag();
        return x.g.real() < y.g.real();
    });
    return out;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

using ojson = nlohmann::ordered_json;

ojson meta_json(const OutputMeta& meta) {
    return {{"tool", meta.tool}, {"version", meta.version}, {"config_hash", meta.config_hash}};
}

ojson point_json(const DegeneracyPoint& p) {
    ojson j;
    j["g_re"] = p.root.g0.real();
    j["g_im"] = p.root.g0.imag();
    j["multiplicity"] = p.root.multiplicity;
    j["residual"] = p.root.residual;
    j["converged"] = p.root.converged;
    j["pair"] = {p.root.involved_pair[0], p.root.involved_pair[1]};
    j["kind"] = to_string(p.kind);
    j["coalescence"] = p.coalescence;
    j["geometric_multiplicity"] = p.geometric_multiplicity;
    if (p.monodromy) {
        j["monodromy"] = {{"permutation", cycle_notation(p.monodromy->permutation)},
                          {"phase_shift", p.monodromy->phase_shift},
                          {"radius", p.monodromy->radius}};
    }
    if (!p.diagnostics.empty()) j["diagnostics"] = p.diagnostics;
    return j;
}

std::string wrap(ojson payload, const char* key, const OutputMeta& meta) {
    if (meta.empty()) return payload.dump(2) + "\n";
    ojson doc;
    doc["meta"] = meta_json(meta);
    doc[key] = std::move(payload);
    return doc.dump(2) + "\n";
}

}  // namespace

std::string atlas_json(std::span<const DegeneracyPoint> points, const OutputMeta& meta) {
    auto list = ojson::array();
    for (const auto& p : points) list.push_back(point_json(p));
    return wrap(std::move(list), "degeneracies", meta);
}

std::string trajectory_csv(const GammaTrajectory& trajectory, const OutputMeta& meta) {
    std::string out = meta.csv_comment();
    out += "gamma,g_re,g_im,kind\n";
    for (const auto& s : trajectory.samples)
        for (const auto& p : s.points)
            out += fmt::format("{:.17g},{:.17g},{:.17g},{}\n", s.gamma, p.root.g0.real(), p.root.g0.imag(),
                               to_string(p.kind));
    return out;
}

std::string trajectory_json(const GammaTrajectory& trajectory, const OutputMeta& meta) {
    auto samples = ojson::array();
    for (const auto& s : trajectory.samples) {
        auto pts = ojson::array();
        for (const auto& p : s.points) pts.push_back(point_json(p));
        samples.push_back({{"gamma", s.gamma}, {"points", std::move(pts)}, {"link", s.link}});
    }
    ojson body{{"samples", std::move(samples)}, {"flags", trajectory.flags}};
    if (meta.empty()) return body.dump(2) + "\n";
    ojson doc;
    doc["meta"] = meta_json(meta);
    doc["samples"] = std::move(body["samples"]);
    doc["flags"] = std::move(body["flags"]);
    return doc.dump(2) + "\n";
}

std::string events_json(const GammaTrajectory& trajectory, const OutputMeta& meta) {
    auto list = ojson::array();
    for (const auto& e : trajectory.events)
        list.push_back({{"gamma", e.gamma},
                        {"g_re", e.g.real()},
                        {"g_im", e.g.imag()},
                        {"separation", e.separation},
                        {"sample_before", e.sample_before},
                        {"sample_after", e.sample_after}});
    return wrap(std::move(list), "events", meta);
}

}  // namespace pairdeg
