#include "pairdeg/monodromy.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "json.hpp"

namespace pairdeg {

CVector LoopTrace::phases_after(int turn) const {
    if (turn < 0 || turn > spec.loops) throw std::out_of_range(fmt::format("turn {} outside 0..{}", turn, spec.loops));
    return phases[static_cast<std::size_t>(turn) * static_cast<std::size_t>(spec.steps)];
}

namespace {

void validate(const LoopSpec& loop) {
    if (!(loop.radius > 0.0) || !std::isfinite(loop.radius))
        throw InvalidModel(fmt::format("loop radius must be positive, got {}", loop.radius));
    if (loop.steps < 64) throw InvalidModel(fmt::format("a loop needs at least 64 steps per turn, got {}", loop.steps));
    if (loop.loops < 1) throw InvalidModel(fmt::format("loop count must be at least 1, got {}", loop.loops));
    if (loop.orientation != 1 && loop.orientation != -1)
        throw InvalidModel(fmt::format("orientation must be +1 or -1, got {}", loop.orientation));
}

void check_enclosed(const LoopSpec& loop, std::span<const DegeneracyRoot> roots) {
    int inside = 0;
    const double band = 1e-3 * loop.radius;
    for (const auto& r : roots) {
        const double d = std::abs(r.g0 - loop.center);
        if (std::abs(d - loop.radius) < band)
            throw InvalidModel(fmt::format("degeneracy at g = {} lies on the loop", format_complex(r.g0)));
        if (d < loop.radius) ++inside;
    }
    if (inside > 1)
        throw InvalidModel(fmt::format("loop around {} of radius {} encloses {} degeneracies",
                                       format_complex(loop.center), loop.radius, inside));
}

}  // namespace

LoopTrace trace_loop(const PairingHamiltonian& h, const LoopSpec& loop, const LoopOptions& options) {
    validate(loop);
    check_enclosed(loop, options.known_roots);

    const int total = loop.steps * loop.loops;
    std::vector<cplx> points(static_cast<std::size_t>(total) + 1);
    std::vector<double> phi(points.size());
    for (int k = 0; k <= total; ++k) {
        phi[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * k / loop.steps;
        points[static_cast<std::size_t>(k)] =
            loop.center + std::polar(loop.radius, loop.orientation * phi[static_cast<std::size_t>(k)]);
    }

    CutTable table;
    try {
        table = continue_along(h, points, ContinuationOptions{options.tau_c, options.max_bisections, true});
    } catch (const NumericFailure& e) {
        throw NumericFailure(fmt::format("loop around {}: {}", format_complex(loop.center), e.what()));
    }

    LoopTrace trace;
    trace.spec = loop;
    trace.phi = std::move(phi);
    trace.flags = std::move(table.flags);
    const Eigen::Index n = table.rows.front().eigenvalues.size();

    CMatrix reference = table.rows.front().eigenvectors;
    for (Eigen::Index m = 0; m < n; ++m) reference.col(m).normalize();

    CVector theta = CVector::Zero(n);
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& row = table.rows[k];
        if (k > 0) {
            const auto& prev = table.rows[k - 1];
            for (Eigen::Index m = 0; m < n; ++m) {
                const cplx before = reference.col(m).dot(prev.eigenvectors.col(m));
                const cplx after = reference.col(m).dot(row.eigenvectors.col(m));
                if (before == cplx{} || after == cplx{})
                    throw NumericFailure(fmt::format("state {} lost its projection on the starting direction near "
                                                     "phi = {:.6g}",
                                                     m + 1, trace.phi[k]));
                theta(m) += -kI * std::log(after / before);
            }
        }
        trace.eigenvalues.push_back(row.eigenvalues);
        trace.eigenvectors.push_back(row.eigenvectors);
        trace.phases.push_back(theta);
    }

    const CVector& start = table.rows.front().eigenvalues;
    for (int turn = 1; turn <= loop.loops; ++turn) {
        const CVector& end = trace.eigenvalues[static_cast<std::size_t>(turn) * static_cast<std::size_t>(loop.steps)];
        trace.loop_permutations.push_back(match_states(end, start).permutation);
    }
    return trace;
}

RestorePeriods restore_count(const PairingHamiltonian& h, LoopSpec loop, int max_loops, const LoopOptions& options) {
    if (max_loops < 1) throw InvalidModel(fmt::format("max_loops must be at least 1, got {}", max_loops));
    loop.loops = max_loops;
    RestorePeriods out;
    out.trace = trace_loop(h, loop, options);
    for (int turn = 1; turn <= max_loops; ++turn) {
        if (!is_identity(out.trace.loop_permutations[static_cast<std::size_t>(turn - 1)])) continue;
        if (!out.eigenvalue_period) out.eigenvalue_period = turn;
        const CVector theta = out.trace.phases_after(turn);
        bool restored = true;
        for (Eigen::Index m = 0; m < theta.size(); ++m)
            if (distance_to_2pi_multiple(theta(m).real()) > kPhaseRestoreTolerance) restored = false;
        if (restored) {
            out.phase_period = turn;
            break;
        }
    }
    return out;
}

bool is_identity(std::span<const int> perm) {
    for (std::size_t m = 0; m < perm.size(); ++m)
        if (perm[m] != static_cast<int>(m)) return false;
    return true;
}

std::vector<int> compose(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw std::invalid_argument("compose: size mismatch");
    std::vector<int> out(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) out[m] = b[static_cast<std::size_t>(a[m])];
    return out;
}

std::string cycle_notation(std::span<const int> perm) {
    std::vector<bool> seen(perm.size(), false);
    std::string out;
    for (std::size_t start = 0; start < perm.size(); ++start) {
        if (seen[start]) continue;
        std::string cycle;
        for (std::size_t m = start; !seen[m]; m = static_cast<std::size_t>(perm[m])) {
            seen[m] = true;
            cycle += (cycle.empty() ? "" : " ") + std::to_string(m + 1);
        }
        out += "(" + cycle + ")";
    }
    return out;
}

double distance_to_2pi_multiple(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    return std::abs(x - two_pi * std::round(x / two_pi));
}

std::string loop_trace_csv(const LoopTrace& trace, const OutputMeta& meta) {
    std::string out = meta.csv_comment();
    const Eigen::Index n = trace.states();
    out += "phi";
    for (Eigen::Index m = 1; m <= n; ++m) out += fmt::format(",theta{0}_re,theta{0}_im,E{0}_re,E{0}_im", m);
    out += "\n";
    for (std::size_t k = 0; k < trace.phi.size(); ++k) {
        out += fmt::format("{:.17g}", trace.phi[k]);
        for (Eigen::Index m = 0; m < n; ++m)
            out += fmt::format(",{:.17g},{:.17g},{:.17g},{:.17g}", trace.phases[k](m).real(), trace.phases[k](m).imag(),
                               trace.eigenvalues[k](m).real(), trace.eigenvalues[k](m).imag());
        out += "\n";
    }
    return out;
}

std::string loop_summary_json(const LoopTrace& trace, const std::optional<RestorePeriods>& periods,
                              const OutputMeta& meta) {
    nlohmann::ordered_json doc;
    if (!meta.empty())
        doc["meta"] = {{"tool", meta.tool}, {"version", meta.version}, {"config_hash", meta.config_hash}};
    doc["loop"] = {{"center_re", trace.spec.center.real()}, {"center_im", trace.spec.center.imag()},
                   {"radius", trace.spec.radius},           {"steps", trace.spec.steps},
                   {"loops", trace.spec.loops},             {"orientation", trace.spec.orientation}};
    auto perms = nlohmann::ordered_json::array();
    for (const auto& p : trace.loop_permutations) perms.push_back(cycle_notation(p));
    doc["permutations"] = std::move(perms);
    auto turns = nlohmann::ordered_json::array();
    for (int turn = 1; turn <= trace.spec.loops; ++turn) {
        const CVector theta = trace.phases_after(turn);
        auto re = nlohmann::ordered_json::array(), im = nlohmann::ordered_json::array();
        for (Eigen::Index m = 0; m < theta.size(); ++m) {
            re.push_back(theta(m).real());
            im.push_back(theta(m).imag());
        }
        turns.push_back({{"turn", turn}, {"theta_re", re}, {"theta_im", im}});
    }
    doc["phases"] = std::move(turns);
    if (periods) {
        doc["eigenvalue_period"] =
            periods->eigenvalue_period ? nlohmann::ordered_json(*periods->eigenvalue_period) : nlohmann::ordered_json();
        doc["phase_period"] =
            periods->phase_period ? nlohmann::ordered_json(*periods->phase_period) : nlohmann::ordered_json();
    }
    auto flags = nlohmann::ordered_json::array();
    for (const auto& f : trace.flags)
        flags.push_back({{"from", format_complex(f.from)}, {"to", format_complex(f.to)},
                         {"refinements", f.refinements}, {"resolved", f.resolved}});
    doc["flags"] = std::move(flags);
    return doc.dump(2) + "\n";
}

}  // namespace pairdeg
