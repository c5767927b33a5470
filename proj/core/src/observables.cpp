#include "pairdeg/observables.hpp"

#include <cmath>

#include <fmt/format.h>

#include "json.hpp"

namespace pairdeg {

EigenbasisOperator operator_in_eigenbasis(const PairingHamiltonian& h, cplx g) {
    EigenbasisOperator out;
    out.g = g;
    out.spectrum = c_normalize_raw(eigendecompose(h.at(g), g));
    out.entries = pairing_in_basis(h, g, out.spectrum.eigenvectors);
    return out;
}

CMatrix pairing_in_basis(const PairingHamiltonian& h, cplx g, const CMatrix& basis) {
    return basis.transpose() * (g * h.operators().pairing.cast<cplx>()) * basis;
}

PairingCut pairing_energy_cut(const PairingHamiltonian& h, std::span<const cplx> points, std::array<int, 2> pair) {
    const auto n = static_cast<int>(h.dimension());
    for (int m : pair)
        if (m < 0 || m >= n) throw std::invalid_argument(fmt::format("pair label {} outside 0..{}", m, n - 1));
    const CutTable table = continue_along(h, points);
    PairingCut cut;
    cut.pair = pair;
    cut.flags = table.flags;
    for (const auto& row : table.rows) {
        const CMatrix o = pairing_in_basis(h, row.g, row.eigenvectors);
        PairingCutRow r{row.g, o.diagonal(), o(pair[0], pair[0]) + o(pair[1], pair[1])};
        cut.rows.push_back(std::move(r));
    }
    return cut;
}

PairingCut pairing_energy_cut(const PairingHamiltonian& h, cplx start, cplx end, int n, std::array<int, 2> pair) {
    const auto points = segment_points(start, end, n);
    return pairing_energy_cut(h, points, pair);
}

std::string pairing_cut_csv(const PairingCut& cut, const OutputMeta& meta) {
    std::string out = meta.csv_comment();
    const Eigen::Index n = cut.rows.empty() ? 0 : cut.rows.front().diagonal.size();
    out += "g_re,g_im";
    for (Eigen::Index m = 1; m <= n; ++m) out += fmt::format(",ReO_{0}{0}", m);
    out += fmt::format(",ReO_{0}{0}+ReO_{1}{1}\n", cut.pair[0] + 1, cut.pair[1] + 1);
    for (const auto& row : cut.rows) {
        out += fmt::format("{:.17g},{:.17g}", row.g.real(), row.g.imag());
        for (Eigen::Index m = 0; m < n; ++m) out += fmt::format(",{:.17g}", row.diagonal(m).real());
        out += fmt::format(",{:.17g}\n", row.pair_sum.real());
    }
    return out;
}

PowerLawFit fit_power_law(std::span<const double> deltas, std::span<const cplx> values, double max_residual) {
    if (deltas.size() != values.size())
        throw std::invalid_argument(fmt::format("fit_power_law: {} deltas vs {} values", deltas.size(), values.size()));
    if (deltas.size() < 6)
        throw std::invalid_argument(fmt::format("fit_power_law: need at least 6 samples, got {}", deltas.size()));
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (!(deltas[k] > 0.0)) throw std::invalid_argument("fit_power_law: deltas must be positive");
        if (k > 0 && !(deltas[k] > deltas[k - 1]))
            throw std::invalid_argument("fit_power_law: deltas must be increasing");
        if (!(std::abs(values[k]) > 0.0)) throw std::invalid_argument("fit_power_law: values must be nonzero");
    }
    if (std::log10(deltas.back() / deltas.front()) < 1.5)
        throw std::invalid_argument("fit_power_law: deltas must span at least 1.5 decades");

    const auto n = static_cast<double>(deltas.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        const double x = std::log(deltas[k]), y = std::log(std::abs(values[k]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    PowerLawFit fit;
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - fit.exponent * sx) / n;
    double sq = 0.0;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        const double r = std::log(std::abs(values[k])) - (intercept + fit.exponent * std::log(deltas[k]));
        sq += r * r;
        fit.amplitude += values[k] / std::pow(deltas[k], fit.exponent);
    }
    fit.amplitude /= n;
    fit.residual = std::sqrt(sq / n);
    if (fit.residual > max_residual)
        throw NumericFailure(fmt::format("power-law fit residual {:.3g} exceeds {:.3g} (exponent {:.4f})", fit.residual,
                                         max_residual, fit.exponent));
    return fit;
}

std::vector<double> log_space(double lo, double hi, int n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_space: need 0 < lo < hi and n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log(lo), b = std::log(hi);
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

namespace {

// Value at x = 0 of the interpolating polynomial through (x_k, y_k).
cplx neville_at_zero(const std::vector<double>& x, std::vector<cplx> y) {
    const std::size_t n = x.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i)
            y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) / (x[i + level] - x[i]);
    return y[0];
}

}  // namespace

LeadingCoefficients leading_coefficients(const PairingHamiltonian& h, cplx g0, std::array<int, 2> pair,
                                         std::vector<double> deltas) {
    if (deltas.empty()) throw std::invalid_argument("leading_coefficients: no deltas");
    for (double d : deltas)
        if (!(d > 0.0)) throw std::invalid_argument("leading_coefficients: deltas must be positive");
    std::sort(deltas.begin(), deltas.end());
    const Eigen::Index n = h.dimension();

    LeadingCoefficients out;
    out.g0 = g0;
    out.pair = pair;
    out.deltas = deltas;
    out.order = Eigen::MatrixXd::Zero(n, n);
    const auto in_pair = [&](Eigen::Index m) { return m == pair[0] || m == pair[1]; };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out.order(i, j) = 0.5 * (double(in_pair(i)) + double(in_pair(j)));

    std::vector<CMatrix> scaled;
    CMatrix previous;
    for (double d : deltas) {
        Spectrum s = c_normalize_raw(eigendecompose(h.at(g0 + d), g0 + d));
        // The largest-component gauge can flip between samples; follow the
        // previous sample's sign instead so the extrapolation sees one branch.
        if (previous.size() != 0)
            for (Eigen::Index m = 0; m < n; ++m)
                if (previous.col(m).dot(s.eigenvectors.col(m)).real() < 0.0) s.eigenvectors.col(m) *= -1.0;
        previous = s.eigenvectors;
        CMatrix o = pairing_in_basis(h, g0 + d, s.eigenvectors);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) o(i, j) *= std::pow(d, out.order(i, j));
        scaled.push_back(std::move(o));
    }

    const std::vector<double>& xs = deltas;

    out.leading = CMatrix::Zero(n, n);
    out.error_estimate = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            std::vector<cplx> y;
            for (const auto& o : scaled) y.push_back(o(i, j));
            out.leading(i, j) = neville_at_zero(xs, y);
            if (deltas.size() > 1) {
                const std::vector<double> fewer(xs.begin(), xs.end() - 1);
                y.pop_back();
                out.error_estimate(i, j) = std::abs(out.leading(i, j) - neville_at_zero(fewer, y));
            } else {
                out.error_estimate(i, j) = std::numeric_limits<double>::infinity();
            }
        }
    return out;
}

CoefficientTable coefficient_extract(const PairingHamiltonian& h, cplx pseudo_dp, std::vector<double> deltas,
                                     double tolerance) {
    if (h.dimension() != 4)
        throw std::invalid_argument(
            fmt::format("coefficient extraction needs a four-state model, got dimension {}", h.dimension()));
    CoefficientTable table;
    table.raw = leading_coefficients(h, pseudo_dp, {1, 2}, std::move(deltas));
    const CMatrix& l = table.raw.leading;
    const Eigen::MatrixXd& err = table.raw.error_estimate;

    struct Entry {
        const char* name;
        int i, j;
        cplx factor;
    };
    const Entry entries[] = {
        {"a1", 1, 1, 1.0},         {"a2", 0, 0, -kI},         {"a3", 3, 3, -kI},        {"a4", 0, 3, -kI},
        {"a5", 0, 1, 1.0},         {"a6", 0, 2, 1.0},         {"a7", 3, 1, 1.0},        {"a8", 3, 2, 1.0},
        {"a1_from_O33", 2, 2, -1.0}, {"a1_from_O23", 1, 2, -kI},
    };
    for (const auto& e : entries) {
        table.values[e.name] = e.factor * l(e.i, e.j);
        table.error_estimates[e.name] = err(e.i, e.j);
        if (!(err(e.i, e.j) <= tolerance)) table.converged = false;
    }
    const auto conj_distance = [](cplx a, cplx b) {
        return std::min(std::abs(a - std::conj(b)), std::abs(a + std::conj(b)));
    };
    table.conjugacy_a5_a6 = conj_distance(table.values["a5"], table.values["a6"]);
    table.conjugacy_a7_a8 = conj_distance(table.values["a7"], table.values["a8"]);
    return table;
}

std::string coefficient_table_json(const CoefficientTable& table, const OutputMeta& meta) {
    nlohmann::ordered_json doc;
    if (!meta.empty())
        doc["meta"] = {{"tool", meta.tool}, {"version", meta.version}, {"config_hash", meta.config_hash}};
    doc["g0_re"] = table.raw.g0.real();
    doc["g0_im"] = table.raw.g0.imag();
    doc["deltas"] = table.raw.deltas;
    auto values = nlohmann::ordered_json::object();
    for (const auto& [name, v] : table.values)
        values[name] = {{"re", v.real()}, {"im", v.imag()}, {"error", table.error_estimates.at(name)}};
    doc["coefficients"] = std::move(values);
    doc["conjugacy_a5_a6"] = table.conjugacy_a5_a6;
    doc["conjugacy_a7_a8"] = table.conjugacy_a7_a8;
    doc["converged"] = table.converged;
    return doc.dump(2) + "\n";
}

}  // namespace pairdeg
