#include "pairdeg/discriminant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "json.hpp"
#include "pairdeg/parallel.hpp"
#include "pairdeg/spectra.hpp"

namespace pairdeg {

CharPoly char_poly(const CMatrix& h) {
    const Eigen::Index n = h.rows();
    if (h.cols() != n) throw std::invalid_argument("char_poly: matrix is not square");
    Coefficients c(static_cast<std::size_t>(n) + 1, cplx{});
    c[static_cast<std::size_t>(n)] = 1.0;
    CMatrix m = CMatrix::Zero(n, n);
    const CMatrix identity = CMatrix::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = h * m + c[static_cast<std::size_t>(n - k + 1)] * identity;
        c[static_cast<std::size_t>(n - k)] = -(h * m).trace() / double(k);
    }
    return CharPoly{std::move(c)};
}

cplx discriminant_from_eigenvalues(const CVector& eigenvalues) {
    cplx d{1.0, 0.0};
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        for (Eigen::Index j = i + 1; j < eigenvalues.size(); ++j) {
            const cplx gap = eigenvalues(i) - eigenvalues(j);
            d *= gap * gap;
        }
    return d;
}

cplx discriminant_from_char_poly(const CharPoly& p) {
    const int n = p.degree();
    if (n <= 1) return {1.0, 0.0};
    const Coefficients dp = poly_derivative(p.coefficients);
    const cplx res = resultant(p.coefficients, dp);
    const long pairs = static_cast<long>(n) * (n - 1) / 2;
    const double sign = (pairs % 2 == 0) ? 1.0 : -1.0;
    return sign * res / p.coefficients.back();
}

cplx discriminant_at(const PairingHamiltonian& h, cplx g, DiscriminantRoute route) {
    const CMatrix m = h.at(g);
    if (route == DiscriminantRoute::Resultant) return discriminant_from_char_poly(char_poly(m));
    Eigen::ComplexEigenSolver<CMatrix> solver(m, false);
    if (solver.info() != Eigen::Success)
        throw NumericFailure(fmt::format("eigensolver did not converge at g = {}", format_complex(g)));
    return discriminant_from_eigenvalues(solver.eigenvalues());
}

cplx DiscriminantPoly::derivative(cplx g, int order) const {
    const Coefficients d = poly_derivative(coefficients, order);
    return d.empty() ? cplx{} : poly_eval(d, g);
}

double DiscriminantPoly::noise_at(cplx g, int order) const {
    // Each scaled coefficient carries an error of about `noise`, i.e. the
    // unscaled c_k carries noise / radius^k.
    const double z = std::abs(g);
    double total = 0.0;
    for (int k = order; k <= max_degree; ++k) {
        double falling = 1.0;
        for (int i = 0; i < order; ++i) falling *= double(k - i);
        total += falling * std::pow(z, k - order) / std::pow(radius, k);
    }
    return noise * total;
}

double DiscriminantPoly::scale() const {
    double total = 0.0;
    for (std::size_t k = 0; k < coefficients.size(); ++k)
        total += std::abs(coefficients[k]) * std::pow(radius, static_cast<double>(k));
    return total;
}

namespace {

int default_samples(int max_degree) {
    int n = 16;
    while (n < 4 * (max_degree + 1)) n *= 2;
    return n;
}

std::vector<cplx> sample_circle(const PairingHamiltonian& h, double radius, int samples, double offset,
                                int threads) {
    std::vector<cplx> values(static_cast<std::size_t>(samples));
    parallel_for(values.size(), threads, [&](std::size_t j) {
        const double angle = 2.0 * std::numbers::pi * (double(j) + offset) / samples;
        values[j] = discriminant_at(h, std::polar(radius, angle));
    });
    return values;
}

std::optional<DiscriminantPoly> reconstruct(const PairingHamiltonian& h, int max_degree, double radius, int samples,
                                            const DiscriminantOptions& options) {
    const auto values = sample_circle(h, radius, samples, 0.0, options.threads);

    // Discrete Fourier inversion: scaled[k] = c_k radius^k.
    std::vector<cplx> scaled(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        cplx acc{};
        for (int j = 0; j < samples; ++j)
            acc += values[static_cast<std::size_t>(j)] *
                   std::polar(1.0, -2.0 * std::numbers::pi * double((long(j) * k) % samples) / samples);
        scaled[static_cast<std::size_t>(k)] = acc / double(samples);
    }

    DiscriminantPoly poly;
    poly.max_degree = max_degree;
    poly.radius = radius;
    poly.samples = samples;
    poly.noise = 0.0;
    for (int k = max_degree + 1; k < samples; ++k)
        poly.noise = std::max(poly.noise, std::abs(scaled[static_cast<std::size_t>(k)]));
    poly.coefficients.resize(static_cast<std::size_t>(max_degree) + 1);
    double largest = 0.0;
    for (int k = 0; k <= max_degree; ++k) {
        poly.coefficients[static_cast<std::size_t>(k)] = scaled[static_cast<std::size_t>(k)] / std::pow(radius, k);
        largest = std::max(largest, std::abs(scaled[static_cast<std::size_t>(k)]));
    }
    const double floor = 1e3 * std::max(poly.noise, 1e-15 * largest);
    poly.degree = -1;
    for (int k = max_degree; k >= 0; --k)
        if (std::abs(scaled[static_cast<std::size_t>(k)]) > floor) {
            poly.degree = k;
            break;
        }

    const auto held_out = sample_circle(h, radius, samples, 0.5, options.threads);
    double worst = 0.0, size = 0.0;
    for (int j = 0; j < samples; ++j) {
        const cplx g = std::polar(radius, 2.0 * std::numbers::pi * (j + 0.5) / samples);
        worst = std::max(worst, std::abs(poly(g) - held_out[static_cast<std::size_t>(j)]));
        size = std::max(size, std::abs(held_out[static_cast<std::size_t>(j)]));
    }
    poly.holdout_residual = size > 0.0 ? worst / size : worst;
    if (poly.holdout_residual > options.holdout_tolerance) return std::nullopt;
    return poly;
}

}  // namespace

DiscriminantPoly discriminant_poly(const PairingHamiltonian& h, const DiscriminantOptions& options) {
    const auto n = static_cast<int>(h.dimension());
    const int max_degree = n * (n - 1);
    if (max_degree == 0) {
        DiscriminantPoly constant;
        constant.coefficients = {cplx{1.0, 0.0}};
        constant.radius = options.radius;
        return constant;
    }
    if (!(options.radius > 0.0)) throw std::invalid_argument("discriminant_poly: radius must be positive");
    const int samples = options.samples > 0 ? options.samples : default_samples(max_degree);
    if (samples <= max_degree)
        throw std::invalid_argument(fmt::format("discriminant_poly: need more than {} samples", max_degree));

    double last_residual = 0.0;
    for (const double radius : {options.radius, 2.0 * options.radius, 0.5 * options.radius}) {
        if (auto poly = reconstruct(h, max_degree, radius, samples, options)) return *poly;
        last_residual = reconstruct(h, max_degree, radius, samples,
                                    DiscriminantOptions{radius, samples, 1e300, options.threads})
                            ->holdout_residual;
    }
    throw NumericFailure(fmt::format(
        "discriminant interpolation is ill-conditioned (held-out residual {:.3g} > {:.3g})", last_residual,
        options.holdout_tolerance));
}

namespace {

// Newton on f = poly^(order) using f' = poly^(order+1); keeps the best iterate.
cplx newton(const Coefficients& f, const Coefficients& df, cplx z, int max_iter = 80) {
    double best = std::abs(poly_eval(f, z));
    for (int it = 0; it < max_iter; ++it) {
        const cplx slope = poly_eval(df, z);
        if (slope == cplx{}) break;
        const cplx step = poly_eval(f, z) / slope;
        const cplx candidate = z - step;
        const double value = std::abs(poly_eval(f, candidate));
        if (!(value <= best) && std::abs(step) > 1e-14 * std::max(1.0, std::abs(z))) {
            // Damped retry once before giving up on this root.
            const cplx half = z - 0.5 * step;
            const double half_value = std::abs(poly_eval(f, half));
            if (!(half_value < best)) break;
            z = half;
            best = half_value;
            continue;
        }
        z = candidate;
        best = std::min(best, value);
        if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

std::array<int, 2> closest_pair(const CVector& e) {
    std::array<int, 2> best{0, 1};
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < e.size(); ++i)
        for (Eigen::Index j = i + 1; j < e.size(); ++j)
            if (std::abs(e(i) - e(j)) < gap) {
                gap = std::abs(e(i) - e(j));
                best = {static_cast<int>(i), static_cast<int>(j)};
            }
    return best;
}

// Union-find over root indices.
struct Clusters {
    std::vector<int> parent;
    explicit Clusters(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)] =
                                                             parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        return i;
    }
    void join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

}  // namespace

std::vector<DegeneracyRoot> find_degeneracies(const PairingHamiltonian& h, const RootOptions& options) {
    return find_degeneracies(h, discriminant_poly(h, options.poly), options);
}

std::vector<DegeneracyRoot> find_degeneracies(const PairingHamiltonian& h, const DiscriminantPoly& poly,
                                              const RootOptions& options) {
    if (poly.degree <= 0) return {};
    const double merge_radius = options.cluster_radius > 0.0 ? options.cluster_radius : 1e-6 * poly.radius;
    const double candidate_radius =
        std::max(merge_radius, options.candidate_radius > 0.0 ? options.candidate_radius : 1e-3 * poly.radius);

    const Coefficients c(poly.coefficients.begin(), poly.coefficients.begin() + poly.degree + 1);
    const Coefficients dc = poly_derivative(c);
    std::vector<cplx> roots = companion_roots(c);
    for (auto& r : roots) r = newton(c, dc, r);

    Clusters clusters(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < candidate_radius) clusters.join(int(i), int(j));

    std::vector<std::vector<std::size_t>> groups(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) groups[static_cast<std::size_t>(clusters.find(int(i)))].push_back(i);

    struct Found {
        cplx g;
        int multiplicity;
    };
    std::vector<Found> found;
    for (const auto& group : groups) {
        if (group.empty()) continue;
        const int m = static_cast<int>(group.size());
        if (m == 1) {
            found.push_back({roots[group.front()], 1});
            continue;
        }
        cplx centre{};
        for (auto i : group) centre += roots[i];
        centre /= double(m);

        double spread = 0.0;
        for (auto i : group) spread = std::max(spread, std::abs(roots[i] - centre));

        // A multiple root of D is a simple root of D^(m-1); the numerical gcd
        // test asks whether the lower derivatives vanish there within noise.
        const Coefficients fm = poly_derivative(c, m - 1);
        const Coefficients dfm = poly_derivative(c, m);
        const cplx z = newton(fm, dfm, centre);
        bool multiple = spread < merge_radius;
        if (!multiple) {
            multiple = true;
            for (auto i : group)
                if (std::abs(roots[i] - z) > candidate_radius) multiple = false;
            for (int j = 0; multiple && j < m - 1; ++j)
                if (std::abs(poly.derivative(z, j)) > options.gcd_tolerance * poly.noise_at(z, j)) multiple = false;
        }
        if (multiple) {
            found.push_back({z, m});
        } else {
            for (auto i : group) found.push_back({roots[i], 1});
        }
    }

    const double tolerance = 1e-10 * poly.scale();
    std::vector<DegeneracyRoot> out;
    out.reserve(found.size());
    for (const auto& f : found) {
        DegeneracyRoot root;
        root.g0 = f.g;
        root.multiplicity = f.multiplicity;
        root.residual = std::abs(poly(f.g));
        root.converged = root.residual <= tolerance;
        root.involved_pair = closest_pair(eigendecompose(h.at(f.g), f.g).eigenvalues);
        out.push_back(root);
    }
    std::sort(out.begin(), out.end(), [](const DegeneracyRoot& a, const DegeneracyRoot& b) {
        if (a.g0.imag() != b.g0.imag()) return a.g0.imag() < b.g0.imag();
        return a.g0.real() < b.g0.real();
    });
    return out;
}

cplx Heatmap::point(int ix, int iy) const {
    const double re = nx > 1 ? re_min + (re_max - re_min) * ix / (nx - 1) : re_min;
    const double im = ny > 1 ? im_min + (im_max - im_min) * iy / (ny - 1) : im_min;
    return {re, im};
}

Heatmap discriminant_heatmap(const PairingHamiltonian& h, double re_min, double re_max, double im_min, double im_max,
                             int nx, int ny, int threads) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("heatmap grid must have at least one point per axis");
    Heatmap map{re_min, re_max, im_min, im_max, nx, ny, {}};
    map.values.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    parallel_for(static_cast<std::size_t>(ny), threads, [&](std::size_t iy) {
        for (int ix = 0; ix < nx; ++ix)
            map.values[iy * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix)] =
                std::abs(discriminant_at(h, map.point(ix, static_cast<int>(iy))));
    });
    return map;
}

namespace {

nlohmann::ordered_json root_json(const DegeneracyRoot& r) {
    nlohmann::ordered_json j;
    j["g_re"] = r.g0.real();
    j["g_im"] = r.g0.imag();
    j["multiplicity"] = r.multiplicity;
    j["residual"] = r.residual;
    j["pair"] = {r.involved_pair[0], r.involved_pair[1]};
    return j;
}

}  // namespace

std::string degeneracy_roots_json(std::span<const DegeneracyRoot> roots, const OutputMeta& meta) {
    auto list = nlohmann::ordered_json::array();
    for (const auto& r : roots) list.push_back(root_json(r));
    if (meta.empty()) return list.dump(2) + "\n";
    nlohmann::ordered_json doc;
    doc["meta"] = {{"tool", meta.tool}, {"version", meta.version}, {"config_hash", meta.config_hash}};
    doc["degeneracies"] = std::move(list);
    return doc.dump(2) + "\n";
}

}  // namespace pairdeg
