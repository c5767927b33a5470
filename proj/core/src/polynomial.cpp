#include "pairdeg/polynomial.hpp"

#include <cmath>

#include <fmt/format.h>

namespace pairdeg {

cplx poly_eval(std::span<const cplx> c, cplx z) {
    cplx acc{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Coefficients poly_derivative(std::span<const cplx> c, int order) {
    Coefficients out(c.begin(), c.end());
    for (int o = 0; o < order; ++o) {
        if (out.size() <= 1) return {};
        Coefficients next(out.size() - 1);
        for (std::size_t k = 1; k < out.size(); ++k) next[k - 1] = out[k] * double(k);
        out = std::move(next);
    }
    return out;
}

int poly_degree(std::span<const cplx> c, double threshold) {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
        if (std::abs(c[static_cast<std::size_t>(k)]) > threshold) return k;
    return -1;
}

std::vector<cplx> companion_roots(std::span<const cplx> c) {
    const int d = static_cast<int>(c.size()) - 1;
    if (d < 1) return {};
    const cplx lead = c.back();
    if (lead == cplx{}) throw std::invalid_argument("companion_roots: leading coefficient is zero");
    CMatrix companion = CMatrix::Zero(d, d);
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -c[static_cast<std::size_t>(i)] / lead;
    Eigen::ComplexEigenSolver<CMatrix> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericFailure("companion matrix eigensolver did not converge");
    const CVector& values = solver.eigenvalues();
    return {values.data(), values.data() + values.size()};
}

CMatrix sylvester_matrix(std::span<const cplx> p, std::span<const cplx> q) {
    const int m = static_cast<int>(p.size()) - 1;
    const int n = static_cast<int>(q.size()) - 1;
    if (m < 0 || n < 0) throw std::invalid_argument("sylvester_matrix: empty polynomial");
    const int size = m + n;
    CMatrix s = CMatrix::Zero(size, size);
    // Rows hold descending coefficients, shifted one column per row.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j) s(i, i + j) = p[static_cast<std::size_t>(m - j)];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) s(n + i, i + j) = q[static_cast<std::size_t>(n - j)];
    return s;
}

cplx resultant(std::span<const cplx> p, std::span<const cplx> q) {
    const CMatrix s = sylvester_matrix(p, q);
    if (s.rows() == 0) return {1.0, 0.0};
    return s.fullPivLu().determinant();
}

}  // namespace pairdeg
