#pragma once

#include <span>
#include <vector>

#include "pairdeg/types.hpp"

namespace pairdeg {

/// Polynomial coefficients in ascending order: c[k] multiplies z^k.
using Coefficients = std::vector<cplx>;

/// Horner evaluation.
cplx poly_eval(std::span<const cplx> c, cplx z);

/// order-th derivative coefficients (empty when order exceeds the degree).
Coefficients poly_derivative(std::span<const cplx> c, int order = 1);

/// Index of the highest coefficient with |c_k| > threshold, -1 if none.
int poly_degree(std::span<const cplx> c, double threshold = 0.0);

/// Roots of c[0] + ... + c[d] z^d as eigenvalues of the companion matrix of
/// the monic rescaling. c.back() must be nonzero.
std::vector<cplx> companion_roots(std::span<const cplx> c);

/// Sylvester matrix of p (degree m) and q (degree n), size (m+n) x (m+n).
CMatrix sylvester_matrix(std::span<const cplx> p, std::span<const cplx> q);

/// Res(p, q) = det of the Sylvester matrix.
cplx resultant(std::span<const cplx> p, std::span<const cplx> q);

}  // namespace pairdeg
