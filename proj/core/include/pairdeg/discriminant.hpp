#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pairdeg/pairing_model.hpp"
#include "pairdeg/polynomial.hpp"

namespace pairdeg {

/// Monic characteristic polynomial det(E*I - H), ascending coefficients.
struct CharPoly {
    Coefficients coefficients;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    cplx operator()(cplx e) const { return poly_eval(coefficients, e); }
};

/// Faddeev-LeVerrier recurrence; only traces, products and integer divisions.
CharPoly char_poly(const CMatrix& h);

/// prod_{m<m'} (E_m - E_m')^2.
cplx discriminant_from_eigenvalues(const CVector& eigenvalues);

/// (-1)^{n(n-1)/2} Res(p, p') for monic p; equals the eigenvalue product.
cplx discriminant_from_char_poly(const CharPoly& p);

enum class DiscriminantRoute { EigenvalueProduct, Resultant };

/// D(g) of the model at one coupling, by either route.
cplx discriminant_at(const PairingHamiltonian& h, cplx g,
                     DiscriminantRoute route = DiscriminantRoute::EigenvalueProduct);

/// D(g) as an explicit polynomial in g.
///
/// Every entry of H(g) is affine in g, so D has degree at most n(n-1). The
/// coefficients come from a discrete Fourier inversion of D sampled on the
/// circle |g| = radius. Fourier modes above n(n-1) must vanish; their largest
/// magnitude is kept as `noise`, the absolute error scale of the scaled
/// coefficients c_k * radius^k.
struct DiscriminantPoly {
    Coefficients coefficients;
    int max_degree = 0;
    int degree = 0;
    double radius = 0.5;
    double noise = 0.0;
    int samples = 0;
    /// max |poly - D| / max |D| on the held-out half-step circle points.
    double holdout_residual = 0.0;

    cplx operator()(cplx g) const { return poly_eval(coefficients, g); }
    cplx derivative(cplx g, int order = 1) const;
    /// Propagated coefficient noise for the order-th derivative at g.
    double noise_at(cplx g, int order = 0) const;
    /// sum_k |c_k| radius^k, the size of D on the interpolation circle.
    double scale() const;
};

struct DiscriminantOptions {
    double radius = 0.5;
    /// 0 selects the smallest power of two >= 4 (n(n-1) + 1), at least 16.
    int samples = 0;
    double holdout_tolerance = 1e-6;
    int threads = 1;
};

/// Throws NumericFailure when the held-out check fails at radius, 2*radius
/// and radius/2.
DiscriminantPoly discriminant_poly(const PairingHamiltonian& h, const DiscriminantOptions& options = {});

struct DegeneracyRoot {
    cplx g0{};
    int multiplicity = 1;
    /// |D(g0)| from the reconstructed polynomial.
    double residual = 0.0;
    /// residual <= 1e-10 * DiscriminantPoly::scale(); false raises the flag.
    bool converged = true;
    /// Canonical-order indices of the two closest eigenvalues at g0.
    std::array<int, 2> involved_pair{0, 1};
};

struct RootOptions {
    DiscriminantOptions poly;
    /// Roots closer than this after polishing are merged outright.
    /// Non-positive selects 1e-6 * radius.
    double cluster_radius = 0.0;
    /// Polished roots this close become candidates for a multiple root and
    /// are merged only if the numerical gcd test passes. Non-positive selects
    /// 1e-3 * radius.
    double candidate_radius = 0.0;
    /// A cluster of size m is a multiple root when |D^(j)(z)| stays within
    /// gcd_tolerance times the propagated noise for j < m - 1 at the zero z
    /// of D^(m-1).
    double gcd_tolerance = 100.0;
};

/// Companion-matrix roots of D, Newton-polished, with multiplicities.
std::vector<DegeneracyRoot> find_degeneracies(const PairingHamiltonian& h, const RootOptions& options = {});
/// Same, reusing an already reconstructed polynomial.
std::vector<DegeneracyRoot> find_degeneracies(const PairingHamiltonian& h, const DiscriminantPoly& poly,
                                              const RootOptions& options = {});

/// |D(g)| on a rectangular grid, row-major with real part fastest.
struct Heatmap {
    double re_min = 0, re_max = 0, im_min = 0, im_max = 0;
    int nx = 0, ny = 0;
    std::vector<double> values;

    cplx point(int ix, int iy) const;
};

Heatmap discriminant_heatmap(const PairingHamiltonian& h, double re_min, double re_max, double im_min,
                             double im_max, int nx, int ny, int threads = 1);

/// [{g_re, g_im, multiplicity, residual, pair:[i,j]}]
std::string degeneracy_roots_json(std::span<const DegeneracyRoot> roots, const OutputMeta& meta = {});

}  // namespace pairdeg
