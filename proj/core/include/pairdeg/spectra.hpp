#pragma once

#include <span>
#include <string>
#include <vector>

#include "pairdeg/pairing_model.hpp"

namespace pairdeg {

/// Threshold on |b(u,u)| of a Hermitian-normalized eigenvector below which
/// the vector counts as self-orthogonal (coalescing).
inline constexpr double kCoalescenceThreshold = 1e-6;

/// Bilinear c-product sum_k u_k v_k, no conjugation.
cplx c_product(const CVector& u, const CVector& v);

/// Eigenpairs of a complex-symmetric H at one coupling.
///
/// Eigenvalues come in canonical order: ascending imaginary part, ties broken
/// by ascending real part. For the three-level model this puts the state with
/// the most negative width first, which matches the usual '1'..'4' labels.
/// Columns of `eigenvectors` are the right eigenvectors; for complex-symmetric
/// H the left ones are their transposes.
struct Spectrum {
    cplx g{};
    CVector eigenvalues;
    CMatrix eigenvectors;
    /// b(u,u) of each Hermitian-normalized vector, recorded before any
    /// c-normalization.
    std::vector<cplx> self_overlap;
    /// Set by c_normalize for vectors left in Hermitian normalization.
    std::vector<bool> self_orthogonal;

    Eigen::Index size() const { return eigenvalues.size(); }
    /// max_m ||H u_m - E_m u_m|| / ||u_m||.
    double max_residual(const CMatrix& h) const;
};

/// Full eigensystem with Hermitian-normalized vectors. Throws NumericFailure
/// naming g if the eigensolver does not converge.
Spectrum eigendecompose(const CMatrix& h, cplx g = {});

/// Scales each vector to b(u,u) = 1 when |b| exceeds tau_c; otherwise flags it
/// self-orthogonal and leaves it Hermitian-normalized. The sign (or phase, for
/// flagged vectors) is fixed so the largest-magnitude component has argument
/// in (-pi/2, pi/2].
Spectrum c_normalize(Spectrum spectrum, double tau_c = kCoalescenceThreshold);

/// c-normalization without the guard: divides by sqrt(b) whenever |b| is above
/// `floor`, throwing NumericFailure otherwise. Divergent components stay
/// visible, which the observables rely on.
Spectrum c_normalize_raw(Spectrum spectrum, double floor = 1e-12);

/// eigendecompose + c_normalize at one coupling.
Spectrum spectrum_at(const PairingHamiltonian& h, cplx g, double tau_c = kCoalescenceThreshold);

struct StateMatch {
    /// permutation[m] = index in `next` continuing state m of `prev`.
    std::vector<int> permutation;
    double cost = 0.0;
    /// Two assignments with different eigenvalue sequences lie within
    /// kAmbiguityTolerance of the best total cost.
    bool ambiguous = false;
};

inline constexpr double kAmbiguityTolerance = 1e-12;

/// Assignment minimizing sum_m |E_m^prev - E_pi(m)^next|. Exhaustive over all
/// permutations up to dimension 8; larger spectra use greedy nearest-neighbour
/// assignment refined by pairwise swaps.
StateMatch match_states(const CVector& prev, const CVector& next);
StateMatch match_states(const Spectrum& prev, const Spectrum& next);

/// Reorders eigenpairs so that entry m of the result is entry perm[m] of the input.
Spectrum permuted(const Spectrum& spectrum, std::span<const int> perm);

/// A matching step that needed refinement, or that failed.
struct ContinuationFlag {
    cplx from{};
    cplx to{};
    int refinements = 0;
    bool resolved = true;
};

struct ContinuationOptions {
    double tau_c = kCoalescenceThreshold;
    /// Maximum number of step bisections when matching is ambiguous.
    int max_bisections = 12;
    /// Extrapolate each branch linearly from the two previous samples before
    /// matching; keeps labels on analytic branches through exact crossings.
    bool predictor = true;
};

struct CutSample {
    cplx g{};
    /// Label-stable eigenvalues: entry m belongs to state m throughout.
    CVector eigenvalues;
    /// c-normalized, sign-continued eigenvectors in the same labels.
    CMatrix eigenvectors;
    std::vector<bool> self_orthogonal;
};

struct CutTable {
    cplx start{};
    cplx end{};
    int samples = 0;
    std::vector<CutSample> rows;
    std::vector<ContinuationFlag> flags;
};

/// Continues labeled eigenpairs through an ordered list of couplings. Labels
/// are the canonical order at the first point. Throws NumericFailure naming
/// the interval if an ambiguity survives max_bisections refinements.
CutTable continue_along(const PairingHamiltonian& h, std::span<const cplx> points,
                        const ContinuationOptions& options = {});

/// Straight segment start -> end with n >= 2 equispaced samples.
CutTable spectrum_along(const PairingHamiltonian& h, cplx start, cplx end, int n,
                        const ContinuationOptions& options = {});

/// Equispaced points on a segment, endpoints included.
std::vector<cplx> segment_points(cplx start, cplx end, int n);

/// CSV with columns g_re, g_im, then E<m>_re, E<m>_im per labeled state (1-based).
std::string cut_table_csv(const CutTable& table, const OutputMeta& meta = {});

}  // namespace pairdeg
