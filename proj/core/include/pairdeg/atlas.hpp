#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairdeg/discriminant.hpp"
#include "pairdeg/monodromy.hpp"

namespace pairdeg {

enum class DegeneracyKind { EP, DP, PseudoDP, Unresolved };

std::string to_string(DegeneracyKind kind);

struct MonodromySummary {
    std::vector<int> permutation;
    /// Re theta per state after one turn.
    std::vector<double> phase_shift;
    double radius = 0.0;
};

struct DegeneracyPoint {
    DegeneracyRoot root;
    DegeneracyKind kind = DegeneracyKind::Unresolved;
    /// Smallest singular value of the bilinear Gram matrix of the null space of
    /// H(g0) - E0: |b(v,v)| of the single null vector when eigenvectors merge,
    /// order one when the degenerate eigenvectors stay independent.
    double coalescence = 0.0;
    /// Dimension of the numerical null space of H(g0) - E0.
    int geometric_multiplicity = 1;
    std::optional<MonodromySummary> monodromy;
    std::string diagnostics;
};

struct AtlasOptions {
    RootOptions roots;
    double tau_c = kCoalescenceThreshold;
    /// Singular values below null_tolerance * ||H|| count toward the null space.
    double null_tolerance = 1e-6;
    /// Monodromy verification radius; shrunk to half the distance to the
    /// nearest other root when that is smaller.
    double loop_radius = 0.01;
    int loop_steps = 256;
    /// Also run monodromy loops around simple roots.
    bool loops_for_simple_roots = false;
};

/// Kind from algebraic multiplicity, then eigenvector coalescence, with a
/// monodromy loop settling double roots:
///   multiplicity 1, coalescing                 -> EP
///   multiplicity 2, independent eigenvectors   -> DP
///   multiplicity 2, coalescing, no exchange    -> PSEUDO_DP
///   anything else (e.g. a double root whose loop exchanges states) -> UNRESOLVED
DegeneracyPoint classify(const PairingHamiltonian& h, const DegeneracyRoot& root,
                         std::span<const DegeneracyRoot> all_roots, const AtlasOptions& options = {});

/// find_degeneracies followed by classify on every root.
std::vector<DegeneracyPoint> build_atlas(const PairingHamiltonian& h, const AtlasOptions& options = {});

/// Roots of the discriminant of the 2x2 block of H(g), written in the
/// c-orthonormal eigenbasis at `reference`, that belongs to `pair`. A true
/// two-level Jordan structure would reproduce the full model's double root;
/// returns the roots so callers can check whether it does.
std::vector<cplx> reduced_pair_discriminant_roots(const PairingHamiltonian& h, cplx reference,
                                                  std::array<int, 2> pair);

struct GammaSample {
    double gamma = 0.0;
    std::vector<DegeneracyPoint> points;
    /// link[i] = index of the point in the previous sample continuing point i,
    /// -1 for the first sample.
    std::vector<int> link;
};

struct CoalescenceEvent {
    double gamma = 0.0;
    cplx g{};
    /// Separation of the two tracked roots at the end of the bisection.
    double separation = 0.0;
    /// Bracketing sample indices in the trajectory.
    int sample_before = 0;
    int sample_after = 0;
};

struct GammaTrajectory {
    std::vector<GammaSample> samples;
    std::vector<CoalescenceEvent> events;
    std::vector<std::string> flags;
};

struct SweepOptions {
    AtlasOptions atlas;
    /// Two tracked roots closer than this count as merged.
    double merge_radius = 1e-4;
    /// Linking is flagged ambiguous when two candidates are this close.
    double link_ambiguity = 1e-9;
    /// Bisection stops when the gamma bracket is narrower than this.
    double gamma_tolerance = 1e-10;
    int max_bisections = 80;
    int threads = 1;
};

/// Degeneracies across gamma samples linked by nearest-g assignment, with
/// two-root coalescence events located by bisection on gamma.
///
/// A pair of roots coalesces when their squared separation s = (p - q)^2
/// passes through zero; across the event s turns by about pi (two roots meet
/// head-on and leave at right angles). Candidates are pairs whose s rotates
/// by more than pi/2 between neighbouring samples, or that merge in one of
/// them; the bisection follows the pair through the midpoint (p + q)/2, which
/// stays analytic through the event, and keeps the event only if the pair
/// closes to within merge_radius.
GammaTrajectory sweep_gamma(const ModelSpec& model, double gamma_min, double gamma_max, int steps,
                            const SweepOptions& options = {});

/// Classified points: [{g_re, g_im, multiplicity, residual, pair, kind,
/// coalescence, geometric_multiplicity, monodromy?}]
std::string atlas_json(std::span<const DegeneracyPoint> points, const OutputMeta& meta = {});
/// Rows gamma, g_re, g_im, kind.
std::string trajectory_csv(const GammaTrajectory& trajectory, const OutputMeta& meta = {});
std::string trajectory_json(const GammaTrajectory& trajectory, const OutputMeta& meta = {});
std::string events_json(const GammaTrajectory& trajectory, const OutputMeta& meta = {});

}  // namespace pairdeg
