#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairdeg/discriminant.hpp"
#include "pairdeg/spectra.hpp"

namespace pairdeg {

/// Circle g(phi) = center + radius * exp(i * orientation * phi).
struct LoopSpec {
    cplx center{};
    double radius = 0.01;
    int steps = 256;
    int loops = 1;
    /// +1 counter-clockwise, -1 clockwise.
    int orientation = 1;
};

/// Sampled continuation around one or more turns of a loop.
///
/// The complex phase theta_m of state m is measured against its starting
/// direction: with r_m = u_m(0) / ||u_m(0)|| and u_m(phi) the c-normalized,
/// sign-continued eigenvector,
///     theta_m(phi_{k+1}) = theta_m(phi_k) - i Log( <r_m|u_{k+1}> / <r_m|u_k> ),
/// principal logarithm, so theta_m(0) = 0 and each increment is small. After a
/// turn that returns u_m to s * u_m(0), Re theta_m = arg s + 2 pi k exactly.
struct LoopTrace {
    LoopSpec spec;
    /// Cumulative angle, 0 .. 2 pi * loops.
    std::vector<double> phi;
    std::vector<CVector> eigenvalues;
    std::vector<CMatrix> eigenvectors;
    std::vector<CVector> phases;
    /// Entry k: which starting state (canonical index) each continued state
    /// sits on after k+1 completed turns.
    std::vector<std::vector<int>> loop_permutations;
    std::vector<ContinuationFlag> flags;

    Eigen::Index states() const { return eigenvalues.empty() ? 0 : eigenvalues.front().size(); }
    /// Permutation after the first turn.
    const std::vector<int>& single_loop_permutation() const { return loop_permutations.front(); }
    /// Phases at the end of turn k (1-based).
    CVector phases_after(int turn) const;
};

struct LoopOptions {
    double tau_c = kCoalescenceThreshold;
    int max_bisections = 12;
    /// Degeneracies to check the loop against: exactly one may lie inside.
    std::span<const DegeneracyRoot> known_roots{};
};

/// Throws InvalidModel for a malformed LoopSpec or when known_roots places
/// more than one root inside the loop (or one on it). Throws NumericFailure
/// naming the phi interval when continuation cannot be resolved.
LoopTrace trace_loop(const PairingHamiltonian& h, const LoopSpec& loop, const LoopOptions& options = {});

struct RestorePeriods {
    /// Smallest turn count whose accumulated permutation is the identity.
    std::optional<int> eigenvalue_period;
    /// Smallest turn count that additionally brings every Re theta back to
    /// 0 mod 2 pi within phase_tolerance.
    std::optional<int> phase_period;
    LoopTrace trace;
};

inline constexpr double kPhaseRestoreTolerance = 0.05;

RestorePeriods restore_count(const PairingHamiltonian& h, LoopSpec loop, int max_loops,
                             const LoopOptions& options = {});

bool is_identity(std::span<const int> perm);
/// Composition: (a then b)[m] = b[a[m]].
std::vector<int> compose(std::span<const int> a, std::span<const int> b);
/// 1-based cycle notation, fixed points included: "(1)(2 3)(4)".
std::string cycle_notation(std::span<const int> perm);
/// Distance of x to the nearest multiple of 2 pi.
double distance_to_2pi_multiple(double x);

/// phi, then per state Re theta, Im theta, E_re, E_im (1-based labels).
std::string loop_trace_csv(const LoopTrace& trace, const OutputMeta& meta = {});
/// Loop parameters, per-turn permutations in cycle notation, final phases and the
/// restore periods when given.
std::string loop_summary_json(const LoopTrace& trace, const std::optional<RestorePeriods>& periods = std::nullopt,
                              const OutputMeta& meta = {});

}  // namespace pairdeg
