#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pairdeg/spectra.hpp"

namespace pairdeg {

/// O_ij = u_i^T (g P) u_j over raw c-normalized eigenvectors. For a
/// complex-symmetric H the dual vectors are the transposes, so O is symmetric.
struct EigenbasisOperator {
    cplx g{};
    CMatrix entries;
    Spectrum spectrum;
};

/// Canonical labels, c_normalize gauge, unguarded normalization. Throws
/// NumericFailure when some |b(u,u)| < 1e-12 (too close to a coalescence).
EigenbasisOperator operator_in_eigenbasis(const PairingHamiltonian& h, cplx g);

/// g P expressed in the given column basis: U^T (g P) U.
CMatrix pairing_in_basis(const PairingHamiltonian& h, cplx g, const CMatrix& basis);

struct PairingCutRow {
    cplx g{};
    /// O_mm per continued label.
    CVector diagonal;
    /// O_pp + O_qq for the tracked pair.
    cplx pair_sum{};
};

struct PairingCut {
    std::array<int, 2> pair{1, 2};
    std::vector<PairingCutRow> rows;
    std::vector<ContinuationFlag> flags;
};

/// Diagonal pairing energies along an ordered list of couplings, labels
/// continued as in continue_along. The points must avoid exact coalescences.
PairingCut pairing_energy_cut(const PairingHamiltonian& h, std::span<const cplx> points,
                              std::array<int, 2> pair = {1, 2});
PairingCut pairing_energy_cut(const PairingHamiltonian& h, cplx start, cplx end, int n,
                              std::array<int, 2> pair = {1, 2});

/// g_re, g_im, ReO_11 .. ReO_nn, ReO_pp+ReO_qq.
std::string pairing_cut_csv(const PairingCut& cut, const OutputMeta& meta = {});

/// |value| ~ |amplitude| * delta^exponent from a log-log least-squares line.
struct PowerLawFit {
    double exponent = 0.0;
    /// Mean of value_k / delta_k^exponent.
    cplx amplitude{};
    /// RMS deviation of log|value| from the fitted line.
    double residual = 0.0;
};

inline constexpr double kPowerLawMaxResidual = 0.02;

/// Requires >= 6 positive, increasing deltas spanning >= 1.5 decades
/// (std::invalid_argument otherwise). Throws NumericFailure when the
/// residual exceeds max_residual.
PowerLawFit fit_power_law(std::span<const double> deltas, std::span<const cplx> values,
                          double max_residual = kPowerLawMaxResidual);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, int n);

/// Leading coefficients of the eigenbasis operator near a coalescence at g0,
/// approached along g = g0 + delta with delta real and positive.
///
/// Entries among the coalescing pair diverge like 1/delta, pair-to-regular
/// entries like 1/sqrt(delta), regular-regular entries stay finite. Each
/// entry times delta^order is extrapolated to delta -> 0 with a Neville
/// polynomial through the sample deltas.
struct LeadingCoefficients {
    cplx g0{};
    std::array<int, 2> pair{1, 2};
    std::vector<double> deltas;
    CMatrix leading;
    Eigen::MatrixXd order;
    /// |full extrapolation - extrapolation without the largest delta|.
    Eigen::MatrixXd error_estimate;
};

LeadingCoefficients leading_coefficients(const PairingHamiltonian& h, cplx g0, std::array<int, 2> pair = {1, 2},
                                         std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5});

/// Named coefficients of the four-state pairing operator around a
/// pseudo-diabolic point with the pair in the middle (labels '2','3'):
///   O_22 ~ a1/d, O_23 ~ i a1/d, O_33 ~ -a1/d,
///   O_11 ~ i a2, O_44 ~ i a3, O_14 ~ i a4,
///   O_12 ~ a5/sqrt(d), O_13 ~ a6/sqrt(d), O_42 ~ a7/sqrt(d), O_43 ~ a8/sqrt(d).
/// Signs of a4, a6, a7, a8 follow the eigenvector gauge, so the conjugacy
/// relations are checked up to an overall sign.
struct CoefficientTable {
    std::map<std::string, cplx> values;
    std::map<std::string, double> error_estimates;
    /// min over s = +-1 of |a5 - s conj(a6)|, likewise for a7, a8.
    double conjugacy_a5_a6 = 0.0;
    double conjugacy_a7_a8 = 0.0;
    /// Extrapolation error estimates all below the tolerance given to
    /// coefficient_extract.
    bool converged = true;
    LeadingCoefficients raw;
};

/// Requires a four-state model. Throws std::invalid_argument otherwise.
CoefficientTable coefficient_extract(const PairingHamiltonian& h, cplx pseudo_dp,
                                     std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5},
                                     double tolerance = 1e-6);

std::string coefficient_table_json(const CoefficientTable& table, const OutputMeta& meta = {});

}  // namespace pairdeg
