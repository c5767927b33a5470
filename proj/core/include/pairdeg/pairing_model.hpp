#pragma once

#include <vector>

#include "pairdeg/types.hpp"

namespace pairdeg {

/// One single-particle level: energy in units of the level spacing and its
/// particle degeneracy Omega (even, >= 2). At most Omega/2 pairs fit.
struct LevelSpec {
    double epsilon = 0.0;
    int omega = 2;

    int capacity() const { return omega / 2; }
};

/// Seniority-zero multi-level pairing model with the non-integrable
/// anisotropy g' = gamma * g acting on sum_l N_l^2.
struct ModelSpec {
    std::vector<LevelSpec> levels;
    int n_pairs = 0;
    double gamma = 0.0;

    /// Throws InvalidModel when an invariant fails.
    void validate() const;
    int capacity() const;

    /// The three-level reference model: eps = (0,1,2), Omega = (2,6,2), two pairs.
    static ModelSpec three_level(double gamma);
};

/// Pair occupation numbers n_l, one per level.
struct BasisState {
    std::vector<int> occupations;

    int pairs() const;
    bool operator==(const BasisState&) const = default;
    auto operator<=>(const BasisState&) const = default;
};

/// Lexicographically ordered seniority-zero basis. Throws InvalidModel if the
/// pair number exceeds the total capacity.
std::vector<BasisState> enumerate_basis(const ModelSpec& model);

/// H(g) = single_particle + g * (pairing + gamma * anisotropy).
///   single_particle: sum_i eps_i N_i (N in particles), diagonal
///   pairing:         sum_ij A_i^dag A_j with A^dag = 2 K^+, symmetric
///   anisotropy:      sum_i N_i^2, diagonal
struct OperatorMatrices {
    RMatrix single_particle;
    RMatrix pairing;
    RMatrix anisotropy;

    Eigen::Index dimension() const { return pairing.rows(); }
};

OperatorMatrices build_operator_matrices(const ModelSpec& model);

/// Model plus its basis and operator matrices. Immutable after construction,
/// so one instance can be shared across threads.
class PairingHamiltonian {
public:
    explicit PairingHamiltonian(ModelSpec model);

    const ModelSpec& model() const { return model_; }
    const std::vector<BasisState>& basis() const { return basis_; }
    const OperatorMatrices& operators() const { return ops_; }
    Eigen::Index dimension() const { return ops_.dimension(); }

    /// Complex-symmetric H(g).
    CMatrix at(cplx g) const;
    /// dH/dg = P + gamma * Q.
    const RMatrix& coupling() const { return coupling_; }
    /// Same model with a different anisotropy ratio.
    PairingHamiltonian with_gamma(double gamma) const;

private:
    ModelSpec model_;
    std::vector<BasisState> basis_;
    OperatorMatrices ops_;
    RMatrix coupling_;
};

CMatrix hamiltonian_at(const PairingHamiltonian& h, cplx g);

}  // namespace pairdeg
