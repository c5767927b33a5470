#include "pairdeg/pairing_model.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace pairdeg {

void ModelSpec::validate() const {
    if (levels.empty()) throw InvalidModel("model has no levels");
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const auto& level = levels[l];
        if (level.omega < 2 || level.omega % 2 != 0)
            throw InvalidModel(fmt::format("level {}: omega must be an even integer >= 2, got {}", l, level.omega));
        if (!std::isfinite(level.epsilon)) throw InvalidModel(fmt::format("level {}: epsilon is not finite", l));
    }
    if (n_pairs < 0) throw InvalidModel(fmt::format("n_pairs must be non-negative, got {}", n_pairs));
    if (n_pairs > capacity())
        throw InvalidModel(fmt::format("n_pairs = {} exceeds the pair capacity {}", n_pairs, capacity()));
    if (!std::isfinite(gamma)) throw InvalidModel("gamma is not finite");
}

int ModelSpec::capacity() const {
    return std::accumulate(levels.begin(), levels.end(), 0,
                           [](int acc, const LevelSpec& l) { return acc + l.capacity(); });
}

ModelSpec ModelSpec::three_level(double gamma) {
    return ModelSpec{{{0.0, 2}, {1.0, 6}, {2.0, 2}}, 2, gamma};
}

int BasisState::pairs() const { return std::accumulate(occupations.begin(), occupations.end(), 0); }

namespace {

void fill_occupations(const ModelSpec& model, std::size_t level, int remaining, std::vector<int>& current,
                      std::vector<BasisState>& out) {
    if (level == model.levels.size()) {
        if (remaining == 0) out.push_back(BasisState{current});
        return;
    }
    const int cap = model.levels[level].capacity();
    for (int n = 0; n <= std::min(cap, remaining); ++n) {
        current[level] = n;
        fill_occupations(model, level + 1, remaining - n, current, out);
    }
    current[level] = 0;
}

}  // namespace

std::vector<BasisState> enumerate_basis(const ModelSpec& model) {
    model.validate();
    std::vector<BasisState> out;
    std::vector<int> current(model.levels.size(), 0);
    fill_occupations(model, 0, model.n_pairs, current, out);
    if (out.empty()) throw InvalidModel("model admits no basis states");
    return out;
}

OperatorMatrices build_operator_matrices(const ModelSpec& model) {
    const auto basis = enumerate_basis(model);
    const auto dim = static_cast<Eigen::Index>(basis.size());
    const std::size_t n_levels = model.levels.size();

    OperatorMatrices ops{RMatrix::Zero(dim, dim), RMatrix::Zero(dim, dim), RMatrix::Zero(dim, dim)};

    auto index_of = [&](const BasisState& s) -> Eigen::Index {
        auto it = std::lower_bound(basis.begin(), basis.end(), s);
        return it != basis.end() && *it == s ? it - basis.begin() : -1;
    };

    for (Eigen::Index a = 0; a < dim; ++a) {
        const auto& occ = basis[a].occupations;
        double t = 0.0, q = 0.0, p_diag = 0.0;
        for (std::size_t l = 0; l < n_levels; ++l) {
            const double n = occ[l];
            const double half = model.levels[l].capacity();
            t += model.levels[l].epsilon * 2.0 * n;
            q += (2.0 * n) * (2.0 * n);
            // A^dag A = 4 K^+ K^- = 4 n (Omega/2 - n + 1)
            p_diag += 4.0 * n * (half - n + 1.0);
        }
        ops.single_particle(a, a) = t;
        ops.anisotropy(a, a) = q;
        ops.pairing(a, a) = p_diag;

        // A_i^dag A_j moves one pair from level j to level i.
        for (std::size_t i = 0; i < n_levels; ++i) {
            for (std::size_t j = 0; j < n_levels; ++j) {
                if (i == j) continue;
                const int ni = occ[i];
                const int nj = occ[j];
                const int half_i = model.levels[i].capacity();
                const int half_j = model.levels[j].capacity();
                if (nj == 0 || ni == half_i) continue;
                const double amp = 4.0 * std::sqrt(double(ni + 1) * double(half_i - ni)) *
                                   std::sqrt(double(nj) * double(half_j - nj + 1));
                BasisState target = basis[a];
                target.occupations[i] += 1;
                target.occupations[j] -= 1;
                const Eigen::Index b = index_of(target);
                ops.pairing(b, a) += amp;
            }
        }
    }
    return ops;
}

PairingHamiltonian::PairingHamiltonian(ModelSpec model)
    : model_(std::move(model)), basis_(enumerate_basis(model_)), ops_(build_operator_matrices(model_)) {
    coupling_ = ops_.pairing + model_.gamma * ops_.anisotropy;
}

CMatrix PairingHamiltonian::at(cplx g) const {
    CMatrix h = ops_.single_particle.cast<cplx>();
    h += g * coupling_.cast<cplx>();
    return h;
}

PairingHamiltonian PairingHamiltonian::with_gamma(double gamma) const {
    ModelSpec m = model_;
    m.gamma = gamma;
    return PairingHamiltonian(std::move(m));
}

CMatrix hamiltonian_at(const PairingHamiltonian& h, cplx g) { return h.at(g); }

}  // namespace pairdeg
