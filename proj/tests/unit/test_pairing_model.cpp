#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pairdeg/discriminant.hpp"
#include "pairdeg/spectra.hpp"

using namespace pairdeg;

namespace {

std::vector<std::vector<int>> occupations(const std::vector<BasisState>& basis) {
    std::vector<std::vector<int>> out;
    for (const auto& b : basis) out.push_back(b.occupations);
    return out;
}

ModelSpec model(std::vector<double> eps, std::vector<int> omegas, int pairs, double gamma = 0.0) {
    ModelSpec m;
    for (std::size_t i = 0; i < eps.size(); ++i) m.levels.push_back({eps[i], omegas[i]});
    m.n_pairs = pairs;
    m.gamma = gamma;
    return m;
}

}  // namespace

TEST_SUITE("pairing-model") {
    TEST_CASE("basis of the three-level model") {
        const auto basis = enumerate_basis(ModelSpec::three_level(-0.5));
        CHECK(occupations(basis) == std::vector<std::vector<int>>{{0, 1, 1}, {0, 2, 0}, {1, 0, 1}, {1, 1, 0}});
    }

    TEST_CASE("vacuum and fully blocked bases") {
        CHECK(occupations(enumerate_basis(model({0, 1, 2}, {2, 6, 2}, 0))) == std::vector<std::vector<int>>{{0, 0, 0}});
        CHECK(occupations(enumerate_basis(model({0, 1, 2}, {2, 2, 2}, 3))) == std::vector<std::vector<int>>{{1, 1, 1}});
    }

    TEST_CASE("invalid models are rejected") {
        CHECK_THROWS_AS(enumerate_basis(model({0, 1, 2}, {2, 2, 2}, 4)), InvalidModel);
        CHECK_THROWS_AS(PairingHamiltonian(model({0, 1}, {3, 2}, 1)), InvalidModel);
        CHECK_THROWS_AS(PairingHamiltonian(model({0, 1}, {0, 2}, 1)), InvalidModel);
        CHECK_THROWS_AS(PairingHamiltonian(model({0, 1}, {2, 2}, -1)), InvalidModel);
        CHECK_THROWS_AS(PairingHamiltonian(model({0, 1}, {2, 2}, 1, std::nan(""))), InvalidModel);
    }

    TEST_CASE("ladder-formula entries by hand") {
        const auto ops = build_operator_matrices(ModelSpec::three_level(-0.5));
        // state (0,2,0) is index 1, (0,1,1) index 0
        CHECK(ops.single_particle(1, 1) == 4.0);
        CHECK(ops.anisotropy(1, 1) == 16.0);
        CHECK(ops.pairing(1, 1) == doctest::Approx(16.0));
        CHECK(ops.pairing(1, 0) == doctest::Approx(8.0));
        CHECK(ops.pairing(0, 1) == doctest::Approx(8.0));
        CHECK(ops.single_particle.diagonal() == Eigen::Vector4d(6, 4, 4, 2));
    }

    TEST_CASE("pairing matrix matches the tensored quasispin oracle") {
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> om(1, 4), lv(1, 4);
        for (int trial = 0; trial < 25; ++trial) {
            ModelSpec m;
            const int levels = lv(rng);
            int cap = 0;
            for (int l = 0; l < levels; ++l) {
                m.levels.push_back({double(l), 2 * om(rng)});
                cap += m.levels.back().capacity();
            }
            m.n_pairs = std::uniform_int_distribution<int>(0, cap)(rng);
            const auto ops = build_operator_matrices(m);
            const Eigen::MatrixXd ref = oracle::quasispin_pairing(m);
            REQUIRE(ref.rows() == ops.pairing.rows());
            CHECK((ref - ops.pairing).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    TEST_CASE("H is complex symmetric and the trace is 16 + 36 g") {
        const PairingHamiltonian h(ModelSpec::three_level(-0.5));
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int k = 0; k < 50; ++k) {
            const cplx g{u(rng), u(rng)};
            const CMatrix m = h.at(g);
            CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK(std::abs(m.trace() - (16.0 + 36.0 * g)) < 1e-12);
        }
        const cplx g0{0.0, -1.0 / (4.0 * std::sqrt(2.0))};
        CHECK(h.at(g0).trace().imag() == doctest::Approx(-9.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(h.at(0.0) == CMatrix(Eigen::Vector4cd(6, 4, 4, 2).asDiagonal()));
    }

    TEST_CASE("level reflection maps the spectrum to 8 - E(-g)") {
        const PairingHamiltonian h(ModelSpec::three_level(-0.5));
        auto mirrored = ModelSpec::three_level(-0.5);
        std::reverse(mirrored.levels.begin(), mirrored.levels.end());
        const PairingHamiltonian hm(mirrored);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-0.4, 0.4);
        for (int k = 0; k < 30; ++k) {
            const cplx g{u(rng), u(rng)};
            Eigen::ComplexEigenSolver<CMatrix> a(hm.at(g)), b(h.at(-g));
            std::vector<cplx> ea(a.eigenvalues().data(), a.eigenvalues().data() + 4), eb;
            for (int m = 0; m < 4; ++m) eb.push_back(8.0 - b.eigenvalues()(m));
            CHECK(oracle::multiset_distance(ea, eb) < 1e-10);
        }
    }

    TEST_CASE("with_gamma changes only the anisotropy weight") {
        const PairingHamiltonian h(ModelSpec::three_level(-0.5));
        const auto h2 = h.with_gamma(-0.49);
        CHECK(h2.model().gamma == -0.49);
        const RMatrix diff = h2.coupling() - h.coupling();
        CHECK((diff - 0.01 * h.operators().anisotropy).cwiseAbs().maxCoeff() < 1e-14);
    }
}
