#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pairdeg/spectra.hpp"

using namespace pairdeg;

namespace {
const cplx kG0{0.0, -1.0 / (4.0 * std::sqrt(2.0))};
const PairingHamiltonian& reference() {
    static const PairingHamiltonian h(ModelSpec::three_level(-0.5));
    return h;
}
}  // namespace

TEST_SUITE("spectra") {
    TEST_CASE("diagonal matrix") {
        const CMatrix d = Eigen::Vector4cd(6, 4, 4, 2).asDiagonal();
        const Spectrum s = c_normalize(eigendecompose(d));
        CHECK(s.eigenvalues(0) == cplx(2, 0));
        CHECK(s.eigenvalues(3) == cplx(6, 0));
        for (int m = 0; m < 4; ++m) {
            CHECK(s.eigenvectors.col(m).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
            CHECK(std::abs(s.self_overlap[m] - 1.0) < 1e-15);
        }
    }

    TEST_CASE("coordinate vector keeps b = 1 and its sign") {
        Spectrum s;
        s.eigenvalues = CVector::Zero(1);
        s.eigenvectors = CMatrix::Ones(1, 1);
        s.self_overlap = {1.0};
        s.self_orthogonal = {false};
        const Spectrum n = c_normalize(s);
        CHECK(n.eigenvectors(0, 0) == cplx(1.0));
        CHECK_FALSE(n.self_orthogonal[0]);
    }

    TEST_CASE("random complex-symmetric matrices: trace, residual, biorthogonality") {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 100; ++trial) {
            const CMatrix h = oracle::random_complex_symmetric(4 + trial % 4, rng);
            const Spectrum s = c_normalize(eigendecompose(h));
            CHECK(std::abs(s.eigenvalues.sum() - h.trace()) < 1e-10 * std::max(1.0, h.norm()));
            CHECK(s.max_residual(h) <= 1e-9 * h.norm());
            for (Eigen::Index i = 0; i < s.size(); ++i) {
                if (s.self_orthogonal[i]) continue;
                CHECK(std::abs(c_product(s.eigenvectors.col(i), s.eigenvectors.col(i)) - 1.0) < 1e-10);
                for (Eigen::Index j = i + 1; j < s.size(); ++j)
                    if (!s.self_orthogonal[j])
                        CHECK(std::abs(c_product(s.eigenvectors.col(i), s.eigenvectors.col(j))) < 1e-8);
            }
            // canonical order
            for (Eigen::Index m = 1; m < s.size(); ++m) CHECK(s.eigenvalues(m - 1).imag() <= s.eigenvalues(m).imag());
        }
    }

    TEST_CASE("eigenvalues agree with independent characteristic-polynomial roots") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 30; ++trial) {
            const CMatrix h = oracle::random_complex_symmetric(5, rng);
            // det(E - H) through a Hessenberg-free route: sample and solve.
            std::vector<cplx> values, nodes;
            const int n = 5;
            Eigen::MatrixXcd vander(n + 1, n + 1);
            Eigen::VectorXcd rhs(n + 1);
            for (int k = 0; k <= n; ++k) {
                const cplx z = 3.0 * std::polar(1.0, 2.0 * M_PI * k / (n + 1));
                rhs(k) = (z * CMatrix::Identity(n, n) - h).determinant();
                for (int p = 0; p <= n; ++p) vander(k, p) = std::pow(z, p);
            }
            const Eigen::VectorXcd c = vander.fullPivLu().solve(rhs);
            const auto roots = oracle::durand_kerner(std::vector<cplx>(c.data(), c.data() + n + 1));
            const Spectrum s = eigendecompose(h);
            CHECK(oracle::multiset_distance(roots, std::vector<cplx>(s.eigenvalues.data(), s.eigenvalues.data() + n)) <
                  1e-8);
        }
    }

    TEST_CASE("spectrum at the pseudo-DP") {
        const Spectrum s = spectrum_at(reference(), kG0);
        const cplx want[] = {{4, -3.79878}, {4, -std::sqrt(2.0)}, {4, -std::sqrt(2.0)}, {4, 0.263243}};
        for (int m = 0; m < 4; ++m) CHECK(std::abs(s.eigenvalues(m) - want[m]) < 1e-5);
        CHECK(s.self_orthogonal[1]);
        CHECK(s.self_orthogonal[2]);
        CHECK_FALSE(s.self_orthogonal[0]);
        // u_1 components up to the gauge sign
        const Eigen::Vector4cd u1_ref(cplx(0.616894, 0.517406), 0.731723, 0.488757, cplx(0.616894, -0.517406));
        const CVector u1 = s.eigenvectors.col(0);
        const double err = std::min((u1 - u1_ref).cwiseAbs().maxCoeff(), (u1 + u1_ref).cwiseAbs().maxCoeff());
        CHECK(err < 1e-4);
    }

    TEST_CASE("c_normalize_raw refuses self-orthogonal vectors") {
        // at the exact point roundoff leaves |v^T v| tiny but nonzero
        const Spectrum raw = c_normalize_raw(eigendecompose(reference().at(kG0), kG0));
        CHECK(std::abs(raw.self_overlap[1]) < 1e-6);
        CHECK(std::abs(raw.self_overlap[2]) < 1e-6);
        CHECK_THROWS_AS(c_normalize_raw(eigendecompose(reference().at(kG0), kG0), 1e-6), NumericFailure);
        CHECK_NOTHROW(c_normalize_raw(eigendecompose(reference().at(kG0 + 1e-3), kG0 + 1e-3)));
    }

    TEST_CASE("match_states") {
        const CVector a = Eigen::Vector3cd(1, 2, 3);
        const auto same = match_states(a, a);
        CHECK(same.permutation == std::vector<int>{0, 1, 2});
        CHECK_FALSE(same.ambiguous);

        const CVector b = Eigen::Vector3cd(3.01, 1.01, 2.01);
        CHECK(match_states(a, b).permutation == std::vector<int>{1, 2, 0});

        // prev {0, 1}, next {0.5, 0.5 + eps}: both assignments cost 1.
        const CVector p = Eigen::Vector2cd(0, 1), q = Eigen::Vector2cd(0.5, cplx(0.5, 1e-3));
        CHECK(match_states(p, q).ambiguous);

        CHECK_THROWS_AS(match_states(a, CVector(Eigen::Vector2cd(1, 2))), std::invalid_argument);
    }

    TEST_CASE("greedy matching above dimension 8 agrees with the exhaustive one on a shuffle") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-5, 5);
        CVector prev(10);
        for (int i = 0; i < 10; ++i) prev(i) = cplx(u(rng), u(rng));
        std::vector<int> perm(10);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        CVector next(10);
        for (int i = 0; i < 10; ++i) next(perm[i]) = prev(i) + cplx(1e-4, 0);
        CHECK(match_states(prev, next).permutation == perm);
    }

    TEST_CASE("small loop far from degeneracies keeps labels") {
        std::vector<cplx> pts;
        for (int k = 0; k <= 64; ++k) pts.push_back(cplx(0.3, 0.3) + 0.01 * std::polar(1.0, 2 * M_PI * k / 64));
        const CutTable t = continue_along(reference(), pts);
        CHECK((t.rows.back().eigenvalues - t.rows.front().eigenvalues).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("forward then backward returns to the start labels") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        for (int trial = 0; trial < 10; ++trial) {
            const auto fwd = segment_points({u(rng), u(rng)}, {u(rng), u(rng)}, 80);
            std::vector<cplx> path = fwd;
            path.insert(path.end(), fwd.rbegin() + 1, fwd.rend());
            const CutTable t = continue_along(reference(), path);
            CHECK((t.rows.back().eigenvalues - t.rows.front().eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((t.rows.back().eigenvectors - t.rows.front().eigenvectors).cwiseAbs().maxCoeff() < 1e-8);
        }
    }

    TEST_CASE("real cut: Hermitian limit gives real eigenvalues") {
        const CutTable t = spectrum_along(reference(), -0.1, 0.1, 41);
        for (const auto& row : t.rows) CHECK(row.eigenvalues.imag().cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("cut through the pseudo-DP: widths of states 2 and 3 coalesce at Re g = 0") {
        const double im = kG0.imag();
        const CutTable t = spectrum_along(reference(), cplx(-0.05, im), cplx(0.05, im), 101);
        const auto& mid = t.rows[50];
        CHECK(std::abs(mid.g.real()) < 1e-15);
        CHECK(std::abs(mid.eigenvalues(1) - mid.eigenvalues(2)) < 1e-6);
        for (int m = 0; m < 4; ++m) CHECK(std::abs(mid.eigenvalues(m).real() - 4.0) < 1e-6);
        const auto& side = t.rows[10];
        CHECK(std::abs(side.eigenvalues(1).imag() - side.eigenvalues(2).imag()) > 1e-3);
    }

    TEST_CASE("finite-difference slopes at the pseudo-DP sum to the trace slope") {
        const double h = 1e-4;
        const CutTable t = continue_along(reference(), std::vector<cplx>{kG0 - h, kG0 - h / 3, kG0 + h / 3, kG0 + h});
        const CVector slope = (t.rows.back().eigenvalues - t.rows.front().eigenvalues) / (2 * h);
        CHECK(std::abs(slope.sum() - 36.0) < 1e-9);
        CHECK(slope(0).real() == doctest::Approx(35.9338).epsilon(1e-3));
        CHECK(slope(3).real() == doctest::Approx(-7.93378).epsilon(1e-3));
    }

    TEST_CASE("cut CSV layout") {
        const auto csv = cut_table_csv(spectrum_along(reference(), 0.05, 0.1, 3), OutputMeta{"t", "1", "abc"});
        CHECK(csv.rfind("# t version=1 config_hash=abc\ng_re,g_im,E1_re,E1_im,E2_re", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    }

    TEST_CASE("segments need two samples") {
        CHECK_THROWS_AS(segment_points(0.0, 1.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(continue_along(reference(), std::vector<cplx>{}), std::invalid_argument);
    }
}

TEST_CASE("continuation refuses to start on the g = 0 degeneracy" * doctest::test_suite("spectra")) {
    CHECK_THROWS_AS(spectrum_along(reference(), 0.0, 0.1, 3), NumericFailure);
}
