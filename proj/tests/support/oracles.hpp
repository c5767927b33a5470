#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library's numerics beyond its types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pairdeg/pairing_model.hpp"

namespace oracle {

using cplx = std::complex<double>;

/// Pairing matrix sum_ij A_i^dag A_j (A^dag = 2 K^+) built from per-level
/// quasispin ladders tensored over the levels, then restricted to the
/// n_pairs subspace in lexicographic order of occupations.
inline Eigen::MatrixXd quasispin_pairing(const pairdeg::ModelSpec& model) {
    const std::size_t L = model.levels.size();
    std::vector<int> dims;
    for (const auto& l : model.levels) dims.push_back(l.omega / 2 + 1);
    int total = 1;
    for (int d : dims) total *= d;

    // K^+ on one level: |n> -> sqrt((n+1)(Omega/2 - n)) |n+1>.
    auto kplus = [](int omega) {
        const int d = omega / 2 + 1;
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d, d);
        for (int n = 0; n + 1 < d; ++n) k(n + 1, n) = std::sqrt(double(n + 1) * (omega / 2.0 - n));
        return k;
    };
    auto embed = [&](std::size_t level, const Eigen::MatrixXd& op) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
        for (std::size_t l = 0; l < L; ++l) {
            const Eigen::MatrixXd f = l == level ? op : Eigen::MatrixXd::Identity(dims[l], dims[l]);
            Eigen::MatrixXd next(out.rows() * f.rows(), out.cols() * f.cols());
            for (Eigen::Index i = 0; i < out.rows(); ++i)
                for (Eigen::Index j = 0; j < out.cols(); ++j)
                    next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
            out = next;
        }
        return out;
    };
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(total, total);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) {
            const Eigen::MatrixXd ai = 2.0 * embed(i, kplus(model.levels[i].omega));
            const Eigen::MatrixXd aj = 2.0 * embed(j, kplus(model.levels[j].omega));
            full += ai * aj.transpose();
        }

    // Kronecker index is lexicographic in occupations (first level slowest).
    std::vector<int> keep;
    for (int idx = 0; idx < total; ++idx) {
        int rest = idx, pairs = 0;
        for (std::size_t l = L; l-- > 0;) {
            pairs += rest % dims[l];
            rest /= dims[l];
        }
        if (pairs == model.n_pairs) keep.push_back(idx);
    }
    Eigen::MatrixXd out(keep.size(), keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = 0; b < keep.size(); ++b) out(a, b) = full(keep[a], keep[b]);
    return out;
}

/// Durand-Kerner simultaneous iteration for the roots of an ascending
/// coefficient list.
inline std::vector<cplx> durand_kerner(std::vector<cplx> c, int iterations = 2000) {
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    const std::size_t n = c.size() - 1;
    for (auto& x : c) x /= c.back();
    double bound = 0.0;
    for (std::size_t k = 0; k < n; ++k) bound = std::max(bound, std::abs(c[k]));
    bound += 1.0;
    std::vector<cplx> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = bound * std::polar(1.0, 0.4 + 2.0 * M_PI * double(k) / double(n));
    auto eval = [&](cplx x) {
        cplx acc = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
        return acc;
    };
    for (int it = 0; it < iterations; ++it) {
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx den = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            const cplx step = eval(z[i]) / den;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-15) break;
    }
    return z;
}

/// Ascending coefficients of prod_k (x - r_k).
inline std::vector<cplx> from_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> c{1.0};
    for (const cplx r : roots) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return c;
}

/// Max over a of min over b of |a - b|, after greedy one-to-one pairing.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
    double worst = 0.0;
    for (const cplx x : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

inline Eigen::MatrixXcd random_complex_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = cplx(d(rng), d(rng));
    return m;
}

}  // namespace oracle
