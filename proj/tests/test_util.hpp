// Shared helpers for the test suites: seeded random objects and small
// closed-form oracles kept independent of the library code paths they check.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "telesim/infotheory.hpp"
#include "telesim/qcore.hpp"
#include "telesim/rng.hpp"

namespace testutil {

using telesim::RandomStream;
using telesim::qcore::Complex;
using telesim::qcore::Labels;
using telesim::qcore::Matrix;
using telesim::qcore::StateVector;
using telesim::qcore::Vector;

inline Complex random_complex(RandomStream& rng) {
    return {rng.next_gaussian(), rng.next_gaussian()};
}

inline StateVector random_state(RandomStream& rng, const Labels& labels) {
    Vector v(static_cast<Eigen::Index>(std::size_t{1} << labels.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = random_complex(rng);
    return StateVector(std::move(v), labels, /*renormalize=*/true);
}

// Haar-ish random unitary via QR of a Gaussian matrix.
inline Matrix random_unitary(RandomStream& rng, std::size_t dim) {
    Matrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = random_complex(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix phases so the result is distributed independently of the R signs
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        Complex d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

// random single-qubit mixed state as a convex mix of two random pure states
inline Matrix random_qubit_density_matrix(RandomStream& rng) {
    const StateVector a = random_state(rng, {"q"});
    const StateVector b = random_state(rng, {"q"});
    const double w = rng.next_double();
    return w * (a.amplitudes() * a.amplitudes().adjoint()) +
           (1.0 - w) * (b.amplitudes() * b.amplitudes().adjoint());
}

inline std::vector<double> random_prob_vector(RandomStream& rng, std::size_t n) {
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto& x : p) {
        x = -std::log(1.0 - rng.next_double());
        sum += x;
    }
    for (auto& x : p) x /= sum;
    return p;
}

inline double binary_entropy(double f) {
    double h = 0.0;
    if (f > 0.0) h -= f * std::log2(f);
    if (f < 1.0) h -= (1.0 - f) * std::log2(1.0 - f);
    return h;
}

inline telesim::infotheory::QuantumEnsemble random_qubit_ensemble(RandomStream& rng,
                                                                  std::size_t members) {
    const auto probs = random_prob_vector(rng, members);
    std::vector<std::pair<double, telesim::qcore::DensityOperator>> entries;
    entries.reserve(members);
    for (std::size_t i = 0; i < members; ++i)
        entries.emplace_back(
            probs[i], telesim::qcore::DensityOperator(random_qubit_density_matrix(rng), {"q"}));
    return telesim::infotheory::QuantumEnsemble(std::move(entries));
}

// random POVM: E_k = S^{-1/2} A_k S^{-1/2} with A_k = G_k G_k^dag
inline telesim::infotheory::POVM random_povm(RandomStream& rng, std::size_t outcomes,
                                             std::size_t dim) {
    std::vector<Matrix> raw(outcomes);
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (auto& a : raw) {
        Matrix g(dim, dim);
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = random_complex(rng);
        a = g * g.adjoint();
        sum += a;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(sum);
    Matrix inv_sqrt = es.operatorInverseSqrt();
    std::vector<Matrix> effects;
    effects.reserve(outcomes);
    for (const auto& a : raw) effects.push_back(inv_sqrt * a * inv_sqrt);
    return telesim::infotheory::POVM(std::move(effects));
}

}  // namespace testutil
