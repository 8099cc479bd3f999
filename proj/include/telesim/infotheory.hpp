// infotheory.hpp
// Classical and quantum information measures: Shannon entropy, mutual
// information and channel capacity for discrete memoryless channels, von
// Neumann entropy, the Holevo quantity of a quantum ensemble, measurement
// (POVM) mutual information, and typical-subspace dimensions.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "telesim/qcore.hpp"

namespace telesim::infotheory {

using qcore::DensityOperator;
using qcore::Matrix;
using qcore::kTol;

namespace detail {

using qcore::detail::require;

// 0 log 0 := 0 throughout
inline double plog2p(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace detail

// ---------------------------------------------------------------------------
// ProbDist

class ProbDist {
public:
    explicit ProbDist(std::vector<double> p) : p_(std::move(p)) {
        detail::require(!p_.empty(), "distribution needs at least one entry");
        double sum = 0.0;
        for (double x : p_) {
            detail::require(x >= -kTol, "distribution entries must be nonnegative");
            sum += x;
        }
        detail::require(std::abs(sum - 1.0) <= kTol, "distribution must sum to 1");
        for (double& x : p_)
            if (x < 0.0) x = 0.0;
    }

    static ProbDist uniform(std::size_t n) {
        detail::require(n >= 1, "uniform distribution needs n >= 1");
        return ProbDist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    static ProbDist point_mass(std::size_t n, std::size_t at) {
        detail::require(at < n, "point mass index out of range");
        std::vector<double> p(n, 0.0);
        p[at] = 1.0;
        return ProbDist(std::move(p));
    }

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& values() const { return p_; }

    // inverse-CDF sample
    std::size_t sample(RandomStream& rng) const {
        const double u = rng.next_double();
        double cum = 0.0;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            cum += p_[i];
            if (u < cum) return i;
        }
        for (std::size_t i = p_.size(); i-- > 0;)
            if (p_[i] > 0.0) return i;
        return 0;
    }

private:
    std::vector<double> p_;
};

inline double shannon_entropy(const ProbDist& p) {
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) h -= detail::plog2p(p[i]);
    return h;
}

// ---------------------------------------------------------------------------
// Channel

// Discrete memoryless channel: row i holds the conditional output
// distribution given input i.
class Channel {
public:
    explicit Channel(Eigen::MatrixXd rows) : m_(std::move(rows)) {
        detail::require(m_.rows() >= 1 && m_.cols() >= 1, "channel matrix is empty");
        for (Eigen::Index i = 0; i < m_.rows(); ++i) {
            double sum = 0.0;
            for (Eigen::Index j = 0; j < m_.cols(); ++j) {
                detail::require(m_(i, j) >= -kTol,
                                "channel row " + std::to_string(i) + " has a negative entry");
                sum += m_(i, j);
            }
            detail::require(std::abs(sum - 1.0) <= kTol,
                            "channel row " + std::to_string(i) + " does not sum to 1");
        }
    }

    static Channel identity(std::size_t n) {
        return Channel(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(n)));
    }

    static Channel binary_symmetric(double flip) {
        detail::require(flip >= 0.0 && flip <= 1.0, "flip probability must be in [0,1]");
        Eigen::MatrixXd m(2, 2);
        m << 1.0 - flip, flip, flip, 1.0 - flip;
        return Channel(std::move(m));
    }

    std::size_t n_in() const { return static_cast<std::size_t>(m_.rows()); }
    std::size_t n_out() const { return static_cast<std::size_t>(m_.cols()); }
    double operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    Eigen::MatrixXd m_;
};

// H(X:Y) = H(X) - H(X|Y), with the conditional entropy evaluated through the
// Bayes-inverted posterior p(x|y).
inline double mutual_information(const ProbDist& p_in, const Channel& ch) {
    detail::require(p_in.size() == ch.n_in(), "input distribution does not match channel");
    const std::size_t ni = ch.n_in(), no = ch.n_out();

    std::vector<double> p_out(no, 0.0);
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t j = 0; j < no; ++j) p_out[j] += p_in[i] * ch(i, j);

    double h_x_given_y = 0.0;
    for (std::size_t j = 0; j < no; ++j) {
        if (p_out[j] <= 0.0) continue;
        double h_j = 0.0;
        for (std::size_t i = 0; i < ni; ++i) {
            const double posterior = p_in[i] * ch(i, j) / p_out[j];
            h_j -= detail::plog2p(posterior);
        }
        h_x_given_y += p_out[j] * h_j;
    }
    const double mi = shannon_entropy(p_in) - h_x_given_y;
    return mi < 0.0 && mi > -1e-12 ? 0.0 : mi;
}

struct CapacityResult {
    double bits = 0.0;
    ProbDist input;
    std::size_t iterations = 0;
    bool converged = false;
};

// Alternating maximization (Blahut-Arimoto). The gap between the running
// upper and lower capacity bounds drives the stopping rule; on hitting the
// iteration cap the best iterate is returned with converged=false.
inline CapacityResult channel_capacity(const Channel& ch, double tol = 1e-9,
                                       std::size_t max_iter = 10000) {
    const std::size_t ni = ch.n_in(), no = ch.n_out();
    std::vector<double> p(ni, 1.0 / static_cast<double>(ni));
    std::vector<double> q(no, 0.0), d(ni, 0.0);

    double lower = 0.0;
    std::size_t iter = 0;
    bool converged = false;
    while (iter < max_iter) {
        ++iter;
        std::fill(q.begin(), q.end(), 0.0);
        for (std::size_t i = 0; i < ni; ++i)
            for (std::size_t j = 0; j < no; ++j) q[j] += p[i] * ch(i, j);

        // d_i = sum_j ch(i,j) log2( ch(i,j)/q_j ): per-input information gain
        double upper = 0.0;
        lower = 0.0;
        for (std::size_t i = 0; i < ni; ++i) {
            double di = 0.0;
            for (std::size_t j = 0; j < no; ++j) {
                if (ch(i, j) <= 0.0) continue;
                di += ch(i, j) * std::log2(ch(i, j) / q[j]);
            }
            d[i] = di;
            lower += p[i] * di;
            if (di > upper) upper = di;
        }
        if (upper - lower <= tol) {
            converged = true;
            break;
        }

        double norm = 0.0;
        for (std::size_t i = 0; i < ni; ++i) {
            p[i] *= std::exp2(d[i]);
            norm += p[i];
        }
        for (std::size_t i = 0; i < ni; ++i) p[i] /= norm;
    }

    // tidy tiny fp residue so the returned argmax is a valid distribution
    double psum = 0.0;
    for (double& x : p) {
        if (x < 0.0) x = 0.0;
        psum += x;
    }
    for (double& x : p) x /= psum;
    return CapacityResult{lower < 0.0 ? 0.0 : lower, ProbDist(std::move(p)), iter, converged};
}

// ---------------------------------------------------------------------------
// Quantum measures

inline double von_neumann_entropy(const DensityOperator& rho) {
    const Eigen::VectorXd lambda = rho.eigenvalues();
    double s = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        double l = lambda[i];
        if (l < 0.0) l = 0.0;  // eigenvalues in [-kTol, 0) are fp noise
        s -= detail::plog2p(l);
    }
    return s < 0.0 ? 0.0 : s;
}

class QuantumEnsemble {
public:
    explicit QuantumEnsemble(std::vector<std::pair<double, DensityOperator>> entries)
        : entries_(std::move(entries)) {
        detail::require(!entries_.empty(), "ensemble needs at least one entry");
        std::vector<double> probs;
        probs.reserve(entries_.size());
        for (const auto& [p, rho] : entries_) {
            probs.push_back(p);
            detail::require(rho.labels() == entries_.front().second.labels(),
                            "ensemble members must share labels");
        }
        dist_ = ProbDist(std::move(probs));

        Matrix avg = Matrix::Zero(entries_.front().second.dim(), entries_.front().second.dim());
        for (const auto& [p, rho] : entries_) avg += p * rho.matrix();
        average_.emplace(std::move(avg), entries_.front().second.labels());
    }

    const std::vector<std::pair<double, DensityOperator>>& entries() const { return entries_; }
    const ProbDist& probabilities() const { return dist_; }
    const DensityOperator& average() const { return *average_; }
    std::size_t size() const { return entries_.size(); }
    Eigen::Index dim() const { return entries_.front().second.dim(); }

private:
    std::vector<std::pair<double, DensityOperator>> entries_;
    ProbDist dist_ = ProbDist({1.0});
    std::optional<DensityOperator> average_;
};

// chi = S(rho_avg) - sum_i p_i S(rho_i)
inline double holevo_chi(const QuantumEnsemble& ens) {
    double chi = von_neumann_entropy(ens.average());
    for (const auto& [p, rho] : ens.entries()) chi -= p * von_neumann_entropy(rho);
    return chi < 0.0 && chi > -1e-12 ? 0.0 : chi;
}

// ---------------------------------------------------------------------------
// POVM

class POVM {
public:
    explicit POVM(std::vector<Matrix> effects) : effects_(std::move(effects)) {
        detail::require(!effects_.empty(), "POVM needs at least one effect");
        const Eigen::Index dim = effects_.front().rows();
        Matrix sum = Matrix::Zero(dim, dim);
        for (const Matrix& e : effects_) {
            detail::require(e.rows() == dim && e.cols() == dim, "POVM effect dimension mismatch");
            detail::require((e - e.adjoint()).cwiseAbs().maxCoeff() <= kTol,
                            "POVM effect is not Hermitian");
            Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
            detail::require(es.eigenvalues().minCoeff() >= -kTol,
                            "POVM effect has a negative eigenvalue");
            sum += e;
        }
        detail::require((sum - qcore::identity_matrix(static_cast<std::size_t>(dim)))
                                .cwiseAbs()
                                .maxCoeff() <= kTol,
                        "POVM effects do not sum to the identity (incomplete POVM)");
    }

    static POVM trivial(std::size_t dim) {
        return POVM({qcore::identity_matrix(dim)});
    }

    static POVM from_basis(const qcore::MeasurementBasis& basis) {
        return POVM(basis.projectors());
    }

    const std::vector<Matrix>& effects() const { return effects_; }
    std::size_t size() const { return effects_.size(); }
    Eigen::Index dim() const { return effects_.front().rows(); }

private:
    std::vector<Matrix> effects_;
};

// Mutual information of the joint distribution p(i,k) = p_i Tr(rho_i E_k)
// between ensemble index and measurement outcome.
inline double povm_mutual_information(const QuantumEnsemble& ens, const POVM& m) {
    detail::require(ens.dim() == m.dim(), "ensemble and POVM dimensions differ");
    const std::size_t ni = ens.size(), nk = m.size();

    std::vector<double> joint(ni * nk, 0.0);
    std::vector<double> pi(ni, 0.0), qk(nk, 0.0);
    for (std::size_t i = 0; i < ni; ++i) {
        const auto& [p, rho] = ens.entries()[i];
        for (std::size_t k = 0; k < nk; ++k) {
            double v = p * (rho.matrix() * m.effects()[k]).trace().real();
            if (v < 0.0) v = 0.0;
            joint[i * nk + k] = v;
            pi[i] += v;
            qk[k] += v;
        }
    }
    double mi = 0.0;
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t k = 0; k < nk; ++k) {
            const double v = joint[i * nk + k];
            if (v <= 0.0) continue;
            mi += v * std::log2(v / (pi[i] * qk[k]));
        }
    return mi < 0.0 ? 0.0 : mi;
}

// ---------------------------------------------------------------------------
// Typical subspace of n copies of a qubit state

struct TypicalSubspace {
    std::size_t dimension = 0;
    double retained_probability = 0.0;
};

// Sorts the eigenvalue-product weights of rho^(tensor n) in descending order
// and keeps the smallest eigenvector count whose cumulative weight reaches
// 1 - epsilon. Enumeration is by binomial class, exact up to n = 20.
inline TypicalSubspace typical_subspace(const DensityOperator& rho, int n_copies,
                                        double epsilon) {
    detail::require(rho.dim() == 2, "typical subspace is computed for qubit states");
    detail::require(n_copies >= 1, "need at least one copy");
    detail::require(n_copies <= 20, "n_copies too large for exact enumeration (max 20)");
    detail::require(epsilon >= 0.0 && epsilon < 1.0, "epsilon must lie in [0, 1)");

    Eigen::VectorXd lambda = rho.eigenvalues();
    double l1 = std::clamp(lambda.maxCoeff(), 0.0, 1.0);
    double l2 = std::clamp(lambda.minCoeff(), 0.0, 1.0);

    const double target = 1.0 - epsilon;
    double cum = 0.0;
    std::size_t dimension = 0;
    for (int k = 0; k <= n_copies; ++k) {
        const double w = std::pow(l1, n_copies - k) * std::pow(l2, k);
        // binomial coefficient C(n, k); exact in double up to n = 20
        double count = 1.0;
        for (int j = 0; j < k; ++j) count = count * (n_copies - j) / (j + 1);
        const auto cnt = static_cast<std::size_t>(std::llround(count));

        if (w <= 0.0) break;
        if (cum + static_cast<double>(cnt) * w >= target) {
            auto needed = static_cast<std::size_t>(std::ceil((target - cum) / w - 1e-12));
            if (needed < 1) needed = 1;
            if (needed > cnt) needed = cnt;
            dimension += needed;
            cum += static_cast<double>(needed) * w;
            return TypicalSubspace{dimension, cum};
        }
        cum += static_cast<double>(cnt) * w;
        dimension += cnt;
    }
    return TypicalSubspace{dimension, cum};
}

}  // namespace telesim::infotheory
