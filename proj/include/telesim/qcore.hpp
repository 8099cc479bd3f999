// qcore.hpp
// Exact complex linear algebra over labeled multi-qubit registers: state
// vectors, density operators, unitaries, tensor composition, partial trace
// and projective measurement.
//
// Conventions: a register carries an ordered list of distinct system labels;
// the leftmost label is the most significant bit of the amplitude index, and
// |up> maps to index 0, |down> to index 1.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "telesim/rng.hpp"

namespace telesim::qcore {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Label = std::string;
using Labels = std::vector<Label>;

// Tolerance for all algebraic identities (normalization, hermiticity,
// unitarity, completeness).
inline constexpr double kTol = 1e-10;

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline void check_labels_distinct(const Labels& labels) {
    Labels sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "labels must be pairwise distinct");
}

inline std::size_t label_position(const Labels& all, const Label& l) {
    auto it = std::find(all.begin(), all.end(), l);
    require(it != all.end(), "unknown system label: " + l);
    return static_cast<std::size_t>(it - all.begin());
}

inline std::vector<std::size_t> label_positions(const Labels& all, const Labels& subset) {
    std::vector<std::size_t> pos;
    pos.reserve(subset.size());
    for (const auto& l : subset) pos.push_back(label_position(all, l));
    return pos;
}

// Applies a 2^k x 2^k operator to the subsystems at the given register
// positions (positions are MSB-first with respect to the operator's own
// index), identity elsewhere. Works for non-unitary operators too, which is
// what projective measurement needs.
inline Vector apply_on_positions(const Vector& amps, std::size_t n_systems,
                                 const Matrix& op,
                                 const std::vector<std::size_t>& positions) {
    const std::size_t k = positions.size();
    const std::size_t sub = std::size_t{1} << k;
    require(static_cast<std::size_t>(op.rows()) == sub &&
                static_cast<std::size_t>(op.cols()) == sub,
            "operator dimension does not match its target count");
    const auto dim = static_cast<std::size_t>(amps.size());

    std::vector<std::size_t> masks(k);
    std::size_t target_union = 0;
    for (std::size_t j = 0; j < k; ++j) {
        masks[j] = std::size_t{1} << (n_systems - 1 - positions[j]);
        target_union |= masks[j];
    }
    std::vector<std::size_t> offsets(sub, 0);
    for (std::size_t m = 0; m < sub; ++m)
        for (std::size_t j = 0; j < k; ++j)
            if ((m >> (k - 1 - j)) & 1) offsets[m] |= masks[j];

    Vector out = Vector::Zero(static_cast<Eigen::Index>(dim));
    Vector x(static_cast<Eigen::Index>(sub));
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & target_union) continue;
        for (std::size_t m = 0; m < sub; ++m)
            x[static_cast<Eigen::Index>(m)] = amps[static_cast<Eigen::Index>(base | offsets[m])];
        Vector y = op * x;
        for (std::size_t m = 0; m < sub; ++m)
            out[static_cast<Eigen::Index>(base | offsets[m])] = y[static_cast<Eigen::Index>(m)];
    }
    return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pauli and identity matrices

inline Matrix identity_matrix(std::size_t dim) {
    return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

inline Matrix pauli_x_matrix() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix pauli_y_matrix() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix pauli_z_matrix() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// ---------------------------------------------------------------------------
// StateVector

class StateVector {
public:
    // A normalized amplitude vector over 2^n basis states. With
    // renormalize=false the input norm must already be 1 within kTol;
    // with renormalize=true any nonzero vector is accepted and scaled.
    StateVector(Vector amplitudes, Labels labels, bool renormalize = false)
        : amps_(std::move(amplitudes)), labels_(std::move(labels)) {
        detail::require(!labels_.empty(), "state needs at least one system label");
        detail::check_labels_distinct(labels_);
        const auto expected = std::size_t{1} << labels_.size();
        detail::require(static_cast<std::size_t>(amps_.size()) == expected,
                        "amplitude vector length must be 2^(number of labels)");
        const double norm = amps_.norm();
        detail::require(norm > 0.0, "zero amplitude vector");
        if (!renormalize)
            detail::require(std::abs(norm - 1.0) <= kTol,
                            "state is not normalized (pass renormalize to accept)");
        // a division by 1 +/- fp noise would only churn last bits
        if (std::abs(norm - 1.0) > 1e-13) amps_ /= norm;
    }

    const Vector& amplitudes() const { return amps_; }
    const Labels& labels() const { return labels_; }
    std::size_t num_systems() const { return labels_.size(); }
    Eigen::Index dim() const { return amps_.size(); }

    Complex amplitude(std::size_t index) const {
        return amps_[static_cast<Eigen::Index>(index)];
    }

private:
    Vector amps_;
    Labels labels_;
};

inline StateVector make_state(Vector amplitudes, Labels labels, bool renormalize = false) {
    return StateVector(std::move(amplitudes), std::move(labels), renormalize);
}

// Computational basis state |b_0 b_1 ... b_{n-1}>, bits given per label.
inline StateVector basis_state(const std::vector<int>& bits, Labels labels) {
    detail::require(bits.size() == labels.size(), "one bit per label required");
    std::size_t index = 0;
    for (int b : bits) {
        detail::require(b == 0 || b == 1, "basis bits must be 0 or 1");
        index = (index << 1) | static_cast<std::size_t>(b);
    }
    Vector v = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << labels.size()));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return StateVector(std::move(v), std::move(labels));
}

// ---------------------------------------------------------------------------
// Bell states

enum class BellKind { phi_plus, phi_minus, psi_plus, psi_minus };

inline constexpr std::array<BellKind, 4> kBellOrder = {
    BellKind::phi_plus, BellKind::phi_minus, BellKind::psi_plus, BellKind::psi_minus};

inline std::size_t bell_index(BellKind k) {
    switch (k) {
        case BellKind::phi_plus: return 0;
        case BellKind::phi_minus: return 1;
        case BellKind::psi_plus: return 2;
        case BellKind::psi_minus: return 3;
    }
    throw std::invalid_argument("invalid Bell kind");
}

inline const char* to_string(BellKind k) {
    switch (k) {
        case BellKind::phi_plus: return "phi+";
        case BellKind::phi_minus: return "phi-";
        case BellKind::psi_plus: return "psi+";
        case BellKind::psi_minus: return "psi-";
    }
    throw std::invalid_argument("invalid Bell kind");
}

inline BellKind bell_from_string(const std::string& s) {
    for (BellKind k : kBellOrder)
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown Bell state name: " + s);
}

inline Vector bell_amplitudes(BellKind k) {
    const double r = 1.0 / std::numbers::sqrt2;
    Vector v = Vector::Zero(4);
    switch (k) {
        case BellKind::phi_plus:  v[0] = r;  v[3] = r;  break;
        case BellKind::phi_minus: v[0] = r;  v[3] = -r; break;
        case BellKind::psi_plus:  v[1] = r;  v[2] = r;  break;
        case BellKind::psi_minus: v[1] = r;  v[2] = -r; break;
    }
    return v;
}

inline StateVector bell_state(BellKind kind, const Labels& labels) {
    detail::require(labels.size() == 2, "Bell states live on exactly two systems");
    return StateVector(bell_amplitudes(kind), labels);
}

// ---------------------------------------------------------------------------
// Tensor product and register reordering

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    for (const auto& l : b.labels())
        detail::require(std::find(a.labels().begin(), a.labels().end(), l) == a.labels().end(),
                        "tensor factors share label: " + l);
    Labels labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    Vector out(a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        for (Eigen::Index j = 0; j < b.dim(); ++j)
            out[i * b.dim() + j] = a.amplitudes()[i] * b.amplitudes()[j];
    return StateVector(std::move(out), std::move(labels));
}

// Permutes the tensor factor order; the amplitudes are re-indexed so that
// expectation values are unchanged.
inline StateVector reorder(const StateVector& s, const Labels& new_labels) {
    detail::require(new_labels.size() == s.num_systems(),
                    "reorder requires a permutation of the existing labels");
    const auto pos = detail::label_positions(s.labels(), new_labels);
    detail::check_labels_distinct(new_labels);
    const std::size_t n = s.num_systems();
    Vector out(s.dim());
    for (std::size_t old_index = 0; old_index < static_cast<std::size_t>(s.dim()); ++old_index) {
        std::size_t new_index = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t bit = (old_index >> (n - 1 - pos[j])) & 1;
            new_index |= bit << (n - 1 - j);
        }
        out[static_cast<Eigen::Index>(new_index)] = s.amplitudes()[static_cast<Eigen::Index>(old_index)];
    }
    return StateVector(std::move(out), new_labels);
}

// ---------------------------------------------------------------------------
// UnitaryOperator

class UnitaryOperator {
public:
    UnitaryOperator(Matrix matrix, Labels targets)
        : matrix_(std::move(matrix)), targets_(std::move(targets)) {
        detail::require(!targets_.empty(), "unitary needs at least one target label");
        detail::check_labels_distinct(targets_);
        const auto dim = std::size_t{1} << targets_.size();
        detail::require(static_cast<std::size_t>(matrix_.rows()) == dim &&
                            static_cast<std::size_t>(matrix_.cols()) == dim,
                        "unitary dimension must be 2^(target count)");
        const Matrix gram = matrix_ * matrix_.adjoint();
        detail::require((gram - identity_matrix(dim)).cwiseAbs().maxCoeff() <= kTol,
                        "matrix is not unitary");
    }

    const Matrix& matrix() const { return matrix_; }
    const Labels& targets() const { return targets_; }

private:
    Matrix matrix_;
    Labels targets_;
};

inline UnitaryOperator pauli_x(const Label& l) { return UnitaryOperator(pauli_x_matrix(), {l}); }
inline UnitaryOperator pauli_y(const Label& l) { return UnitaryOperator(pauli_y_matrix(), {l}); }
inline UnitaryOperator pauli_z(const Label& l) { return UnitaryOperator(pauli_z_matrix(), {l}); }
inline UnitaryOperator identity_op(const Label& l) { return UnitaryOperator(identity_matrix(2), {l}); }

inline StateVector apply_unitary(const StateVector& state, const UnitaryOperator& u) {
    const auto pos = detail::label_positions(state.labels(), u.targets());
    Vector out = detail::apply_on_positions(state.amplitudes(), state.num_systems(),
                                            u.matrix(), pos);
    return StateVector(std::move(out), state.labels());
}

// ---------------------------------------------------------------------------
// DensityOperator

class DensityOperator {
public:
    DensityOperator(Matrix matrix, Labels labels)
        : matrix_(std::move(matrix)), labels_(std::move(labels)) {
        detail::require(!labels_.empty(), "density operator needs at least one label");
        detail::check_labels_distinct(labels_);
        const auto dim = std::size_t{1} << labels_.size();
        detail::require(static_cast<std::size_t>(matrix_.rows()) == dim &&
                            static_cast<std::size_t>(matrix_.cols()) == dim,
                        "density matrix dimension must be 2^(number of labels)");
        detail::require((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= kTol,
                        "density matrix is not Hermitian");
        detail::require(std::abs(matrix_.trace().real() - 1.0) <= kTol &&
                            std::abs(matrix_.trace().imag()) <= kTol,
                        "density matrix trace must be 1");
        Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
        detail::require(es.eigenvalues().minCoeff() >= -kTol,
                        "density matrix has a negative eigenvalue");
    }

    const Matrix& matrix() const { return matrix_; }
    const Labels& labels() const { return labels_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    double purity() const { return (matrix_ * matrix_).trace().real(); }

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

private:
    Matrix matrix_;
    Labels labels_;
};

inline DensityOperator density_from_state(const StateVector& s) {
    Matrix m = s.amplitudes() * s.amplitudes().adjoint();
    return DensityOperator(std::move(m), s.labels());
}

inline DensityOperator maximally_mixed(const Labels& labels) {
    const auto dim = std::size_t{1} << labels.size();
    return DensityOperator(identity_matrix(dim) / static_cast<double>(dim), labels);
}

inline DensityOperator partial_trace(const DensityOperator& rho, const Labels& keep) {
    detail::require(!keep.empty(), "partial trace must keep at least one system");
    detail::check_labels_distinct(keep);
    const auto keep_pos = detail::label_positions(rho.labels(), keep);
    const std::size_t n = rho.labels().size();

    std::vector<std::size_t> traced_pos;
    for (std::size_t p = 0; p < n; ++p)
        if (std::find(keep_pos.begin(), keep_pos.end(), p) == keep_pos.end())
            traced_pos.push_back(p);

    const std::size_t nk = keep_pos.size();
    const std::size_t nt = traced_pos.size();
    const std::size_t dk = std::size_t{1} << nk;
    const std::size_t dt = std::size_t{1} << nt;

    std::vector<std::size_t> keep_addr(dk, 0);
    for (std::size_t i = 0; i < dk; ++i)
        for (std::size_t j = 0; j < nk; ++j)
            if ((i >> (nk - 1 - j)) & 1) keep_addr[i] |= std::size_t{1} << (n - 1 - keep_pos[j]);
    std::vector<std::size_t> traced_addr(dt, 0);
    for (std::size_t t = 0; t < dt; ++t)
        for (std::size_t j = 0; j < nt; ++j)
            if ((t >> (nt - 1 - j)) & 1) traced_addr[t] |= std::size_t{1} << (n - 1 - traced_pos[j]);

    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t i = 0; i < dk; ++i)
        for (std::size_t j = 0; j < dk; ++j) {
            Complex sum = 0;
            for (std::size_t t = 0; t < dt; ++t)
                sum += rho.matrix()(static_cast<Eigen::Index>(keep_addr[i] | traced_addr[t]),
                                    static_cast<Eigen::Index>(keep_addr[j] | traced_addr[t]));
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sum;
        }
    return DensityOperator(std::move(out), keep);
}

inline DensityOperator reduced_density(const StateVector& s, const Labels& keep) {
    return partial_trace(density_from_state(s), keep);
}

// ---------------------------------------------------------------------------
// Projective measurement

class MeasurementBasis {
public:
    // Orthogonal projectors on the subspace spanned by `targets`; they must
    // be idempotent, mutually orthogonal and sum to the identity.
    MeasurementBasis(std::vector<Matrix> projectors, std::vector<std::string> outcome_labels,
                     Labels targets)
        : projectors_(std::move(projectors)),
          outcomes_(std::move(outcome_labels)),
          targets_(std::move(targets)) {
        detail::require(!projectors_.empty(), "measurement basis needs projectors");
        detail::require(projectors_.size() == outcomes_.size(),
                        "one outcome label per projector required");
        detail::check_labels_distinct(targets_);
        const auto dim = std::size_t{1} << targets_.size();
        Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t a = 0; a < projectors_.size(); ++a) {
            const Matrix& p = projectors_[a];
            detail::require(static_cast<std::size_t>(p.rows()) == dim &&
                                static_cast<std::size_t>(p.cols()) == dim,
                            "projector dimension mismatch");
            detail::require((p * p - p).cwiseAbs().maxCoeff() <= kTol,
                            "projector is not idempotent");
            for (std::size_t b = a + 1; b < projectors_.size(); ++b)
                detail::require((p * projectors_[b]).cwiseAbs().maxCoeff() <= kTol,
                                "projectors are not mutually orthogonal");
            sum += p;
        }
        detail::require((sum - identity_matrix(dim)).cwiseAbs().maxCoeff() <= kTol,
                        "projectors do not sum to the identity");
    }

    const std::vector<Matrix>& projectors() const { return projectors_; }
    const std::vector<std::string>& outcomes() const { return outcomes_; }
    const Labels& targets() const { return targets_; }
    std::size_t size() const { return projectors_.size(); }

private:
    std::vector<Matrix> projectors_;
    std::vector<std::string> outcomes_;
    Labels targets_;
};

// The four Bell projectors on a pair of systems, ordered phi+, phi-, psi+, psi-.
inline MeasurementBasis bell_basis(const Labels& pair) {
    detail::require(pair.size() == 2, "Bell basis lives on exactly two systems");
    std::vector<Matrix> projectors;
    std::vector<std::string> names;
    for (BellKind k : kBellOrder) {
        const Vector v = bell_amplitudes(k);
        projectors.push_back(v * v.adjoint());
        names.emplace_back(to_string(k));
    }
    return MeasurementBasis(std::move(projectors), std::move(names), pair);
}

// Single-system computational basis {up, down}.
inline MeasurementBasis z_basis(const Label& l) {
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    Matrix p1 = Matrix::Zero(2, 2);
    p1(1, 1) = 1.0;
    return MeasurementBasis({p0, p1}, {"up", "down"}, {l});
}

struct MeasurementResult {
    std::size_t index = 0;     // projector index within the basis
    std::string outcome;       // outcome label
    double probability = 0.0;  // Born probability of the sampled branch
    StateVector post;          // renormalized post-measurement state
};

inline std::vector<double> born_probabilities(const StateVector& s, const MeasurementBasis& b) {
    const auto pos = detail::label_positions(s.labels(), b.targets());
    std::vector<double> probs;
    probs.reserve(b.size());
    for (const Matrix& p : b.projectors()) {
        Vector branch = detail::apply_on_positions(s.amplitudes(), s.num_systems(), p, pos);
        probs.push_back(branch.squaredNorm());
    }
    return probs;
}

// Projects onto a chosen outcome; the branch must have nonzero probability.
inline MeasurementResult project_outcome(const StateVector& s, const MeasurementBasis& b,
                                         std::size_t outcome_index) {
    detail::require(outcome_index < b.size(), "outcome index out of range");
    const auto pos = detail::label_positions(s.labels(), b.targets());
    Vector branch = detail::apply_on_positions(s.amplitudes(), s.num_systems(),
                                               b.projectors()[outcome_index], pos);
    const double p = branch.squaredNorm();
    if (p < 1e-12)
        throw std::invalid_argument("requested measurement branch has zero probability");
    branch /= std::sqrt(p);
    return MeasurementResult{outcome_index, b.outcomes()[outcome_index], p,
                             StateVector(std::move(branch), s.labels())};
}

// Samples an outcome with Born probabilities and collapses the state.
inline MeasurementResult measure(const StateVector& s, const MeasurementBasis& b,
                                 RandomStream& rng) {
    const auto probs = born_probabilities(s, b);
    const double u = rng.next_double();
    double cum = 0.0;
    std::size_t pick = b.size() - 1;
    bool chosen = false;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        cum += probs[k];
        if (u < cum) {
            pick = k;
            chosen = true;
            break;
        }
    }
    if (!chosen) {
        // u landed in the rounding slack past the last cumulative bin; take
        // the last outcome with nonvanishing probability
        for (std::size_t k = probs.size(); k-- > 0;)
            if (probs[k] >= 1e-12) {
                pick = k;
                break;
            }
    }
    return project_outcome(s, b, pick);
}

// ---------------------------------------------------------------------------
// Scalar diagnostics

inline std::array<double, 3> bloch_vector(const DensityOperator& rho) {
    detail::require(rho.dim() == 2, "Bloch vector is defined for a single qubit");
    const Matrix& m = rho.matrix();
    return {(m * pauli_x_matrix()).trace().real(),
            (m * pauli_y_matrix()).trace().real(),
            (m * pauli_z_matrix()).trace().real()};
}

// Squared-overlap convention: <psi|rho|psi>.
inline double fidelity(const StateVector& psi, const DensityOperator& rho) {
    detail::require(psi.labels() == rho.labels(), "fidelity requires matching labels");
    const Complex v = psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes();
    return v.real();
}

inline double fidelity(const StateVector& psi, const StateVector& phi) {
    detail::require(psi.labels() == phi.labels(), "fidelity requires matching labels");
    const Complex overlap = psi.amplitudes().adjoint() * phi.amplitudes();
    return std::norm(overlap);
}

inline double trace_distance(const DensityOperator& a, const DensityOperator& b) {
    detail::require(a.labels() == b.labels(), "trace distance requires matching labels");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace telesim::qcore
