// teleport.hpp
// The teleportation protocol engine. Builds the three-system initial state,
// decomposes it over the Bell basis of systems 1 and 2, and executes the
// protocol in four modes:
//
//   collapse    - projective Bell measurement, classical bits, correction
//   unitary     - no collapse: pointer qubits c,d record the outcome via the
//                 measurement interaction U_A, and Bob applies the
//                 conditional correction U_B
//   bohm        - branch analysis with definite spin vectors per branch and
//                 a sampled active branch
//   ensemble    - repeated collapse-level trials sorted into sub-ensembles
//                 by their two-bit records

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "telesim/qcore.hpp"
#include "telesim/rng.hpp"

namespace telesim::teleport {

using qcore::BellKind;
using qcore::Complex;
using qcore::DensityOperator;
using qcore::Label;
using qcore::Labels;
using qcore::Matrix;
using qcore::StateVector;
using qcore::UnitaryOperator;
using qcore::Vector;
using qcore::kTol;

// ---------------------------------------------------------------------------
// UnknownState

// The state to be teleported: chi = alpha |up> + beta |down>.
class UnknownState {
public:
    UnknownState(Complex alpha, Complex beta) : alpha_(alpha), beta_(beta) {
        const double norm2 = std::norm(alpha_) + std::norm(beta_);
        qcore::detail::require(std::abs(norm2 - 1.0) <= kTol,
                               "unknown state must satisfy |alpha|^2 + |beta|^2 = 1");
    }

    static UnknownState normalized(Complex alpha, Complex beta) {
        const double n = std::sqrt(std::norm(alpha) + std::norm(beta));
        qcore::detail::require(n > 0.0, "unknown state must be nonzero");
        return UnknownState(alpha / n, beta / n);
    }

    // uniform over the Bloch sphere (up to the physically irrelevant phase)
    static UnknownState haar_random(RandomStream& rng) {
        const Complex a(rng.next_gaussian(), rng.next_gaussian());
        const Complex b(rng.next_gaussian(), rng.next_gaussian());
        return normalized(a, b);
    }

    Complex alpha() const { return alpha_; }
    Complex beta() const { return beta_; }

    StateVector as_state(const Label& label = "1") const {
        Vector v(2);
        v << alpha_, beta_;
        return StateVector(std::move(v), {label}, /*renormalize=*/true);
    }

private:
    Complex alpha_, beta_;
};

// ---------------------------------------------------------------------------
// Branch operator and correction tables

namespace detail {

using qcore::detail::kron;
using qcore::detail::require;

// V such that resource = (1 x V) psi-, exactly including phase.
inline Matrix resource_adapter(BellKind resource) {
    switch (resource) {
        case BellKind::psi_minus: return qcore::identity_matrix(2);
        case BellKind::psi_plus: return -qcore::pauli_z_matrix();
        case BellKind::phi_minus: return qcore::pauli_x_matrix();
        case BellKind::phi_plus: return Complex(0, 1) * qcore::pauli_y_matrix();
    }
    throw std::invalid_argument("invalid Bell kind");
}

// Branch operators for the singlet resource: the relative state of system 3
// given Bell outcome k on systems 1,2 equals (branch op) |chi>.
inline Matrix singlet_branch_matrix(BellKind outcome) {
    switch (outcome) {
        case BellKind::phi_plus: return Complex(0, -1) * qcore::pauli_y_matrix();
        case BellKind::phi_minus: return qcore::pauli_x_matrix();
        case BellKind::psi_plus: return -qcore::pauli_z_matrix();
        case BellKind::psi_minus: return -qcore::identity_matrix(2);
    }
    throw std::invalid_argument("invalid Bell kind");
}

}  // namespace detail

inline Matrix branch_matrix(BellKind outcome, BellKind resource = BellKind::psi_minus) {
    return detail::resource_adapter(resource) * detail::singlet_branch_matrix(outcome);
}

// The unitary Bob applies on system 3 given the announced outcome; exactly
// inverts the branch operator. For the singlet these are
// i sigma_y, sigma_x, -sigma_z, -1 for phi+, phi-, psi+, psi-.
inline UnitaryOperator correction_unitary(BellKind outcome,
                                          BellKind resource = BellKind::psi_minus) {
    return UnitaryOperator(branch_matrix(outcome, resource).adjoint(), {"3"});
}

inline const char* correction_name(BellKind outcome) {
    switch (outcome) {
        case BellKind::phi_plus: return "i_sigma_y";
        case BellKind::phi_minus: return "sigma_x";
        case BellKind::psi_plus: return "neg_sigma_z";
        case BellKind::psi_minus: return "neg_identity";
    }
    throw std::invalid_argument("invalid Bell kind");
}

// Pointer bits recorded for each outcome: phi+ -> 00, phi- -> 01,
// psi+ -> 10, psi- -> 11.
inline std::array<int, 2> outcome_bits(BellKind outcome) {
    const auto k = qcore::bell_index(outcome);
    return {static_cast<int>(k >> 1), static_cast<int>(k & 1)};
}

namespace detail {

// Bob's system factorizes at the end of every run mode; the transcript
// records the squared overlap of chi with that pure state.
inline double final_bob_fidelity(const UnknownState& chi, const StateVector& state) {
    const auto rho3 = qcore::reduced_density(state, {"3"});
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho3.matrix());
    const Vector bob = es.eigenvectors().col(rho3.dim() - 1);
    return qcore::fidelity(chi.as_state("3"), StateVector(bob, {"3"}, true));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Protocol construction

// chi on system 1 tensored with the entangled resource on systems 2,3.
inline StateVector build_initial(const UnknownState& chi,
                                 BellKind resource = BellKind::psi_minus) {
    return qcore::tensor(chi.as_state("1"), qcore::bell_state(resource, {"2", "3"}));
}

struct BellBranch {
    BellKind outcome;
    double coefficient = 0.0;  // amplitude of the branch, 1/2 for Bell resources
    StateVector bob_state;     // relative state of system 3, phase included
};

// Decomposes a state on systems 1,2,3 over the Bell basis of 1,2. Each
// branch must carry amplitude 1/2 (Born weight 1/4) as any state of the
// chi x resource form does; other inputs are rejected.
inline std::array<BellBranch, 4> bell_decomposition(const StateVector& state) {
    detail::require(state.labels() == Labels{"1", "2", "3"},
                    "bell_decomposition expects the register 1,2,3");

    std::array<std::optional<BellBranch>, 4> out;
    Vector reconstructed = Vector::Zero(8);
    for (std::size_t k = 0; k < 4; ++k) {
        const Vector bell = qcore::bell_amplitudes(qcore::kBellOrder[k]);
        // contract <Bell_k|_{12} with the state; remaining vector lives on 3
        Vector rel = Vector::Zero(2);
        for (Eigen::Index pair = 0; pair < 4; ++pair)
            for (Eigen::Index i3 = 0; i3 < 2; ++i3)
                rel[i3] += std::conj(bell[pair]) * state.amplitudes()[pair * 2 + i3];
        const double coeff = rel.norm();
        if (std::abs(coeff - 0.5) > kTol)
            throw std::invalid_argument(
                "decomposition residual: state is not of the chi x resource form");
        Vector branch = rel / coeff;
        for (Eigen::Index pair = 0; pair < 4; ++pair)
            for (Eigen::Index i3 = 0; i3 < 2; ++i3)
                reconstructed[pair * 2 + i3] += coeff * bell[pair] * branch[i3];
        out[k] = BellBranch{qcore::kBellOrder[k], coeff,
                            StateVector(std::move(branch), {"3"})};
    }
    if ((reconstructed - state.amplitudes()).norm() > kTol)
        throw std::invalid_argument("decomposition residual exceeds tolerance");
    return {std::move(*out[0]), std::move(*out[1]), std::move(*out[2]), std::move(*out[3])};
}

// ---------------------------------------------------------------------------
// Transcripts

struct Stage {
    std::string name;
    StateVector state;
    // single-system reduced states in register order
    std::vector<std::pair<Label, DensityOperator>> reduced;
};

inline Stage record_stage(std::string name, StateVector state) {
    std::vector<std::pair<Label, DensityOperator>> reduced;
    reduced.reserve(state.num_systems());
    for (const Label& l : state.labels())
        reduced.emplace_back(l, qcore::reduced_density(state, {l}));
    return Stage{std::move(name), std::move(state), std::move(reduced)};
}

struct TeleportTranscript {
    std::string mode;
    std::vector<Stage> stages;
    std::optional<BellKind> outcome;               // collapse/bohm runs only
    std::optional<std::array<int, 2>> classical_bits;
    std::optional<std::string> correction;
    double final_fidelity = 0.0;

    // classical communication consumed by this run
    std::size_t classical_bits_sent() const { return classical_bits ? 2 : 0; }
};

// ---------------------------------------------------------------------------
// Collapse mode

inline TeleportTranscript run_collapse(const UnknownState& chi, RandomStream& rng,
                                       BellKind resource = BellKind::psi_minus) {
    TeleportTranscript t;
    t.mode = "collapse";

    const StateVector initial = build_initial(chi, resource);
    t.stages.push_back(record_stage("initial", initial));

    const auto res = qcore::measure(initial, qcore::bell_basis({"1", "2"}), rng);
    const BellKind outcome = qcore::kBellOrder[res.index];
    t.outcome = outcome;
    t.stages.push_back(record_stage("post-measurement", res.post));

    // the two-bit record crosses to Bob; the quantum state is unchanged
    t.classical_bits = outcome_bits(outcome);
    t.stages.push_back(record_stage("post-classical-bits", res.post));

    const auto corr = correction_unitary(outcome, resource);
    t.correction = correction_name(outcome);
    const StateVector done = qcore::apply_unitary(res.post, corr);
    t.stages.push_back(record_stage("post-correction", done));

    t.final_fidelity = detail::final_bob_fidelity(chi, done);
    return t;
}

// ---------------------------------------------------------------------------
// Unitary (no-collapse) mode

// Alice's ideal measurement interaction on systems 1,2 and pointer qubits
// c,d: within each Bell subspace the pointer bits are written by NOTs, so
// Bell_k x |00> maps to Bell_k x |outcome bits>.
inline UnitaryOperator measurement_interaction_ua() {
    const Matrix x = qcore::pauli_x_matrix();
    const Matrix one = qcore::identity_matrix(2);
    Matrix u = Matrix::Zero(16, 16);
    for (std::size_t k = 0; k < 4; ++k) {
        const Vector bell = qcore::bell_amplitudes(qcore::kBellOrder[k]);
        const Matrix proj = bell * bell.adjoint();
        const auto bits = outcome_bits(qcore::kBellOrder[k]);
        const Matrix pointer = detail::kron(bits[0] ? x : one, bits[1] ? x : one);
        u += detail::kron(proj, pointer);
    }
    return UnitaryOperator(std::move(u), {"1", "2", "c", "d"});
}

// Bob's conditional correction keyed on the pointer bits:
// P_00 x (i sigma_y) + P_01 x sigma_x + P_10 x (-sigma_z) + P_11 x (-1).
inline UnitaryOperator correction_interaction_ub(BellKind resource = BellKind::psi_minus) {
    Matrix u = Matrix::Zero(8, 8);
    for (std::size_t k = 0; k < 4; ++k) {
        Matrix pointer = Matrix::Zero(4, 4);
        pointer(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
        u += detail::kron(pointer, branch_matrix(qcore::kBellOrder[k], resource).adjoint());
    }
    return UnitaryOperator(std::move(u), {"c", "d", "3"});
}

inline TeleportTranscript run_unitary(const UnknownState& chi,
                                      BellKind resource = BellKind::psi_minus) {
    TeleportTranscript t;
    t.mode = "unitary";

    const StateVector total =
        qcore::tensor(build_initial(chi, resource), qcore::basis_state({0, 0}, {"c", "d"}));
    t.stages.push_back(record_stage("initial", total));

    const StateVector mid = qcore::apply_unitary(total, measurement_interaction_ua());
    t.stages.push_back(record_stage("post-ua", mid));

    const StateVector done = qcore::apply_unitary(mid, correction_interaction_ub(resource));
    t.stages.push_back(record_stage("post-ub", done));

    t.correction = "ub";
    t.final_fidelity = detail::final_bob_fidelity(chi, done);
    return t;
}

// ---------------------------------------------------------------------------
// No-signalling check

enum class PreBitStage { collapse_averaged, unitary_post_measurement };

// Maximum deviation (trace distance from the maximally mixed state) of Bob's
// reduced state before the classical bits arrive, across the given samples
// and across measured / not-measured scenarios.
inline double no_signalling_check(const std::vector<UnknownState>& samples,
                                  PreBitStage stage) {
    detail::require(samples.size() >= 2, "need at least two sample states");
    const DensityOperator mixed = qcore::maximally_mixed({"3"});
    const auto basis = qcore::bell_basis({"1", "2"});

    double worst = 0.0;
    for (const UnknownState& chi : samples) {
        const StateVector initial = build_initial(chi);

        // Alice has not measured
        const auto rho_unmeasured = qcore::reduced_density(initial, {"3"});
        worst = std::max(worst, qcore::trace_distance(rho_unmeasured, mixed));

        // Alice has measured, bits not yet sent
        Matrix averaged = Matrix::Zero(2, 2);
        if (stage == PreBitStage::collapse_averaged) {
            for (std::size_t k = 0; k < 4; ++k) {
                const auto res = qcore::project_outcome(initial, basis, k);
                averaged += res.probability *
                            qcore::reduced_density(res.post, {"3"}).matrix();
            }
        } else {
            const StateVector total =
                qcore::tensor(initial, qcore::basis_state({0, 0}, {"c", "d"}));
            const StateVector mid = qcore::apply_unitary(total, measurement_interaction_ua());
            averaged = qcore::reduced_density(mid, {"3"}).matrix();
        }
        worst = std::max(worst,
                         qcore::trace_distance(DensityOperator(averaged, {"3"}), mixed));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Bohm branch analysis

struct BohmBranch {
    BellKind outcome;
    double probability = 0.0;
    StateVector bob_state;
    std::array<double, 3> spin{};  // Bloch vector of the branch state
};

struct BohmBranchReport {
    std::array<double, 3> spin1_pre{};  // s(alpha, beta) of the unknown state
    std::array<double, 3> spin2_pre{};  // zero for the singlet resource
    std::array<double, 3> spin3_pre{};
    std::vector<BohmBranch> branches;   // four entries, Bell order
    BellKind active = BellKind::phi_plus;  // branch holding the configuration
    double corrected_fidelity = 0.0;       // Bob's state after correcting the active branch
};

// The configuration point selects one branch with Born weight; Bob's spin
// vector jumps from zero to the selected branch's vector at that moment.
inline BohmBranchReport bohm_branch_analysis(const UnknownState& chi, RandomStream& rng) {
    const StateVector initial = build_initial(chi);

    BohmBranchReport report;
    report.spin1_pre = qcore::bloch_vector(qcore::reduced_density(initial, {"1"}));
    report.spin2_pre = qcore::bloch_vector(qcore::reduced_density(initial, {"2"}));
    report.spin3_pre = qcore::bloch_vector(qcore::reduced_density(initial, {"3"}));

    const auto branches = bell_decomposition(initial);
    std::array<double, 4> probs{};
    report.branches.reserve(4);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& b = branches[k];
        probs[k] = b.coefficient * b.coefficient;
        report.branches.push_back(BohmBranch{
            b.outcome, probs[k], b.bob_state,
            qcore::bloch_vector(qcore::density_from_state(b.bob_state))});
    }

    const double u = rng.next_double();
    double cum = 0.0;
    std::size_t active = 3;
    for (std::size_t k = 0; k < 4; ++k) {
        cum += probs[k];
        if (u < cum) {
            active = k;
            break;
        }
    }
    report.active = qcore::kBellOrder[active];

    const StateVector corrected = qcore::apply_unitary(
        report.branches[active].bob_state, correction_unitary(report.active));
    report.corrected_fidelity = qcore::fidelity(chi.as_state("3"), corrected);
    return report;
}

// ---------------------------------------------------------------------------
// Factorization structure

struct FactorizationReport {
    std::string stage;
    std::vector<Labels> groups;   // disjoint, covering all labels
    std::vector<bool> certified;  // purity of the group's reduced state >= threshold
};

namespace detail {

// Subsystem atoms: protocol systems 1,2,3 individually; any remaining labels
// (the measurement pointer) as one unit, matching the single pointer degree
// of freedom they realize.
inline std::vector<Labels> protocol_atoms(const Labels& labels) {
    std::vector<Labels> atoms;
    Labels pointer;
    for (const Label& l : labels) {
        if (l == "1" || l == "2" || l == "3")
            atoms.push_back({l});
        else
            pointer.push_back(l);
    }
    if (!pointer.empty()) atoms.push_back(std::move(pointer));
    return atoms;
}

}  // namespace detail

// Finest partition of the register into groups of atoms whose reduced states
// are pure. Groups are reported in register order of their first label.
inline FactorizationReport factorization_structure(const StateVector& state,
                                                   std::string stage_name,
                                                   double purity_threshold = 1.0 - 1e-10) {
    const auto atoms = detail::protocol_atoms(state.labels());
    const std::size_t m = atoms.size();

    std::vector<bool> assigned(m, false);
    std::vector<std::pair<Labels, bool>> found;

    auto group_labels = [&](std::size_t mask) {
        Labels ls;
        for (std::size_t a = 0; a < m; ++a)
            if (mask & (std::size_t{1} << a))
                ls.insert(ls.end(), atoms[a].begin(), atoms[a].end());
        return ls;
    };

    std::size_t remaining = m;
    while (remaining > 0) {
        bool carved = false;
        // smallest pure subset of the remaining atoms, skipping the full set
        for (std::size_t size = 1; size < remaining && !carved; ++size) {
            for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
                if (static_cast<std::size_t>(std::popcount(mask)) != size) continue;
                bool ok = true;
                for (std::size_t a = 0; a < m; ++a)
                    if ((mask & (std::size_t{1} << a)) && assigned[a]) ok = false;
                if (!ok) continue;
                const Labels ls = group_labels(mask);
                const double purity = qcore::reduced_density(state, ls).purity();
                if (purity >= purity_threshold) {
                    found.emplace_back(ls, true);
                    for (std::size_t a = 0; a < m; ++a)
                        if (mask & (std::size_t{1} << a)) assigned[a] = true;
                    remaining -= size;
                    carved = true;
                    break;
                }
            }
        }
        if (!carved) {
            // the rest is one irreducible group
            Labels ls;
            for (std::size_t a = 0; a < m; ++a)
                if (!assigned[a]) ls.insert(ls.end(), atoms[a].begin(), atoms[a].end());
            const double purity = qcore::reduced_density(state, ls).purity();
            found.emplace_back(ls, purity >= purity_threshold);
            remaining = 0;
        }
    }

    // order groups by the position of their first label in the register
    auto position = [&](const Labels& g) {
        return qcore::detail::label_position(state.labels(), g.front());
    };
    std::sort(found.begin(), found.end(),
              [&](const auto& a, const auto& b) { return position(a.first) < position(b.first); });

    FactorizationReport report;
    report.stage = std::move(stage_name);
    for (auto& [ls, cert] : found) {
        report.groups.push_back(std::move(ls));
        report.certified.push_back(cert);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Ensemble / statistical mode

enum class EnsembleMode { ensemble, statistical };

inline const char* to_string(EnsembleMode m) {
    return m == EnsembleMode::ensemble ? "ensemble" : "statistical";
}

struct SubEnsemble {
    BellKind outcome;
    std::size_t count = 0;
    StateVector uncorrected_state;     // the branch state shared by the sub-ensemble
    double corrected_fidelity = 0.0;   // fidelity with chi after the branch correction
};

struct EnsembleReport {
    EnsembleMode mode = EnsembleMode::ensemble;
    std::size_t runs = 0;
    std::array<std::size_t, 4> counts{};
    std::size_t classical_bits_sent = 0;

    // populated in ensemble mode only: the statistical reading ascribes no
    // state to individual systems or sub-ensembles
    std::optional<std::array<SubEnsemble, 4>> sub_ensembles;
    std::optional<DensityOperator> pooled_uncorrected;
    std::optional<double> pooled_trace_distance;  // from the maximally mixed state
};

// Runs m collapse-level trials on identically prepared systems. The two-bit
// records sort Bob's systems into four sub-ensembles, each a fixed rotation
// away from chi; correcting each yields chi. Before correction the pooled
// mixture is maximally mixed up to statistical fluctuation.
inline EnsembleReport run_ensemble(const UnknownState& chi, std::size_t m, RandomStream& rng,
                                   EnsembleMode mode = EnsembleMode::ensemble,
                                   BellKind resource = BellKind::psi_minus) {
    detail::require(m >= 1, "ensemble mode needs at least one run");

    EnsembleReport report;
    report.mode = mode;
    report.runs = m;

    const StateVector initial = build_initial(chi, resource);
    const auto basis = qcore::bell_basis({"1", "2"});
    for (std::size_t t = 0; t < m; ++t) {
        const auto res = qcore::measure(initial, basis, rng);
        ++report.counts[res.index];
    }
    report.classical_bits_sent = 2 * m;

    if (mode == EnsembleMode::statistical) return report;

    const StateVector chi3 = chi.as_state("3");
    std::array<std::optional<SubEnsemble>, 4> subs;
    Matrix pooled = Matrix::Zero(2, 2);
    for (std::size_t k = 0; k < 4; ++k) {
        const BellKind outcome = qcore::kBellOrder[k];
        StateVector branch(branch_matrix(outcome, resource) * chi3.amplitudes(), {"3"}, true);
        const StateVector corrected =
            qcore::apply_unitary(branch, correction_unitary(outcome, resource));
        const double f = qcore::fidelity(chi3, corrected);
        pooled += (static_cast<double>(report.counts[k]) / static_cast<double>(m)) *
                  (branch.amplitudes() * branch.amplitudes().adjoint());
        subs[k] = SubEnsemble{outcome, report.counts[k], std::move(branch), f};
    }
    report.sub_ensembles = {std::move(*subs[0]), std::move(*subs[1]), std::move(*subs[2]),
                            std::move(*subs[3])};
    report.pooled_uncorrected.emplace(std::move(pooled), Labels{"3"});
    report.pooled_trace_distance =
        qcore::trace_distance(*report.pooled_uncorrected, qcore::maximally_mixed({"3"}));
    return report;
}

}  // namespace telesim::teleport
