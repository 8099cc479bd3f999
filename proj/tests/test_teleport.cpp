#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "telesim/teleport.hpp"
#include "test_util.hpp"

using namespace telesim;
using namespace telesim::teleport;
using namespace telesim::qcore;
using Catch::Approx;

namespace {
const double kISqrt2 = 1.0 / std::numbers::sqrt2;

UnknownState fixed_chi() {
    return UnknownState(Complex(0.6, 0.0), Complex(0.0, 0.8));
}
}  // namespace

TEST_CASE("unknown states must be normalized", "[teleport]") {
    CHECK_THROWS_AS(UnknownState(Complex(1, 0), Complex(1, 0)), std::invalid_argument);
    const auto fixed = UnknownState::normalized(Complex(1, 0), Complex(1, 0));
    CHECK(std::abs(fixed.alpha() - Complex(kISqrt2, 0)) < 1e-12);

    RandomStream rng(301);
    for (int t = 0; t < 10; ++t) {
        const auto chi = UnknownState::haar_random(rng);
        CHECK(std::norm(chi.alpha()) + std::norm(chi.beta()) == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("build_initial produces the chi x singlet state", "[teleport]") {
    const auto up = UnknownState(Complex(1, 0), Complex(0, 0));
    const auto total = build_initial(up);
    REQUIRE(total.labels() == Labels{"1", "2", "3"});
    // (1/sqrt2)(|up up down> - |up down up>)
    CHECK(total.amplitude(0b001).real() == Approx(kISqrt2).margin(1e-12));
    CHECK(total.amplitude(0b010).real() == Approx(-kISqrt2).margin(1e-12));

    RandomStream rng(303);
    for (int t = 0; t < 10; ++t) {
        const auto chi = UnknownState::haar_random(rng);
        const auto state = build_initial(chi);
        const auto rho3 = reduced_density(state, {"3"});
        CHECK((rho3.matrix() - 0.5 * identity_matrix(2)).cwiseAbs().maxCoeff() < 1e-10);
        // system 1 still factorizes as |chi><chi|
        CHECK(fidelity(chi.as_state("1"), reduced_density(state, {"1"})) ==
              Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("bell decomposition reproduces the branch operator table", "[teleport]") {
    RandomStream rng(307);
    const auto chi = UnknownState::haar_random(rng);
    const auto state = build_initial(chi);
    const auto branches = bell_decomposition(state);

    const Complex a = chi.alpha(), b = chi.beta();
    // branch states: phi+ -> alpha|down> - beta|up>;  phi- -> alpha|down> + beta|up>;
    //                psi+ -> -alpha|up> + beta|down>; psi- -> -(alpha|up> + beta|down>)
    const std::array<std::array<Complex, 2>, 4> expected = {{
        {-b, a},
        {b, a},
        {-a, b},
        {-a, -b},
    }};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(branches[k].coefficient == Approx(0.5).margin(1e-10));
        CHECK(std::abs(branches[k].bob_state.amplitude(0) - expected[k][0]) < 1e-10);
        CHECK(std::abs(branches[k].bob_state.amplitude(1) - expected[k][1]) < 1e-10);
        // same thing through the operator table
        const Vector via_op = branch_matrix(branches[k].outcome) * chi.as_state("3").amplitudes();
        CHECK((branches[k].bob_state.amplitudes() - via_op).norm() < 1e-10);
    }

    // completeness: the four branch terms rebuild the state (checked inside
    // bell_decomposition; a non-product-form state must be rejected)
    CHECK_THROWS_AS(bell_decomposition(basis_state({0, 0, 0}, {"1", "2", "3"})),
                    std::invalid_argument);
}

TEST_CASE("correction unitaries invert the branch operators", "[teleport]") {
    RandomStream rng(311);
    const auto chi = UnknownState::haar_random(rng);
    const auto chi3 = chi.as_state("3");

    for (BellKind k : kBellOrder) {
        const auto corr = correction_unitary(k);
        // unitarity is enforced by the type; the composition must be exact
        const Matrix prod = corr.matrix() * branch_matrix(k);
        CHECK((prod - identity_matrix(2)).cwiseAbs().maxCoeff() < 1e-12);

        const StateVector branch(branch_matrix(k) * chi3.amplitudes(), {"3"}, true);
        const auto fixed = apply_unitary(branch, corr);
        CHECK(fidelity(chi3, fixed) == Approx(1.0).margin(1e-10));
    }

    // the singlet-resource corrections are i sigma_y, sigma_x, -sigma_z, -1
    CHECK((correction_unitary(BellKind::phi_plus).matrix() -
           Complex(0, 1) * pauli_y_matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((correction_unitary(BellKind::phi_minus).matrix() - pauli_x_matrix())
              .cwiseAbs().maxCoeff() < 1e-12);
    CHECK((correction_unitary(BellKind::psi_plus).matrix() + pauli_z_matrix())
              .cwiseAbs().maxCoeff() < 1e-12);
    CHECK((correction_unitary(BellKind::psi_minus).matrix() + identity_matrix(2))
              .cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("collapse runs teleport perfectly and scramble Alice's system", "[teleport]") {
    RandomStream rng(313);
    for (int t = 0; t < 20; ++t) {
        const auto chi = UnknownState::haar_random(rng);
        const auto transcript = run_collapse(chi, rng);
        CHECK(transcript.final_fidelity == Approx(1.0).margin(1e-10));
        REQUIRE(transcript.stages.size() == 4);
        CHECK(transcript.stages[0].name == "initial");
        CHECK(transcript.stages[3].name == "post-correction");
        REQUIRE(transcript.outcome.has_value());
        REQUIRE(transcript.classical_bits.has_value());
        CHECK(transcript.classical_bits_sent() == 2);

        // post-measurement, Alice's system is maximally mixed: no trace of chi
        const auto& post = transcript.stages[1];
        const auto rho1 = post.reduced[0].second;
        CHECK((rho1.matrix() - 0.5 * identity_matrix(2)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(fidelity(chi.as_state("1"), rho1) == Approx(0.5).margin(1e-10));
    }
}

TEST_CASE("Bob's pre-bit state averaged over outcomes is maximally mixed", "[teleport]") {
    RandomStream rng(317);
    const auto chi = UnknownState::haar_random(rng);
    const auto initial = build_initial(chi);
    const auto basis = bell_basis({"1", "2"});

    Matrix avg = Matrix::Zero(2, 2);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto res = project_outcome(initial, basis, k);
        CHECK(res.probability == Approx(0.25).margin(1e-10));
        avg += res.probability * reduced_density(res.post, {"3"}).matrix();
    }
    CHECK((avg - 0.5 * identity_matrix(2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("collapse outcome frequencies are uniform", "[teleport][statistical]") {
    RandomStream rng(331);
    const auto chi = fixed_chi();
    std::array<std::size_t, 4> counts{};
    const std::size_t n = 20000;
    for (std::size_t t = 0; t < n; ++t) {
        RandomStream sub(331, t);
        const auto transcript = run_collapse(chi, sub);
        ++counts[bell_index(*transcript.outcome)];
    }
    const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
    for (std::size_t k = 0; k < 4; ++k) {
        const double freq = static_cast<double>(counts[k]) / static_cast<double>(n);
        CHECK(std::abs(freq - 0.25) < 4.0 * sigma);
    }
}

TEST_CASE("the measurement interaction writes the outcome bits", "[teleport]") {
    const auto ua = measurement_interaction_ua();
    REQUIRE(ua.targets() == Labels{"1", "2", "c", "d"});

    struct Case {
        BellKind kind;
        std::vector<int> bits;
    };
    for (const auto& [kind, bits] : {Case{BellKind::phi_plus, {0, 0}},
                                     Case{BellKind::phi_minus, {0, 1}},
                                     Case{BellKind::psi_plus, {1, 0}},
                                     Case{BellKind::psi_minus, {1, 1}}}) {
        const auto in = tensor(bell_state(kind, {"1", "2"}), basis_state({0, 0}, {"c", "d"}));
        const auto out = apply_unitary(in, ua);
        const auto expected =
            tensor(bell_state(kind, {"1", "2"}), basis_state(bits, {"c", "d"}));
        CHECK((out.amplitudes() - expected.amplitudes()).norm() < 1e-10);
    }
}

TEST_CASE("the conditional correction acts blockwise on the pointer", "[teleport]") {
    const auto ub = correction_interaction_ub();
    REQUIRE(ub.targets() == Labels{"c", "d", "3"});

    RandomStream rng(337);
    const auto chi = UnknownState::haar_random(rng);
    // |11>_cd x (-chi_3)  ->  |11>_cd x chi_3
    const auto in = tensor(basis_state({1, 1}, {"c", "d"}),
                           StateVector(-1.0 * chi.as_state("3").amplitudes(), {"3"}, true));
    const auto out = apply_unitary(in, ub);
    const auto rho3 = reduced_density(out, {"3"});
    CHECK(fidelity(chi.as_state("3"), rho3) == Approx(1.0).margin(1e-10));

    // U_B carries no dependence on chi: fixed matrix entries
    CHECK((ub.matrix().block(6, 6, 2, 2) + identity_matrix(2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("the unitary-mode run is maximally mixed mid-protocol and exact at the end",
          "[teleport]") {
    RandomStream rng(347);
    const auto chi = UnknownState::haar_random(rng);
    const auto t = run_unitary(chi);
    REQUIRE(t.stages.size() == 3);
    CHECK_FALSE(t.outcome.has_value());
    CHECK(t.classical_bits_sent() == 0);

    // after U_A every single-system reduced state is 1/2 identity
    const auto& mid = t.stages[1];
    REQUIRE(mid.reduced.size() == 5);
    for (const auto& [label, rho] : mid.reduced)
        CHECK((rho.matrix() - 0.5 * identity_matrix(2)).cwiseAbs().maxCoeff() < 1e-10);

    // final state: (1/2) sum_k Bell_k x chi_3 x bits_k, built index by index
    Vector expected = Vector::Zero(32);
    const Complex a = chi.alpha(), b = chi.beta();
    for (std::size_t k = 0; k < 4; ++k) {
        const Vector bell = bell_amplitudes(kBellOrder[k]);
        const auto bits = outcome_bits(kBellOrder[k]);
        const std::size_t pointer = static_cast<std::size_t>(bits[0]) * 2 +
                                    static_cast<std::size_t>(bits[1]);
        for (std::size_t pair = 0; pair < 4; ++pair)
            for (std::size_t i3 = 0; i3 < 2; ++i3) {
                const std::size_t index = (pair << 3) | (i3 << 2) | pointer;
                expected[static_cast<Eigen::Index>(index)] +=
                    0.5 * bell[static_cast<Eigen::Index>(pair)] * (i3 == 0 ? a : b);
            }
    }
    CHECK((t.stages[2].state.amplitudes() - expected).norm() < 1e-10);

    CHECK(t.final_fidelity == Approx(1.0).margin(1e-10));
    // system 3 factorizes while 1,2,c,d stay entangled with each other
    CHECK(reduced_density(t.stages[2].state, {"3"}).purity() == Approx(1.0).margin(1e-10));
    CHECK(reduced_density(t.stages[2].state, {"1", "2"}).purity() < 0.9);
}

TEST_CASE("collapse and unitary modes agree branch by branch", "[teleport]") {
    RandomStream rng(349);
    const auto chi = UnknownState::haar_random(rng);
    const auto unitary = run_unitary(chi);
    const auto& final_state = unitary.stages[2].state;

    const auto initial = build_initial(chi);
    const auto basis = bell_basis({"1", "2"});
    for (std::size_t k = 0; k < 4; ++k) {
        // collapse path: outcome k, then correction
        const auto res = project_outcome(initial, basis, k);
        const auto corrected = apply_unitary(res.post, correction_unitary(kBellOrder[k]));
        const auto bob_collapse = reduced_density(corrected, {"3"});

        // unitary path: condition the final state on pointer value k
        const auto bits = outcome_bits(kBellOrder[k]);
        Matrix p = Matrix::Zero(4, 4);
        const auto idx = static_cast<Eigen::Index>(bits[0] * 2 + bits[1]);
        p(idx, idx) = 1.0;
        MeasurementBasis pointer_basis({p, identity_matrix(4) - p}, {"hit", "miss"},
                                       {"c", "d"});
        const auto conditioned = project_outcome(final_state, pointer_basis, 0);
        CHECK(conditioned.probability == Approx(0.25).margin(1e-10));
        const auto bob_unitary = reduced_density(conditioned.post, {"3"});

        CHECK(trace_distance(bob_collapse, bob_unitary) < 1e-10);
        CHECK(fidelity(chi.as_state("3"), bob_unitary) == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("no signalling: Bob's pre-bit state is chi-independent", "[teleport]") {
    RandomStream rng(353);
    std::vector<UnknownState> samples;
    samples.reserve(100);
    for (int i = 0; i < 100; ++i) samples.push_back(UnknownState::haar_random(rng));

    CHECK(no_signalling_check(samples, PreBitStage::collapse_averaged) < 1e-10);
    CHECK(no_signalling_check(samples, PreBitStage::unitary_post_measurement) < 1e-10);

    // the extreme pair: identical reduced states before any measurement
    const auto up = UnknownState(Complex(1, 0), Complex(0, 0));
    const auto down = UnknownState(Complex(0, 0), Complex(1, 0));
    const auto r_up = reduced_density(build_initial(up), {"3"});
    const auto r_down = reduced_density(build_initial(down), {"3"});
    CHECK((r_up.matrix() - r_down.matrix()).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(no_signalling_check({up}, PreBitStage::collapse_averaged),
                    std::invalid_argument);
}

TEST_CASE("Bohm branch analysis: spin vectors before and after the jump", "[teleport]") {
    RandomStream rng(359);
    const auto chi = UnknownState::haar_random(rng);
    const auto report = bohm_branch_analysis(chi, rng);

    // systems 2,3 start with zero spin vector (singlet halves)
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(report.spin2_pre[i]) < 1e-10);
        CHECK(std::abs(report.spin3_pre[i]) < 1e-10);
    }

    const auto s = bloch_vector(density_from_state(chi.as_state("1")));
    for (int i = 0; i < 3; ++i) CHECK(report.spin1_pre[i] == Approx(s[i]).margin(1e-10));

    // branch spin vectors equal the conjugated vectors: for branch operator U
    // the state U|chi> has Bloch components Tr(U rho U^dag sigma_i)
    for (const auto& branch : report.branches) {
        CHECK(branch.probability == Approx(0.25).margin(1e-10));
        const Matrix u = branch_matrix(branch.outcome);
        const Matrix rho = u * density_from_state(chi.as_state("1")).matrix() * u.adjoint();
        const std::array<Matrix, 3> paulis{pauli_x_matrix(), pauli_y_matrix(),
                                           pauli_z_matrix()};
        for (int i = 0; i < 3; ++i)
            CHECK(branch.spin[i] == Approx((rho * paulis[i]).trace().real()).margin(1e-10));
    }

    // psi- branch: spin vector equals s(alpha, beta) itself
    const auto& psim = report.branches[3];
    for (int i = 0; i < 3; ++i) CHECK(psim.spin[i] == Approx(s[i]).margin(1e-10));

    // phi- branch (sigma_x chi): (s_x, -s_y, -s_z)
    const auto& phim = report.branches[1];
    CHECK(phim.spin[0] == Approx(s[0]).margin(1e-10));
    CHECK(phim.spin[1] == Approx(-s[1]).margin(1e-10));
    CHECK(phim.spin[2] == Approx(-s[2]).margin(1e-10));

    CHECK(report.corrected_fidelity == Approx(1.0).margin(1e-10));
}

TEST_CASE("the active Bohm branch is sampled uniformly", "[teleport][statistical]") {
    const auto chi = fixed_chi();
    std::size_t hits = 0;
    const std::size_t n = 20000;
    for (std::size_t t = 0; t < n; ++t) {
        RandomStream sub(361, t);
        const auto report = bohm_branch_analysis(chi, sub);
        if (report.active == BellKind::psi_minus) ++hits;
    }
    const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(hits) / static_cast<double>(n) - 0.25) < 4.0 * sigma);
}

TEST_CASE("factorization structure tracks the three protocol stages", "[teleport]") {
    RandomStream rng(367);
    const auto chi = UnknownState::haar_random(rng);
    const auto t = run_unitary(chi);

    const auto initial = factorization_structure(t.stages[0].state, "initial");
    REQUIRE(initial.groups.size() == 3);
    CHECK(initial.groups[0] == Labels{"1"});
    CHECK(initial.groups[1] == Labels{"2", "3"});
    CHECK(initial.groups[2] == Labels{"c", "d"});
    for (bool c : initial.certified) CHECK(c);

    const auto mid = factorization_structure(t.stages[1].state, "post-ua");
    REQUIRE(mid.groups.size() == 1);
    CHECK(mid.groups[0] == Labels{"1", "2", "3", "c", "d"});
    CHECK(mid.certified[0]);

    const auto fin = factorization_structure(t.stages[2].state, "post-ub");
    REQUIRE(fin.groups.size() == 2);
    CHECK(fin.groups[0] == Labels{"1", "2", "c", "d"});
    CHECK(fin.groups[1] == Labels{"3"});
    for (bool c : fin.certified) CHECK(c);

    // collapse-mode register without pointer labels
    const auto bare = factorization_structure(build_initial(chi), "initial");
    REQUIRE(bare.groups.size() == 2);
    CHECK(bare.groups[0] == Labels{"1"});
    CHECK(bare.groups[1] == Labels{"2", "3"});
}

TEST_CASE("ensemble mode sorts Bob's systems into correctable sub-ensembles",
          "[teleport][statistical]") {
    RandomStream rng(373);
    const auto chi = fixed_chi();
    const std::size_t m = 20000;
    const auto report = run_ensemble(chi, m, rng);

    CHECK(report.runs == m);
    CHECK(report.classical_bits_sent == 2 * m);
    std::size_t total = 0;
    const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(m));
    for (std::size_t k = 0; k < 4; ++k) {
        total += report.counts[k];
        const double frac = static_cast<double>(report.counts[k]) / static_cast<double>(m);
        CHECK(std::abs(frac - 0.25) < 4.0 * sigma);
    }
    CHECK(total == m);

    REQUIRE(report.sub_ensembles.has_value());
    for (const auto& sub : *report.sub_ensembles)
        CHECK(sub.corrected_fidelity == Approx(1.0).margin(1e-10));

    REQUIRE(report.pooled_trace_distance.has_value());
    CHECK(*report.pooled_trace_distance < 2.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("statistical mode reports outcome statistics only", "[teleport]") {
    RandomStream rng(379);
    const auto report = run_ensemble(fixed_chi(), 100, rng, EnsembleMode::statistical);
    CHECK(report.classical_bits_sent == 200);
    CHECK_FALSE(report.sub_ensembles.has_value());
    CHECK_FALSE(report.pooled_uncorrected.has_value());
    CHECK_FALSE(report.pooled_trace_distance.has_value());

    CHECK_THROWS_AS(run_ensemble(fixed_chi(), 0, rng), std::invalid_argument);
}

TEST_CASE("teleportation works with any Bell resource", "[teleport]") {
    RandomStream rng(383);
    for (BellKind resource : kBellOrder) {
        const auto chi = UnknownState::haar_random(rng);
        const auto c = run_collapse(chi, rng, resource);
        CHECK(c.final_fidelity == Approx(1.0).margin(1e-10));
        const auto u = run_unitary(chi, resource);
        CHECK(u.final_fidelity == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("all interpretation modes reach unit fidelity for random states",
          "[teleport][property]") {
    RandomStream rng(389);
    for (int t = 0; t < 25; ++t) {
        const auto chi = UnknownState::haar_random(rng);
        CHECK(run_collapse(chi, rng).final_fidelity == Approx(1.0).margin(1e-10));
        CHECK(run_unitary(chi).final_fidelity == Approx(1.0).margin(1e-10));
        CHECK(bohm_branch_analysis(chi, rng).corrected_fidelity ==
              Approx(1.0).margin(1e-10));
        const auto ens = run_ensemble(chi, 8, rng);
        for (const auto& sub : *ens.sub_ensembles)
            CHECK(sub.corrected_fidelity == Approx(1.0).margin(1e-10));
    }
}
