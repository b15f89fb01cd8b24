#include <doctest.h>

#include <cmath>
#include <numbers>

#include "certdel/qubit.hpp"
#include "certdel/stats.hpp"

using namespace certdel;
using std::numbers::pi;

namespace {
constexpr double kTol = 1e-12;
}

TEST_CASE("basis states: computational and Hadamard conventions") {
    const Qubit zero = basis_state(Basis::computational(), 0);
    CHECK(zero.amp0.real() == doctest::Approx(1.0).epsilon(kTol));
    CHECK(std::abs(zero.amp1) == doctest::Approx(0.0).epsilon(kTol));

    // bit 1 -> |+>, bit 0 -> |->
    const Qubit plus = basis_state(Basis::hadamard(), 1);
    CHECK(plus.amp0.real() == doctest::Approx(std::sqrt(0.5)).epsilon(kTol));
    CHECK(plus.amp1.real() == doctest::Approx(std::sqrt(0.5)).epsilon(kTol));
    const Qubit minus = basis_state(Basis::hadamard(), 0);
    CHECK(minus.amp1.real() == doctest::Approx(-std::sqrt(0.5)).epsilon(kTol));
}

TEST_CASE("general basis formula at theta=pi/2, psi->0") {
    // psi lives in an open interval; approach 0 from above.
    const Qubit q = basis_state(Basis::general(pi / 2, 1e-15), 0);
    CHECK(q.amp0.real() == doctest::Approx(std::cos(pi / 4)).epsilon(1e-12));
    CHECK(q.amp1.real() == doctest::Approx(std::sin(pi / 4)).epsilon(1e-12));
}

TEST_CASE("basis state normalization and orthogonality across the Bloch sphere") {
    Rng rng(101);
    for (int i = 0; i < 200; ++i) {
        const Basis basis = Basis::random_bloch(rng);
        const Qubit u0 = basis_state(basis, 0);
        const Qubit u1 = basis_state(basis, 1);
        CHECK(u0.norm_sq() == doctest::Approx(1.0).epsilon(kTol));
        CHECK(u1.norm_sq() == doctest::Approx(1.0).epsilon(kTol));
        CHECK(std::abs(inner_product(u0, u1)) < kTol);
    }
}

TEST_CASE("outcome probabilities follow the Born rule") {
    Rng rng(202);
    // cos^2(theta/2) against the computational basis
    for (int i = 0; i < 100; ++i) {
        const double theta = rng.uniform_open(pi);
        const double psi = rng.uniform_open(2 * pi);
        const Qubit q = basis_state(Basis::general(theta, psi), 0);
        CHECK(outcome_probability(q, Basis::computational(), 0) ==
              doctest::Approx(std::cos(theta / 2) * std::cos(theta / 2)).epsilon(1e-12));
    }
    // probabilities sum to one
    for (int i = 0; i < 100; ++i) {
        const Qubit q = basis_state(Basis::random_bloch(rng), rng.bit());
        const Basis m = Basis::random_bloch(rng);
        CHECK(outcome_probability(q, m, 0) + outcome_probability(q, m, 1) ==
              doctest::Approx(1.0).epsilon(kTol));
    }
}

TEST_CASE("eigenstates are measured with certainty in every basis kind") {
    Rng rng(303);
    const Basis bases[] = {Basis::computational(), Basis::hadamard(), Basis::general(1.1, 2.2)};
    for (const auto& basis : bases)
        for (int bit = 0; bit < 2; ++bit) {
            CHECK(outcome_probability(basis_state(basis, bit), basis, bit) ==
                  doctest::Approx(1.0).epsilon(kTol));
            const auto [outcome, collapsed] = measure_qubit(basis_state(basis, bit), basis, rng);
            CHECK(outcome == bit);
            CHECK(std::abs(inner_product(collapsed, basis_state(basis, bit)) - 1.0) < kTol);
        }
}

TEST_CASE("mutual unbiasedness of the two conjugate bases") {
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) {
            CHECK(outcome_probability(basis_state(Basis::computational(), b1), Basis::hadamard(), b2) ==
                  doctest::Approx(0.5).epsilon(kTol));
            CHECK(outcome_probability(basis_state(Basis::hadamard(), b1), Basis::computational(), b2) ==
                  doctest::Approx(0.5).epsilon(kTol));
        }
}

TEST_CASE("measurement frequencies match outcome_probability") {
    Rng rng(404);
    // |+> against computational: 0.5 +- 0.01 at 1e5 trials
    std::size_t zeros = 0;
    const std::size_t trials = 100000;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng trial_rng = rng.child(t);
        if (measure_qubit(basis_state(Basis::hadamard(), 1), Basis::computational(), trial_rng).bit == 0)
            ++zeros;
    }
    CHECK(std::abs(static_cast<double>(zeros) / trials - 0.5) <= 0.01);
}

TEST_CASE("Monte Carlo frequency tracks cos^2(theta/2) within 3 sigma") {
    Rng master(505);
    for (int round = 0; round < 10; ++round) {
        Rng setup = master.child(static_cast<std::uint64_t>(round));
        const Basis prep = Basis::random_bloch(setup);
        const Qubit q = basis_state(prep, 0);
        const double p0 = outcome_probability(q, Basis::computational(), 0);
        const std::size_t trials = 20000;
        std::size_t zeros = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            Rng trial = setup.child(t);
            if (measure_qubit(q, Basis::computational(), trial).bit == 0) ++zeros;
        }
        const double freq = static_cast<double>(zeros) / trials;
        CHECK(std::abs(freq - p0) <= 3.0 * binomial_std_error(p0, trials) + 1e-9);
    }
}

TEST_CASE("repeatability: same-basis remeasurement is fixed") {
    Rng rng(606);
    for (int i = 0; i < 100; ++i) {
        const Basis prep = Basis::random_bloch(rng);
        const Basis meas = Basis::random_bloch(rng);
        auto [bit, collapsed] = measure_qubit(basis_state(prep, rng.bit()), meas, rng);
        for (int again = 0; again < 3; ++again) {
            auto [bit2, collapsed2] = measure_qubit(collapsed, meas, rng);
            CHECK(bit2 == bit);
            collapsed = collapsed2;
        }
    }
}

TEST_CASE("product register collapse semantics") {
    Rng rng(707);
    ProductRegister reg({basis_state(Basis::computational(), 1), basis_state(Basis::hadamard(), 1)});
    CHECK_FALSE(reg.any_consumed());
    CHECK(reg.measure(0, Basis::computational(), rng) == 1);
    CHECK(reg.consumed(0));
    CHECK_FALSE(reg.consumed(1));
    CHECK(reg.measure(0, Basis::computational(), rng) == 1); // repeatable
}

TEST_CASE("register rendering of eigenstates") {
    ProductRegister reg({basis_state(Basis::computational(), 1), basis_state(Basis::computational(), 0),
                         basis_state(Basis::hadamard(), 1), basis_state(Basis::hadamard(), 0),
                         basis_state(Basis::general(1.0, 1.0), 0)});
    CHECK(reg.render() == "10+-?");
}

TEST_CASE("basis angle domains are enforced") {
    CHECK_THROWS_AS(Basis::general(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(Basis::general(pi, 1.0), DomainError);
    CHECK_THROWS_AS(Basis::general(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(Basis::general(1.0, 2 * pi), DomainError);
}
