#include <doctest.h>

#include "certdel/protocol_original.hpp"

using namespace certdel;

namespace {

KeyPair keys_for(std::size_t n, Rng& rng) {
    return keygen("toy-" + std::to_string(n + 1), 128, rng);
}

// The running example: x = 1011 0110, theta = 0011 1001.
const BitString kX = BitString::from_string("1011 0110");
const BitString kTheta = BitString::from_string("0011 1001");

} // namespace

TEST_CASE("worked example: register rendering and masked parity") {
    Rng rng(1);
    const KeyPair kp = keys_for(8, rng);
    auto [ct, secret] = enc_original_with(kp.pk, 0, kX, kTheta, rng);
    CHECK(ct.channel_register().render() == "10++-11-");

    // parity over the computational positions: 1 ^ 0 ^ 1 ^ 1 = 1
    const BitString plain = pke_decrypt(kp.sk, ct.classical());
    CHECK(plain.prefix(8) == kTheta);
    CHECK(plain[8] == 1); // b=0 masked by parity 1

    // same x and theta with b=1 flips the masked bit
    Rng rng2(1);
    const KeyPair kp2 = keys_for(8, rng2);
    auto [ct2, secret2] = enc_original_with(kp2.pk, 1, kX, kTheta, rng2);
    CHECK(pke_decrypt(kp2.sk, ct2.classical())[8] == 0);
}

TEST_CASE("worked example: certificate pattern **110**0") {
    Rng rng(2);
    const KeyPair kp = keys_for(8, rng);
    auto [ct, secret] = enc_original_with(kp.pk, 0, kX, kTheta, rng);
    const auto attack = attack_original(kp.sk, ct, rng);
    CHECK(attack.recovered_bit == 0);
    // the Hadamard positions carry x exactly; the rest are don't-cares
    CHECK(attack.certificate[2] == 1);
    CHECK(attack.certificate[3] == 1);
    CHECK(attack.certificate[4] == 0);
    CHECK(attack.certificate[7] == 0);
    CHECK(verify_delete_original(secret, attack.certificate));

    // every string matching the pattern is accepted
    for (std::uint64_t free_bits = 0; free_bits < 16; ++free_bits) {
        BitString cert = BitString::from_string("00110000");
        cert.set(0, static_cast<int>((free_bits >> 0) & 1));
        cert.set(1, static_cast<int>((free_bits >> 1) & 1));
        cert.set(5, static_cast<int>((free_bits >> 2) & 1));
        cert.set(6, static_cast<int>((free_bits >> 3) & 1));
        CHECK(verify_delete_original(secret, cert));
    }
    // flipping any checked position is rejected
    for (std::size_t p : {2, 3, 4, 7}) {
        BitString cert = BitString::from_string("00110000");
        cert.flip(p);
        CHECK_FALSE(verify_delete_original(secret, cert));
    }
}

TEST_CASE("theta sampling always contains both basis tags") {
    Rng rng(3);
    const KeyPair kp = keys_for(8, rng);
    for (int i = 0; i < 500; ++i) {
        auto [ct, secret] = enc_original(kp.pk, rng.bit(), 8, rng);
        CHECK(secret.theta.weight() > 0);
        CHECK(secret.theta.weight() < 8);
    }
    CHECK_THROWS_AS(enc_original_with(kp.pk, 0, kX, BitString::from_string("00000000"), rng),
                    DomainError);
}

TEST_CASE("honest decryption recovers b and leaves computational positions intact") {
    Rng rng(4);
    const KeyPair kp = keys_for(8, rng);
    std::size_t recovered = 0;
    for (int i = 0; i < 1000; ++i) {
        const int b = rng.bit();
        auto [ct, secret] = enc_original(kp.pk, b, 8, rng);
        if (honest_decrypt_original(kp.sk, ct, rng) == b) ++recovered;
        // eigenstate repeatability at the computational positions
        for (std::size_t p = 0; p < 8; ++p)
            if (secret.theta[p] == 0)
                CHECK(ct.channel_register().measure(p, Basis::computational(), rng) == secret.x[p]);
    }
    CHECK(recovered == 1000);
}

TEST_CASE("honest deletion always verifies; Hadamard positions are deterministic") {
    Rng rng(5);
    const KeyPair kp = keys_for(8, rng);
    for (int i = 0; i < 1000; ++i) {
        auto [ct, secret] = enc_original(kp.pk, rng.bit(), 8, rng);
        const auto cert = honest_delete_original(ct, rng);
        CHECK(verify_delete_original(secret, cert));
        for (std::size_t p = 0; p < 8; ++p)
            if (secret.theta[p] == 1) CHECK(cert[p] == secret.x[p]);
    }
}

TEST_CASE("deletion is one-shot") {
    Rng rng(6);
    const KeyPair kp = keys_for(8, rng);
    auto [ct, secret] = enc_original(kp.pk, 0, 8, rng);
    honest_delete_original(ct, rng);
    CHECK_THROWS_AS(honest_delete_original(ct, rng), AlreadyConsumed);
}

TEST_CASE("computational positions measured in Hadamard are fair coins") {
    Rng rng(7);
    const KeyPair kp = keys_for(8, rng);
    std::size_t ones = 0, total = 0;
    for (int i = 0; i < 2500; ++i) {
        auto [ct, secret] = enc_original(kp.pk, 0, 8, rng);
        const auto cert = honest_delete_original(ct, rng);
        for (std::size_t p = 0; p < 8; ++p)
            if (secret.theta[p] == 0) {
                ones += static_cast<std::size_t>(cert[p]);
                ++total;
            }
    }
    const double freq = static_cast<double>(ones) / static_cast<double>(total);
    CHECK(std::abs(freq - 0.5) <= 0.02);
}

TEST_CASE("uniformly random certificates pass at rate 2^-wt(theta)") {
    Rng rng(8);
    const KeyPair kp = keys_for(8, rng);
    auto [ct, secret] = enc_original_with(kp.pk, 0, kX, kTheta, rng); // wt(theta) = 4
    std::size_t accepted = 0;
    const std::size_t trials = 100000;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng trial = rng.child(t);
        if (verify_delete_original(secret, BitString::random(8, trial))) ++accepted;
    }
    const double rate = static_cast<double>(accepted) / trials;
    CHECK(std::abs(rate - 1.0 / 16) < 0.01);
}

TEST_CASE("the separation attack wins on both counts, 1000/1000") {
    Rng rng(9);
    const KeyPair kp = keys_for(8, rng);
    std::size_t joint = 0;
    for (int i = 0; i < 1000; ++i) {
        const int b = rng.bit();
        auto [ct, secret] = enc_original(kp.pk, b, 8, rng);
        const auto result = attack_original(kp.sk, ct, rng);
        if (result.recovered_bit == b && verify_delete_original(secret, result.certificate)) ++joint;
    }
    CHECK(joint == 1000);
}

TEST_CASE("decrypt-then-delete also coexists through the honest interfaces") {
    Rng rng(10);
    const KeyPair kp = keys_for(8, rng);
    for (int i = 0; i < 200; ++i) {
        const int b = rng.bit();
        auto [ct, secret] = enc_original(kp.pk, b, 8, rng);
        CHECK(honest_decrypt_original(kp.sk, ct, rng) == b);
        CHECK(verify_delete_original(secret, honest_delete_original(ct, rng)));
    }
}

TEST_CASE("measurement order on disjoint basis groups does not matter") {
    // every qubit is an eigenstate of its assigned basis, so both passes are
    // deterministic and must agree position by position
    Rng rng(12);
    const KeyPair kp = keys_for(8, rng);
    for (int i = 0; i < 100; ++i) {
        auto [ct_fwd, secret] = enc_original(kp.pk, 0, 8, rng);
        auto [ct_rev, secret2] = enc_original_with(kp.pk, 0, secret.x, secret.theta, rng);

        BitString fwd(8), rev(8);
        for (std::size_t p = 0; p < 8; ++p)
            if (secret.theta[p] == 0)
                fwd.set(p, ct_fwd.channel_register().measure(p, Basis::computational(), rng));
        for (std::size_t p = 0; p < 8; ++p)
            if (secret.theta[p] == 1)
                fwd.set(p, ct_fwd.channel_register().measure(p, Basis::hadamard(), rng));

        for (std::size_t pi = 8; pi-- > 0;)
            if (secret.theta[pi] == 1)
                rev.set(pi, ct_rev.channel_register().measure(pi, Basis::hadamard(), rng));
        for (std::size_t pi = 8; pi-- > 0;)
            if (secret.theta[pi] == 0)
                rev.set(pi, ct_rev.channel_register().measure(pi, Basis::computational(), rng));

        CHECK(fwd == rev);
        CHECK(fwd == secret.x);
    }
}

TEST_CASE("certificate length is validated") {
    Rng rng(11);
    const KeyPair kp = keys_for(8, rng);
    auto [ct, secret] = enc_original(kp.pk, 0, 8, rng);
    CHECK_THROWS_AS(verify_delete_original(secret, BitString::random(7, rng)), LengthMismatch);
}
