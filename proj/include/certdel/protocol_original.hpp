#pragma once

#include <utility>

#include "certdel/bitstring.hpp"
#include "certdel/common.hpp"
#include "certdel/pke.hpp"
#include "certdel/qubit.hpp"
#include "certdel/rng.hpp"

namespace certdel {

// The predecessor construction this toolkit critiques: one secret bit b is
// hidden as b XOR (parity of the computational-basis positions of a random
// conjugate-coded string x), and the basis string theta travels inside the
// classical PKE part. Its deletion certificate is a full Hadamard-basis
// measurement record, checked at the positions where theta is 1.
//
// The defect demonstrated by attack_original: computational-basis positions
// can be read without disturbing them, so decryption and a valid deletion
// certificate are simultaneously available to a holder of the secret key.

struct OriginalSecret {
    int b = 0;
    BitString x;
    BitString theta;
};

using DeletionCertificateOriginal = BitString;

class OriginalCiphertext {
public:
    OriginalCiphertext(PkeCiphertext classical, ProductRegister reg)
        : classical_(std::move(classical)), register_(std::move(reg)) {}

    const PkeCiphertext& classical() const { return classical_; }
    std::size_t size() const { return register_.size(); }

    ProductRegister& channel_register() { return register_; }
    const ProductRegister& channel_register() const { return register_; }

    bool deleted() const { return deleted_; }
    void mark_deleted() {
        if (deleted_) throw AlreadyConsumed("original ciphertext: certificate already produced");
        deleted_ = true;
    }

private:
    PkeCiphertext classical_;
    ProductRegister register_;
    bool deleted_ = false;
};

namespace detail {

inline Basis original_basis(int theta_bit) {
    return theta_bit ? Basis::hadamard() : Basis::computational();
}

inline ProductRegister encode_conjugate(const BitString& x, const BitString& theta) {
    std::vector<Qubit> qubits;
    qubits.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        qubits.push_back(basis_state(original_basis(theta[i]), x[i]));
    return ProductRegister(std::move(qubits));
}

inline int masked_parity(const BitString& x, const BitString& theta) {
    int parity = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (theta[i] == 0) parity ^= x[i];
    return parity;
}

// Classical plaintext packing: theta first (n bits), masked bit last.
inline BitString pack_plaintext(const BitString& theta, int masked) {
    BitString tail(1);
    tail.set(0, masked);
    return theta.concat(tail);
}

inline std::pair<BitString, int> unpack_plaintext(const BitString& plain) {
    return {plain.prefix(plain.size() - 1), plain[plain.size() - 1]};
}

} // namespace detail

// Encryption with caller-chosen x and theta; theta needs both a 0 and a 1.
inline std::pair<OriginalCiphertext, OriginalSecret> enc_original_with(const PublicKey& pk, int b,
                                                                       const BitString& x,
                                                                       const BitString& theta,
                                                                       Rng& rng) {
    if (x.size() != theta.size()) throw LengthMismatch("enc_original: |x| != |theta|");
    if (x.size() < 2) throw DomainError("enc_original: need n >= 2");
    if (theta.weight() == 0 || theta.weight() == theta.size())
        throw DomainError("enc_original: theta must contain both basis tags");
    if (scheme_plaintext_bits(pk.scheme) != x.size() + 1)
        throw LengthMismatch("enc_original: PKE plaintext length must be n+1");

    const int masked = b ^ detail::masked_parity(x, theta);
    PkeCiphertext classical = pke_encrypt(pk, detail::pack_plaintext(theta, masked), rng);
    OriginalCiphertext ct(std::move(classical), detail::encode_conjugate(x, theta));
    return {std::move(ct), OriginalSecret{b, x, theta}};
}

inline std::pair<OriginalCiphertext, OriginalSecret> enc_original(const PublicKey& pk, int b,
                                                                  std::size_t n, Rng& rng) {
    if (n < 2) throw DomainError("enc_original: need n >= 2");
    const BitString x = BitString::random(n, rng);
    BitString theta = BitString::random(n, rng);
    while (theta.weight() == 0 || theta.weight() == n) theta = BitString::random(n, rng);
    return enc_original_with(pk, b, x, theta, rng);
}

// Honest decryption: recovers the computational-basis positions, which are
// eigenstates and remain physically unchanged. Does not consume the state.
inline int honest_decrypt_original(const SecretKey& sk, OriginalCiphertext& ct, Rng& rng) {
    const BitString plain = pke_decrypt(sk, ct.classical());
    if (plain.size() != ct.size() + 1) throw MalformedCiphertext("original ciphertext: bad classical part");
    const auto [theta, masked] = detail::unpack_plaintext(plain);
    int parity = 0;
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (theta[i] == 0) parity ^= ct.channel_register().measure(i, Basis::computational(), rng);
    return masked ^ parity;
}

// Honest deletion: measure everything in the Hadamard basis and hand the
// outcome string over as the certificate.
inline DeletionCertificateOriginal honest_delete_original(OriginalCiphertext& ct, Rng& rng) {
    ct.mark_deleted();
    BitString cert(ct.size());
    for (std::size_t i = 0; i < ct.size(); ++i)
        cert.set(i, ct.channel_register().measure(i, Basis::hadamard(), rng));
    return cert;
}

// Accept iff the certificate matches x wherever theta is 1; the
// computational positions are don't-cares.
inline bool verify_delete_original(const OriginalSecret& secret,
                                   const DeletionCertificateOriginal& cert) {
    if (cert.size() != secret.theta.size()) throw LengthMismatch("verify_delete_original: bad length");
    for (std::size_t i = 0; i < cert.size(); ++i)
        if (secret.theta[i] == 1 && cert[i] != secret.x[i]) return false;
    return true;
}

struct OriginalAttackResult {
    int recovered_bit = 0;
    DeletionCertificateOriginal certificate;
};

// The separation attack: decrypt theta, read the computational positions
// without disturbing them, measure the Hadamard positions for the
// certificate, fill the rest with coin flips. Succeeds on both counts with
// probability 1.
inline OriginalAttackResult attack_original(const SecretKey& sk, OriginalCiphertext& ct, Rng& rng) {
    const BitString plain = pke_decrypt(sk, ct.classical());
    if (plain.size() != ct.size() + 1) throw MalformedCiphertext("original ciphertext: bad classical part");
    const auto [theta, masked] = detail::unpack_plaintext(plain);

    int parity = 0;
    BitString cert(ct.size());
    for (std::size_t i = 0; i < ct.size(); ++i) {
        if (theta[i] == 0) {
            parity ^= ct.channel_register().measure(i, Basis::computational(), rng);
            cert.set(i, rng.bit());
        } else {
            cert.set(i, ct.channel_register().measure(i, Basis::hadamard(), rng));
        }
    }
    ct.mark_deleted();
    return {masked ^ parity, cert};
}

} // namespace certdel
