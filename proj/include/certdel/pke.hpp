#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "certdel/bitstring.hpp"
#include "certdel/common.hpp"
#include "certdel/rng.hpp"

namespace certdel {

// Classical public-key encryption behind a minimal interface: fixed
// plaintext length m, fixed ciphertext length k per scheme id.
//
// The only shipped family is "toy-K" (optionally "toy-K-mM" for M < K): a
// keyed bijective mixing permutation of a K-bit block, K <= 32. It is NOT
// secure in any cryptographic sense -- both key halves carry the same
// secret, and the permutation is trivially invertible with it. It exists so
// the deletion layer above has a concrete black box of the right shape.

struct PublicKey {
    std::string scheme;
    std::uint32_t lambda = 0;
    std::vector<std::uint8_t> bytes;
};

struct SecretKey {
    std::string scheme;
    std::uint32_t lambda = 0;
    std::vector<std::uint8_t> bytes;
};

struct KeyPair {
    PublicKey pk;
    SecretKey sk;
};

struct PkeCiphertext {
    BitString bits; // length k for the originating scheme
};

namespace detail {

struct ToyParams {
    std::size_t block_bits; // k
    std::size_t plain_bits; // m
};

inline ToyParams parse_toy_scheme(const std::string& scheme) {
    if (scheme.rfind("toy-", 0) != 0) throw UnsupportedScheme("unknown PKE scheme '" + scheme + "'");
    const std::string rest = scheme.substr(4);
    const auto dash = rest.find("-m");
    std::size_t k = 0, m = 0;
    try {
        k = static_cast<std::size_t>(std::stoul(rest.substr(0, dash)));
        m = dash == std::string::npos ? k : static_cast<std::size_t>(std::stoul(rest.substr(dash + 2)));
    } catch (const std::exception&) {
        throw UnsupportedScheme("malformed toy scheme id '" + scheme + "'");
    }
    if (k < 1 || k > 32) throw UnsupportedScheme("toy scheme block must be 1..32 bits");
    if (m < 1 || m > k) throw UnsupportedScheme("toy scheme plaintext must be 1..k bits");
    return {k, m};
}

struct ToyRounds {
    static constexpr int kRounds = 8;
    std::uint64_t xor_key[kRounds];
    std::uint64_t mul[kRounds];
    int rot[kRounds];
};

inline ToyRounds toy_rounds(const std::vector<std::uint8_t>& key_bytes, std::size_t block_bits) {
    std::uint64_t seed = 0x746f79u ^ (static_cast<std::uint64_t>(block_bits) << 40);
    for (auto b : key_bytes) seed = seed * 0x100000001b3ULL + b;
    ToyRounds r{};
    for (int i = 0; i < ToyRounds::kRounds; ++i) {
        r.xor_key[i] = splitmix64(seed);
        r.mul[i] = block_bits >= 2 ? (splitmix64(seed) | 1) : 1;
        r.rot[i] = block_bits >= 2 ? static_cast<int>(splitmix64(seed) % block_bits) : 0;
    }
    return r;
}

inline std::uint64_t mul_inverse_pow2(std::uint64_t a, std::size_t bits) {
    // Newton iteration; a must be odd.
    std::uint64_t x = a;
    for (int i = 0; i < 6; ++i) x *= 2 - a * x;
    if (bits < 64) x &= (std::uint64_t{1} << bits) - 1;
    return x;
}

inline std::uint64_t toy_permute(std::uint64_t block, const ToyRounds& r, std::size_t bits) {
    const std::uint64_t mask = bits < 64 ? (std::uint64_t{1} << bits) - 1 : ~std::uint64_t{0};
    for (int i = 0; i < ToyRounds::kRounds; ++i) {
        block = (block ^ r.xor_key[i]) & mask;
        block = (block * r.mul[i]) & mask;
        if (r.rot[i]) block = ((block << r.rot[i]) | (block >> (bits - static_cast<std::size_t>(r.rot[i])))) & mask;
    }
    return block;
}

inline std::uint64_t toy_unpermute(std::uint64_t block, const ToyRounds& r, std::size_t bits) {
    const std::uint64_t mask = bits < 64 ? (std::uint64_t{1} << bits) - 1 : ~std::uint64_t{0};
    for (int i = ToyRounds::kRounds - 1; i >= 0; --i) {
        if (r.rot[i]) block = ((block >> r.rot[i]) | (block << (bits - static_cast<std::size_t>(r.rot[i])))) & mask;
        block = (block * mul_inverse_pow2(r.mul[i], bits)) & mask;
        block = (block ^ r.xor_key[i]) & mask;
    }
    return block;
}

} // namespace detail

inline std::size_t scheme_plaintext_bits(const std::string& scheme) {
    return detail::parse_toy_scheme(scheme).plain_bits;
}

inline std::size_t scheme_ciphertext_bits(const std::string& scheme) {
    return detail::parse_toy_scheme(scheme).block_bits;
}

inline KeyPair keygen(const std::string& scheme, std::uint32_t lambda, Rng& rng) {
    detail::parse_toy_scheme(scheme); // validates the id
    std::vector<std::uint8_t> secret(16);
    for (auto& b : secret) b = static_cast<std::uint8_t>(rng.below(256));
    KeyPair kp;
    kp.pk = PublicKey{scheme, lambda, secret};
    kp.sk = SecretKey{scheme, lambda, secret};
    return kp;
}

inline PkeCiphertext pke_encrypt(const PublicKey& pk, const BitString& plaintext, Rng& /*rng*/) {
    const auto params = detail::parse_toy_scheme(pk.scheme);
    if (plaintext.size() != params.plain_bits)
        throw LengthMismatch("pke_encrypt: plaintext length != m");
    // Zero-pad the plaintext into the block, then apply the keyed permutation.
    std::uint64_t block = plaintext.to_uint() << (params.block_bits - params.plain_bits);
    block = detail::toy_permute(block, detail::toy_rounds(pk.bytes, params.block_bits),
                                params.block_bits);
    return PkeCiphertext{BitString::from_uint(block, params.block_bits)};
}

inline BitString pke_decrypt(const SecretKey& sk, const PkeCiphertext& ct) {
    const auto params = detail::parse_toy_scheme(sk.scheme);
    if (ct.bits.size() != params.block_bits)
        throw MalformedCiphertext("pke_decrypt: ciphertext length != k");
    const std::uint64_t block = detail::toy_unpermute(
        ct.bits.to_uint(), detail::toy_rounds(sk.bytes, params.block_bits), params.block_bits);
    return BitString::from_uint(block >> (params.block_bits - params.plain_bits), params.plain_bits);
}

} // namespace certdel
