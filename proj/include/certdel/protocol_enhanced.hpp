#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "certdel/bitstring.hpp"
#include "certdel/common.hpp"
#include "certdel/dense_state.hpp"
#include "certdel/linear_code.hpp"
#include "certdel/pke.hpp"
#include "certdel/qubit.hpp"
#include "certdel/rng.hpp"
#include "certdel/stats.hpp"

namespace certdel {

// Enhanced scheme: the PKE ciphertext is spread through an error-correcting
// code, the whole codeword is conjugate-coded in ONE secret basis, and e
// positions are overwritten with decoy qubits in bases only Alice knows.
// Reading the message forces a destructive measurement; the decoys are what
// Alice later checks to detect it.

enum class ErrorMode { Bloch, Conjugate };

inline const char* to_string(ErrorMode mode) {
    return mode == ErrorMode::Bloch ? "bloch" : "conjugate";
}

inline ErrorMode error_mode_from_string(const std::string& s) {
    if (s == "bloch") return ErrorMode::Bloch;
    if (s == "conjugate") return ErrorMode::Conjugate;
    throw FormatError("unknown error mode '" + s + "'");
}

struct ErrorEntry {
    std::size_t position = 0;
    int value = 0;
    Basis basis = Basis::computational();
};

// Alice's secret verification data for one ciphertext.
struct AliceRecord {
    Basis global_basis = Basis::computational(); // Computational or Hadamard
    BitString codeword;                          // D, length n
    std::vector<ErrorEntry> errors;              // decoy positions, distinct
    std::string code_id;
    BitString pke_ciphertext; // C, length k
    ErrorMode error_mode = ErrorMode::Bloch;

    bool is_error_position(std::size_t i) const {
        for (const auto& entry : errors)
            if (entry.position == i) return true;
        return false;
    }
};

// What Bob hands back in a deletion: either the (possibly collapsed)
// product register or, after a joint measurement, a dense state.
class ReturnedState {
public:
    explicit ReturnedState(ProductRegister reg) : state_(std::move(reg)) {}
    explicit ReturnedState(DenseState dense) : state_(std::move(dense)) {}

    std::size_t size() const {
        if (const auto* reg = std::get_if<ProductRegister>(&state_)) return reg->size();
        return std::get<DenseState>(state_).num_qubits();
    }

    bool is_dense() const { return std::holds_alternative<DenseState>(state_); }
    const DenseState& dense() const { return std::get<DenseState>(state_); }
    const ProductRegister& product() const { return std::get<ProductRegister>(state_); }

    int measure(std::size_t i, const Basis& basis, Rng& rng) {
        if (auto* reg = std::get_if<ProductRegister>(&state_)) return reg->measure(i, basis, rng);
        return dense_measure_qubit(std::get<DenseState>(state_), i, basis, rng);
    }

private:
    std::variant<ProductRegister, DenseState> state_;
};

struct BallPovmOutcome {
    bool in_ball = false;
    BitString message; // k bits when in_ball
};

// The quantum payload in Bob's custody. The public surface exposes only
// measurements and the one-shot handover; amplitudes and preparation bases
// are never readable through it. Exactly one operation may claim a bundle;
// later claims raise AlreadyConsumed.
class CiphertextBundle {
public:
    CiphertextBundle(ProductRegister reg, std::string code_id)
        : register_(std::move(reg)), code_id_(std::move(code_id)) {}

    std::size_t size() const { return register_.size(); }
    const std::string& code_id() const { return code_id_; }
    bool used() const { return used_; }

    // Measures every qubit in one basis; keeps the collapsed register.
    BitString measure_all(const Basis& basis, Rng& rng) {
        claim();
        BitString out(register_.size());
        for (std::size_t i = 0; i < register_.size(); ++i)
            out.set(i, register_.measure(i, basis, rng));
        return out;
    }

    // Measures qubit i in bases[i]; keeps the collapsed register.
    BitString measure_each(const std::vector<Basis>& bases, Rng& rng) {
        ensure_unused();
        if (bases.size() != register_.size())
            throw LengthMismatch("CiphertextBundle::measure_each: basis count != n");
        claim();
        BitString out(register_.size());
        for (std::size_t i = 0; i < register_.size(); ++i)
            out.set(i, register_.measure(i, bases[i], rng));
        return out;
    }

    // Joint measurement: project onto the radius-e balls around the 2^k
    // codewords (expressed in the label space of `guess`) plus the
    // remainder subspace. Keeps the post-measurement dense state.
    BallPovmOutcome measure_ball_povm(const Code& code, const Basis& guess, Rng& rng,
                                      std::size_t dense_cap = kDefaultDenseCap) {
        ensure_unused();
        if (code.name() != code_id_) throw DomainError("measure_ball_povm: code does not match bundle");
        if (code.n() != register_.size()) throw LengthMismatch("measure_ball_povm: code length != n");
        if (code.n() > dense_cap) throw RegisterTooLarge("measure_ball_povm: register exceeds dense cap");
        if (code.k() > 20) throw BallTooLarge("measure_ball_povm: too many codeword projectors");
        claim();

        DenseState dense = to_dense(register_, dense_cap);
        dense.rotate_to_basis_labels(guess);

        const std::size_t label = dense_project_onto_strings(dense, ball_partition(code), rng,
                                                             /*validate=*/true);
        dense.rotate_from_basis_labels(guess);
        dense_ = std::move(dense);

        BallPovmOutcome outcome;
        if (label < (std::size_t{1} << code.k())) {
            outcome.in_ball = true;
            outcome.message = BitString::from_uint(label, code.k());
        }
        return outcome;
    }

    // Honest deletion: hand the untouched register back.
    ReturnedState release() {
        claim();
        return ReturnedState(take_register());
    }

    // After a measuring claim, hands over whatever the measurement left
    // behind -- the forged-certificate path.
    ReturnedState take_measured_state() {
        if (!used_) throw AlreadyConsumed("take_measured_state: nothing measured yet");
        if (released_) throw AlreadyConsumed("take_measured_state: state already handed over");
        if (dense_) {
            released_ = true;
            return ReturnedState(std::move(*dense_));
        }
        return ReturnedState(take_register());
    }

private:
    void ensure_unused() const {
        if (used_) throw AlreadyConsumed("ciphertext bundle already consumed");
    }

    void claim() {
        ensure_unused();
        used_ = true;
    }

    ProductRegister take_register() {
        released_ = true;
        return std::move(register_);
    }

    static StringPartition ball_partition(const Code& code) {
        const std::size_t dim = std::size_t{1} << code.n();
        StringPartition partition;
        partition.subsets.resize((std::size_t{1} << code.k()) + 1);
        std::vector<std::uint8_t> covered(dim, 0);
        const auto patterns = detail::low_weight_masks(code.n(), code.e());
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << code.k()); ++m) {
            const std::uint64_t cw = code.encode_word(m);
            auto& subset = partition.subsets[static_cast<std::size_t>(m)];
            subset.reserve(patterns.size());
            for (auto pattern : patterns) {
                const auto idx = static_cast<std::uint32_t>(cw ^ pattern);
                subset.push_back(idx);
                covered[idx] = 1;
            }
        }
        auto& remainder = partition.subsets.back();
        for (std::size_t s = 0; s < dim; ++s)
            if (!covered[s]) remainder.push_back(static_cast<std::uint32_t>(s));
        return partition;
    }

    ProductRegister register_;
    std::optional<DenseState> dense_;
    std::string code_id_;
    bool used_ = false;
    bool released_ = false;
};

namespace detail {

inline Basis draw_error_basis(ErrorMode mode, Rng& rng) {
    return mode == ErrorMode::Bloch ? Basis::random_bloch(rng) : Basis::random_conjugate(rng);
}

inline ProductRegister prepare_register(const AliceRecord& record) {
    const std::size_t n = record.codeword.size();
    std::vector<Qubit> qubits;
    qubits.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        qubits.push_back(basis_state(record.global_basis, record.codeword[i]));
    for (const auto& entry : record.errors)
        qubits[entry.position] = basis_state(entry.basis, entry.value);
    return ProductRegister(std::move(qubits));
}

} // namespace detail

// Exact reconstruction of the prepared state from Alice's record.
inline ProductRegister rebuild_register(const AliceRecord& record) {
    return detail::prepare_register(record);
}

// Encryption with caller-chosen basis and decoy entries (replay and tests).
inline std::pair<CiphertextBundle, AliceRecord> encrypt_enhanced_with(
    const PublicKey& pk, const BitString& message, const Code& code, const Basis& global_basis,
    std::vector<ErrorEntry> errors, ErrorMode mode, Rng& rng) {
    if (global_basis.kind() == Basis::Kind::General)
        throw DomainError("encrypt_enhanced: global basis must be computational or Hadamard");
    const PkeCiphertext ct = pke_encrypt(pk, message, rng);
    if (ct.bits.size() != code.k())
        throw LengthMismatch("encrypt_enhanced: code k != PKE ciphertext length");

    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i].position >= code.n()) throw DomainError("encrypt_enhanced: decoy position out of range");
        for (std::size_t j = i + 1; j < errors.size(); ++j)
            if (errors[i].position == errors[j].position)
                throw DomainError("encrypt_enhanced: duplicate decoy positions");
    }

    AliceRecord record;
    record.global_basis = global_basis;
    record.codeword = code.encode(ct.bits);
    record.errors = std::move(errors);
    record.code_id = code.name();
    record.pke_ciphertext = ct.bits;
    record.error_mode = mode;

    CiphertextBundle bundle(detail::prepare_register(record), code.name());
    return {std::move(bundle), std::move(record)};
}

// Full encryption: C = PKE(B), D = ECC(C), one uniformly random global
// basis, and `error_count` decoy positions (default: the code's correction
// radius e) rewritten as random values in random bases per `mode`.
inline std::pair<CiphertextBundle, AliceRecord> encrypt_enhanced(
    const PublicKey& pk, const BitString& message, const Code& code, ErrorMode mode, Rng& rng,
    std::optional<std::size_t> error_count = std::nullopt) {
    const std::size_t e = error_count.value_or(code.e());
    if (e > code.e()) throw DomainError("encrypt_enhanced: more decoys than the code can absorb");

    const Basis beta = rng.bit() ? Basis::hadamard() : Basis::computational();

    std::vector<std::size_t> positions;
    while (positions.size() < e) {
        const auto p = static_cast<std::size_t>(rng.below(code.n()));
        if (std::find(positions.begin(), positions.end(), p) == positions.end())
            positions.push_back(p);
    }
    std::sort(positions.begin(), positions.end());

    std::vector<ErrorEntry> errors;
    errors.reserve(e);
    for (auto p : positions) {
        ErrorEntry entry;
        entry.position = p;
        entry.value = rng.bit();
        entry.basis = detail::draw_error_basis(mode, rng);
        errors.push_back(entry);
    }
    return encrypt_enhanced_with(pk, message, code, beta, std::move(errors), mode, rng);
}

// Bob's reading path: guess one of the two conjugate bases, measure
// everything, decode, decrypt. Empty optional = decode failure. Consumes
// the bundle either way.
inline std::optional<BitString> bob_decrypt(const SecretKey& sk, CiphertextBundle& bundle,
                                            const Code& code, Rng& rng,
                                            std::optional<Basis> forced_guess = std::nullopt) {
    const Basis guess = forced_guess ? *forced_guess
                                     : (rng.bit() ? Basis::hadamard() : Basis::computational());
    const BitString word = bundle.measure_all(guess, rng);
    const auto decoded = code.decode(word);
    if (!decoded) return std::nullopt;
    return pke_decrypt(sk, PkeCiphertext{*decoded});
}

inline std::optional<BitString> bob_decrypt(const SecretKey& sk, CiphertextBundle& bundle, Rng& rng) {
    return bob_decrypt(sk, bundle, make_code(bundle.code_id()), rng);
}

// Honest deletion: return the whole state untouched.
inline ReturnedState bob_delete_quantum(CiphertextBundle& bundle) { return bundle.release(); }

// Alice's check of a returned state: every position must reproduce its
// preparation -- codeword bits in the global basis, decoy values in their
// recorded bases.
inline bool alice_verify_quantum(const AliceRecord& record, ReturnedState& returned, Rng& rng) {
    const std::size_t n = record.codeword.size();
    if (returned.size() != n) throw LengthMismatch("alice_verify_quantum: length mismatch");
    std::vector<const ErrorEntry*> at(n, nullptr);
    for (const auto& entry : record.errors) at[entry.position] = &entry;
    for (std::size_t i = 0; i < n; ++i) {
        const Basis& basis = at[i] ? at[i]->basis : record.global_basis;
        const int expected = at[i] ? at[i]->value : record.codeword[i];
        if (returned.measure(i, basis, rng) != expected) return false;
    }
    return true;
}

using ClassicalChallenge = std::vector<Basis>;

// Fresh random Bloch bases everywhere except the decoy positions, which get
// their exact preparation bases.
inline ClassicalChallenge make_classical_challenge(const AliceRecord& record, Rng& rng) {
    const std::size_t n = record.codeword.size();
    ClassicalChallenge challenge;
    challenge.reserve(n);
    for (std::size_t i = 0; i < n; ++i) challenge.push_back(Basis::random_bloch(rng));
    for (const auto& entry : record.errors) challenge[entry.position] = entry.basis;
    return challenge;
}

// Bob measures per the challenge and returns the outcome string. Consumes.
inline BitString bob_answer_challenge(CiphertextBundle& bundle, const ClassicalChallenge& challenge,
                                      Rng& rng) {
    return bundle.measure_each(challenge, rng);
}

struct ClassicalVerifyResult {
    bool accepted = false;
    // Diagnostic only, never part of accept/reject: uniformity of the
    // non-decoy certificate bits (chi-squared, 1 dof).
    double nonerror_uniformity_pvalue = 1.0;
};

inline ClassicalVerifyResult alice_verify_classical(const AliceRecord& record,
                                                    const BitString& certificate) {
    const std::size_t n = record.codeword.size();
    if (certificate.size() != n) throw LengthMismatch("alice_verify_classical: length mismatch");

    ClassicalVerifyResult result;
    result.accepted = true;
    for (const auto& entry : record.errors)
        if (certificate[entry.position] != entry.value) result.accepted = false;

    std::size_t ones = 0, count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (record.is_error_position(i)) continue;
        ones += static_cast<std::size_t>(certificate[i]);
        ++count;
    }
    if (count >= 8) {
        const double expect = static_cast<double>(count) / 2.0;
        const double diff = static_cast<double>(ones) - expect;
        result.nonerror_uniformity_pvalue = chi_squared_pvalue(diff * diff / (expect / 2.0), 1);
    }
    return result;
}

struct CheatOutcome {
    std::optional<BitString> plaintext; // empty = decode failed
    ReturnedState returned;
    Basis guess = Basis::computational();
};

// Measure-then-forge: run the reading measurement, keep the collapsed
// register, and return it as the deletion certificate.
inline CheatOutcome cheat_measure_forge(const SecretKey& sk, CiphertextBundle& bundle,
                                        const Code& code, Rng& rng,
                                        std::optional<Basis> forced_guess = std::nullopt) {
    const Basis guess = forced_guess ? *forced_guess
                                     : (rng.bit() ? Basis::hadamard() : Basis::computational());
    const BitString word = bundle.measure_all(guess, rng);
    const auto decoded = code.decode(word);
    std::optional<BitString> plaintext;
    if (decoded) plaintext = pke_decrypt(sk, PkeCiphertext{*decoded});
    return {std::move(plaintext), bundle.take_measured_state(), guess};
}

// Joint-measurement cheat: guess the basis, project onto the codeword balls
// in that label space, decode the ball's codeword, and return the
// post-measurement state. With a correct guess the state's support lies in
// one ball, the projection acts as the identity, and the certificate
// remains perfect.
inline CheatOutcome cheat_ball_povm(const SecretKey& sk, CiphertextBundle& bundle, const Code& code,
                                    const Basis& guess, Rng& rng,
                                    std::size_t dense_cap = kDefaultDenseCap) {
    const BallPovmOutcome outcome = bundle.measure_ball_povm(code, guess, rng, dense_cap);
    std::optional<BitString> plaintext;
    if (outcome.in_ball) {
        const BitString codeword_msg = outcome.message; // the decoded PKE ciphertext
        plaintext = pke_decrypt(sk, PkeCiphertext{codeword_msg});
    }
    return {std::move(plaintext), bundle.take_measured_state(), guess};
}

} // namespace certdel
