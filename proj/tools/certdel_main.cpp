// certdel: command-line driver for the certified-deletion simulation toolkit.
//
// Roles are separated by file custody: Alice keeps record.json and the
// secret-key file on her side, Bob only ever sees bundle/challenge files.
// Exit codes: 0 success or verification accept, 2 verification reject (or a
// failed decode/replay), 1 usage or I/O error.

#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "certdel/experiments.hpp"
#include "certdel/protocol_enhanced.hpp"
#include "certdel/protocol_original.hpp"
#include "certdel/serialize.hpp"

using namespace certdel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitReject = 2;

std::uint64_t resolve_seed(CLI::Option* seed_opt, std::uint64_t seed_value) {
    if (seed_opt->count() > 0) return seed_value;
    std::random_device device;
    const std::uint64_t seed =
        (static_cast<std::uint64_t>(device()) << 32) ^ static_cast<std::uint64_t>(device());
    std::cout << "seed: " << seed << "\n";
    return seed;
}

BitString parse_message(const std::string& text, std::size_t bits) {
    if (text.rfind("0b", 0) == 0) {
        const BitString s = BitString::from_string(text.substr(2));
        if (s.size() != bits) throw FormatError("message must be exactly " + std::to_string(bits) + " bits");
        return s;
    }
    return BitString::from_hex(text, bits);
}

Basis parse_conjugate_basis(const std::string& name) {
    if (name == "computational") return Basis::computational();
    if (name == "hadamard") return Basis::hadamard();
    throw FormatError("basis must be 'computational' or 'hadamard'");
}

struct ReplayCheck {
    bool ok = true;
    void expect(bool condition, const std::string& label) {
        std::cout << (condition ? "PASS " : "FAIL ") << label << "\n";
        ok = ok && condition;
    }
};

// Re-runs the two worked examples that motivated the toolkit and checks
// every printed quantity.
int run_replay(std::uint64_t seed) {
    ReplayCheck check;
    Rng rng(seed);

    // --- original scheme, the decrypt-then-delete separation ---
    {
        const BitString x = BitString::from_string("1011 0110");
        const BitString theta = BitString::from_string("0011 1001");
        const KeyPair kp = keygen("toy-9", 128, rng);
        auto [ct, secret] = enc_original_with(kp.pk, 0, x, theta, rng);

        check.expect(ct.channel_register().render() == "10++-11-",
                     "original-example: register renders as |10++-11->");
        const BitString plain = pke_decrypt(kp.sk, ct.classical());
        check.expect(plain[8] == 1, "original-example: masked bit equals parity 1 for b=0");

        auto attack = attack_original(kp.sk, ct, rng);
        const bool pattern = attack.certificate[2] == 1 && attack.certificate[3] == 1 &&
                             attack.certificate[4] == 0 && attack.certificate[7] == 0;
        check.expect(attack.recovered_bit == 0, "original-example: attack recovers the hidden bit");
        check.expect(pattern, "original-example: certificate matches the pattern **110**0");
        check.expect(verify_delete_original(secret, attack.certificate),
                     "original-example: forged certificate passes verification");
    }

    // --- enhanced scheme, the 31-qubit toy flow ---
    {
        const Code code = make_code("bch-31-16-7");
        const BitString ciphertext = BitString::from_string("1000 1001 1010 1011");
        const KeyPair kp = keygen("toy-16", 128, rng);
        // choose the plaintext that makes the PKE ciphertext equal the
        // published value, so the codeword prefix replays bit-exactly
        const BitString message = pke_decrypt(kp.sk, PkeCiphertext{ciphertext});

        std::vector<ErrorEntry> decoys{{0, 1, Basis::random_bloch(rng)},
                                       {2, 1, Basis::random_bloch(rng)},
                                       {6, 0, Basis::random_bloch(rng)}};
        auto [bundle, record] = encrypt_enhanced_with(kp.pk, message, code, Basis::computational(),
                                                      decoys, ErrorMode::Bloch, rng);

        check.expect(bundle.size() == 31, "enhanced-example: bundle carries 31 qubits");
        check.expect(record.pke_ciphertext == ciphertext,
                     "enhanced-example: PKE ciphertext equals 1000 1001 1010 1011");
        check.expect(record.codeword.prefix(16) == ciphertext,
                     "enhanced-example: codeword starts with the ciphertext (systematic)");
        check.expect(record.errors.size() == 3 && record.errors[0].position == 0 &&
                         record.errors[1].position == 2 && record.errors[2].position == 6,
                     "enhanced-example: decoys sit at positions 1, 3, 7 (1-based)");

        const ProductRegister prepared = rebuild_register(record);
        bool eigenstates = true;
        for (std::size_t i = 0; i < 31; ++i) {
            if (record.is_error_position(i)) continue;
            eigenstates = eigenstates && outcome_probability(prepared.qubit(i),
                                                             Basis::computational(),
                                                             record.codeword[i]) > 1.0 - 1e-12;
        }
        check.expect(eigenstates, "enhanced-example: non-decoy qubits encode the codeword bits");

        const auto plaintext = bob_decrypt(kp.sk, bundle, code, rng, Basis::computational());
        check.expect(plaintext.has_value() && *plaintext == message,
                     "enhanced-example: matching-basis measurement decodes through 3 decoys");

        auto [bundle2, record2] = encrypt_enhanced(kp.pk, message, code, ErrorMode::Bloch, rng);
        ReturnedState returned = bob_delete_quantum(bundle2);
        check.expect(alice_verify_quantum(record2, returned, rng),
                     "enhanced-example: honest deletion certificate verifies");
    }

    return check.ok ? kExitOk : kExitReject;
}

int run_attack_original(std::uint64_t seed, std::size_t n, std::size_t trials,
                        const std::string& out_path) {
    std::size_t recovered = 0, cert_ok = 0, joint = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(stable_hash(seed, t));
        const KeyPair kp = keygen("toy-" + std::to_string(n + 1), 128, rng);
        const int b = rng.bit();
        auto [ct, secret] = enc_original(kp.pk, b, n, rng);
        const auto result = attack_original(kp.sk, ct, rng);
        const bool bit_ok = result.recovered_bit == b;
        const bool pass = verify_delete_original(secret, result.certificate);
        recovered += bit_ok;
        cert_ok += pass;
        joint += bit_ok && pass;
    }
    OrderedJson j = detail::json_header("report");
    j["seed"] = seed;
    j["n"] = n;
    j["trials"] = trials;
    j["recovery_rate"] = static_cast<double>(recovered) / static_cast<double>(trials);
    j["cert_accept_rate"] = static_cast<double>(cert_ok) / static_cast<double>(trials);
    j["joint_rate"] = static_cast<double>(joint) / static_cast<double>(trials);
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        detail::write_file(out_path, text);
    return kExitOk;
}

OrderedJson forge_curve_to_json(const ForgeCurve& curve) {
    OrderedJson j = detail::json_header("report");
    OrderedJson points = OrderedJson::array();
    for (const auto& p : curve.points) {
        OrderedJson e;
        e["code"] = p.code_id;
        e["decoys"] = p.decoys;
        e["acceptance"] = p.acceptance.value;
        e["std_error"] = p.acceptance.std_error;
        e["trials"] = p.acceptance.trials;
        e["seed"] = p.acceptance.seed;
        points.push_back(std::move(e));
    }
    j["points"] = std::move(points);
    j["log2_slope"] = curve.log2_slope;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersionString) + " - certified-deletion simulation toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string scheme = "toy-16", code_id = "bch-31-16-7", error_mode = "bloch";
    std::string pk_path, sk_path, out_path, record_path, bundle_path, returned_path;
    std::string challenge_path, cert_path, msg_text, format = "both", suite = "table1";
    std::string forced_basis;
    std::uint32_t lambda = 128;
    std::size_t trials = 10000, n_qubits = 8, workers = 1;
    std::vector<std::string> paths;

    auto* keygen_cmd = app.add_subcommand("keygen", "generate a key pair");
    auto* keygen_seed = keygen_cmd->add_option("--seed", seed, "master seed");
    keygen_cmd->add_option("--scheme", scheme, "PKE scheme id (toy-K or toy-K-mM)");
    keygen_cmd->add_option("--lambda", lambda, "security parameter (metadata)");
    keygen_cmd->add_option("--pk", pk_path, "public key output")->required();
    keygen_cmd->add_option("--sk", sk_path, "secret key output")->required();

    auto* encrypt_cmd = app.add_subcommand("encrypt", "encrypt a message into a quantum bundle");
    auto* encrypt_seed = encrypt_cmd->add_option("--seed", seed, "master seed");
    encrypt_cmd->add_option("--pk", pk_path, "recipient public key")->required();
    encrypt_cmd->add_option("--msg", msg_text, "plaintext (hex, or 0b-prefixed bits)")->required();
    encrypt_cmd->add_option("--code", code_id, "error-correcting code id");
    encrypt_cmd->add_option("--error-mode", error_mode, "decoy basis mode: bloch|conjugate");
    encrypt_cmd->add_option("--out", bundle_path, "bundle output (.qreg)")->required();
    encrypt_cmd->add_option("--record", record_path, "verification record output (Alice's secret)")
        ->required();

    auto* decrypt_cmd = app.add_subcommand("decrypt", "measure a bundle and decrypt");
    auto* decrypt_seed = decrypt_cmd->add_option("--seed", seed, "master seed");
    decrypt_cmd->add_option("--sk", sk_path, "secret key file")->required();
    decrypt_cmd->add_option("--bundle", bundle_path, "bundle file")->required();
    decrypt_cmd->add_option("--basis", forced_basis,
                            "force the measurement basis instead of guessing");

    auto* delete_cmd = app.add_subcommand("delete", "honestly return the bundle as a certificate");
    delete_cmd->add_option("--bundle", bundle_path, "bundle file")->required();
    delete_cmd->add_option("--out", returned_path, "returned state output (.qreg)")->required();

    auto* verify_cmd = app.add_subcommand("verify", "verify a returned quantum certificate");
    auto* verify_seed = verify_cmd->add_option("--seed", seed, "master seed");
    verify_cmd->add_option("--record", record_path, "verification record")->required();
    verify_cmd->add_option("--returned", returned_path, "returned state (.qreg)")->required();

    auto* challenge_cmd = app.add_subcommand("challenge", "issue a classical-certificate challenge");
    auto* challenge_seed = challenge_cmd->add_option("--seed", seed, "master seed");
    challenge_cmd->add_option("--record", record_path, "verification record")->required();
    challenge_cmd->add_option("--out", challenge_path, "challenge output")->required();

    auto* respond_cmd = app.add_subcommand("respond", "measure a bundle per a challenge");
    auto* respond_seed = respond_cmd->add_option("--seed", seed, "master seed");
    respond_cmd->add_option("--bundle", bundle_path, "bundle file")->required();
    respond_cmd->add_option("--challenge", challenge_path, "challenge file")->required();
    respond_cmd->add_option("--out", cert_path, "certificate output")->required();

    auto* verify_classical_cmd =
        app.add_subcommand("verify-classical", "verify a classical certificate");
    verify_classical_cmd->add_option("--record", record_path, "verification record")->required();
    verify_classical_cmd->add_option("--cert", cert_path, "certificate file")->required();

    auto* attack_cmd =
        app.add_subcommand("attack-original", "run the decrypt-and-still-delete separation attack");
    auto* attack_seed = attack_cmd->add_option("--seed", seed, "master seed");
    attack_cmd->add_option("--n", n_qubits, "register length");
    attack_cmd->add_option("--trials", trials, "trial count");
    attack_cmd->add_option("--out", out_path, "report output (stdout if omitted)");

    auto* experiment_cmd = app.add_subcommand("experiment", "run a Monte Carlo suite");
    auto* experiment_seed = experiment_cmd->add_option("--seed", seed, "master seed");
    experiment_cmd->add_option("--suite", suite, "table1 | forge-curve");
    experiment_cmd->add_option("--trials", trials, "trials per estimate");
    experiment_cmd->add_option("--workers", workers, "worker threads");
    experiment_cmd->add_option("--error-mode", error_mode, "decoy basis mode: bloch|conjugate");
    experiment_cmd->add_option("--out", out_path, "output base name")->required();
    experiment_cmd->add_option("--format", format, "csv | json | both");

    auto* replay_cmd =
        app.add_subcommand("replay-paper-examples", "re-run the published worked examples");
    auto* replay_seed = replay_cmd->add_option("--seed", seed, "master seed");

    auto* validate_cmd = app.add_subcommand("validate", "check artifact files without mutating");
    validate_cmd->add_option("files", paths, "files to check")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(keygen_cmd)) {
            const std::uint64_t s = resolve_seed(keygen_seed, seed);
            Rng rng(s);
            const KeyPair kp = keygen(scheme, lambda, rng);
            write_public_key(pk_path, kp.pk, s);
            write_secret_key(sk_path, kp, s);
            return kExitOk;
        }

        if (app.got_subcommand(encrypt_cmd)) {
            const std::uint64_t s = resolve_seed(encrypt_seed, seed);
            Rng rng(s);
            const PublicKey pk = read_public_key(pk_path);
            const Code code = make_code(code_id);
            const BitString message = parse_message(msg_text, scheme_plaintext_bits(pk.scheme));
            auto [bundle, record] =
                encrypt_enhanced(pk, message, code, error_mode_from_string(error_mode), rng);
            write_record(record_path, record, s);
            write_qreg(bundle_path, QregFile{code.name(), false, rebuild_register(record)});
            return kExitOk;
        }

        if (app.got_subcommand(decrypt_cmd)) {
            const std::uint64_t s = resolve_seed(decrypt_seed, seed);
            Rng rng(s);
            const SecretKey sk = read_secret_key(sk_path);
            QregFile file = read_qreg(bundle_path);
            if (file.used) throw AlreadyConsumed(bundle_path + ": bundle already consumed");
            CiphertextBundle bundle(std::move(file.reg), file.code_id);
            const Code code = make_code(file.code_id);
            std::optional<Basis> forced;
            if (!forced_basis.empty()) forced = parse_conjugate_basis(forced_basis);
            const auto result = bob_decrypt(sk, bundle, code, rng, forced);
            // the measurement consumed the bundle; record that in the file
            write_qreg(bundle_path, QregFile{file.code_id, true, ProductRegister{}});
            OrderedJson j = detail::json_header("report");
            j["seed"] = s;
            j["status"] = result.has_value() ? "ok" : "decode-failed";
            if (result.has_value()) j["plaintext_bits"] = result->to_string();
            std::cout << j.dump(2) << "\n";
            return result.has_value() ? kExitOk : kExitReject;
        }

        if (app.got_subcommand(delete_cmd)) {
            if (returned_path == bundle_path)
                throw FormatError("--out must differ from --bundle");
            QregFile file = read_qreg(bundle_path);
            if (file.used) throw AlreadyConsumed(bundle_path + ": bundle already consumed");
            CiphertextBundle bundle(std::move(file.reg), file.code_id);
            ReturnedState returned = bob_delete_quantum(bundle);
            write_qreg(returned_path, QregFile{file.code_id, false, returned.product()});
            write_qreg(bundle_path, QregFile{file.code_id, true, ProductRegister{}});
            return kExitOk;
        }

        if (app.got_subcommand(verify_cmd)) {
            const std::uint64_t s = resolve_seed(verify_seed, seed);
            Rng rng(s);
            const AliceRecord record = read_record(record_path);
            QregFile file = read_qreg(returned_path);
            ReturnedState returned(std::move(file.reg));
            const bool ok = alice_verify_quantum(record, returned, rng);
            std::cout << (ok ? "accept" : "reject") << "\n";
            return ok ? kExitOk : kExitReject;
        }

        if (app.got_subcommand(challenge_cmd)) {
            const std::uint64_t s = resolve_seed(challenge_seed, seed);
            Rng rng(s);
            const AliceRecord record = read_record(record_path);
            write_challenge(challenge_path, make_classical_challenge(record, rng), s);
            return kExitOk;
        }

        if (app.got_subcommand(respond_cmd)) {
            if (cert_path == bundle_path) throw FormatError("--out must differ from --bundle");
            const std::uint64_t s = resolve_seed(respond_seed, seed);
            Rng rng(s);
            QregFile file = read_qreg(bundle_path);
            if (file.used) throw AlreadyConsumed(bundle_path + ": bundle already consumed");
            CiphertextBundle bundle(std::move(file.reg), file.code_id);
            const ClassicalChallenge challenge = read_challenge(challenge_path);
            const BitString cert = bob_answer_challenge(bundle, challenge, rng);
            write_certificate(cert_path, cert, s);
            write_qreg(bundle_path, QregFile{file.code_id, true, ProductRegister{}});
            return kExitOk;
        }

        if (app.got_subcommand(verify_classical_cmd)) {
            const AliceRecord record = read_record(record_path);
            const BitString cert = read_certificate(cert_path);
            const ClassicalVerifyResult result = alice_verify_classical(record, cert);
            std::cout << (result.accepted ? "accept" : "reject")
                      << " (non-decoy uniformity p=" << result.nonerror_uniformity_pvalue << ")\n";
            return result.accepted ? kExitOk : kExitReject;
        }

        if (app.got_subcommand(attack_cmd)) {
            const std::uint64_t s = resolve_seed(attack_seed, seed);
            return run_attack_original(s, n_qubits, trials, out_path);
        }

        if (app.got_subcommand(experiment_cmd)) {
            const std::uint64_t s = resolve_seed(experiment_seed, seed);
            const bool want_csv = format == "csv" || format == "both";
            const bool want_json = format == "json" || format == "both";
            if (!want_csv && !want_json) throw FormatError("format must be csv, json or both");
            if (suite == "table1") {
                Table1Config cfg;
                cfg.trials = trials;
                cfg.seed = s;
                cfg.workers = workers;
                cfg.error_mode = error_mode_from_string(error_mode);
                const Table1Report report = table1_report(cfg);
                if (want_csv) detail::write_file(out_path + ".csv", table1_to_csv(report));
                if (want_json)
                    detail::write_file(out_path + ".json", table1_to_json(report).dump(2) + "\n");
                return kExitOk;
            }
            if (suite == "forge-curve") {
                const ForgeCurve curve =
                    estimate_forge_curve({"repetition-3", "repetition-5", "repetition-7"}, trials,
                                         s, error_mode_from_string(error_mode), workers);
                OrderedJson j = forge_curve_to_json(curve);
                if (want_json) detail::write_file(out_path + ".json", j.dump(2) + "\n");
                if (want_csv) {
                    std::string csv = std::string("# ") + kVersionString + "\n";
                    csv += "code,decoys,acceptance,std_error,trials,seed\n";
                    for (const auto& p : curve.points)
                        csv += p.code_id + "," + std::to_string(p.decoys) + "," +
                               detail::format_prob(p.acceptance.value) + "," +
                               detail::format_prob(p.acceptance.std_error) + "," +
                               std::to_string(p.acceptance.trials) + "," +
                               std::to_string(p.acceptance.seed) + "\n";
                    detail::write_file(out_path + ".csv", csv);
                }
                return kExitOk;
            }
            throw FormatError("unknown suite '" + suite + "'");
        }

        if (app.got_subcommand(replay_cmd)) {
            const std::uint64_t s = resolve_seed(replay_seed, seed);
            return run_replay(s);
        }

        if (app.got_subcommand(validate_cmd)) {
            bool all_ok = true;
            for (const auto& p : paths) {
                const FileDiagnostic diag = validate_file(p);
                std::cout << diag.path << ": " << (diag.ok ? "ok" : "INVALID") << "\n";
                for (const auto& issue : diag.issues) std::cout << "  - " << issue << "\n";
                all_ok = all_ok && diag.ok;
            }
            return all_ok ? kExitOk : kExitUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
