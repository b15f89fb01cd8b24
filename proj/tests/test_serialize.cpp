#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "certdel/serialize.hpp"

using namespace certdel;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("certdel-test-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path file(const char* name) const { return path / name; }
};

ProductRegister sample_register(Rng& rng, std::size_t n = 6) {
    std::vector<Qubit> qubits;
    for (std::size_t i = 0; i < n; ++i)
        qubits.push_back(basis_state(Basis::random_bloch(rng), rng.bit()));
    ProductRegister reg(std::move(qubits));
    reg.measure(2, Basis::hadamard(), rng); // one consumed slot
    return reg;
}

} // namespace

TEST_CASE("qreg round-trip is amplitude-exact, flags included") {
    TempDir dir;
    Rng rng(1);
    const ProductRegister reg = sample_register(rng);
    write_qreg(dir.file("a.qreg"), QregFile{"bch-31-16-7", true, reg});
    const QregFile loaded = read_qreg(dir.file("a.qreg"));
    CHECK(loaded.code_id == "bch-31-16-7");
    CHECK(loaded.used);
    REQUIRE(loaded.reg.size() == reg.size());
    for (std::size_t i = 0; i < reg.size(); ++i) {
        CHECK(loaded.reg.qubit(i).amp0 == reg.qubit(i).amp0); // bit-exact
        CHECK(loaded.reg.qubit(i).amp1 == reg.qubit(i).amp1);
        CHECK(loaded.reg.consumed(i) == reg.consumed(i));
    }
}

TEST_CASE("qreg parser names the failing byte") {
    TempDir dir;
    Rng rng(2);
    write_qreg(dir.file("b.qreg"), QregFile{"hamming-7-4-3", false, sample_register(rng)});

    // truncate mid-amplitudes
    const auto original = detail::read_file(dir.file("b.qreg"));
    detail::write_file(dir.file("trunc.qreg"), original.substr(0, original.size() - 10));
    try {
        read_qreg(dir.file("trunc.qreg"));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("at byte") != std::string::npos);
    }

    // corrupt the magic
    std::string bad = original;
    bad[0] = 'X';
    detail::write_file(dir.file("magic.qreg"), bad);
    CHECK_THROWS_AS(read_qreg(dir.file("magic.qreg")), FormatError);

    // wrong version
    std::string bad_version = original;
    bad_version[4] = 9;
    detail::write_file(dir.file("ver.qreg"), bad_version);
    CHECK_THROWS_AS(read_qreg(dir.file("ver.qreg")), FormatError);
}

TEST_CASE("record JSON round-trips exactly, angles included") {
    TempDir dir;
    Rng rng(3);
    const Code code = make_code("bch-31-16-7");
    const KeyPair keys = keygen("toy-16", 128, rng);
    auto [bundle, record] =
        encrypt_enhanced(keys.pk, BitString::random(16, rng), code, ErrorMode::Bloch, rng);

    write_record(dir.file("record.json"), record, 42);
    const AliceRecord loaded = read_record(dir.file("record.json"));
    CHECK(loaded.code_id == record.code_id);
    CHECK(loaded.global_basis == record.global_basis);
    CHECK(loaded.codeword == record.codeword);
    CHECK(loaded.pke_ciphertext == record.pke_ciphertext);
    CHECK(loaded.error_mode == record.error_mode);
    REQUIRE(loaded.errors.size() == record.errors.size());
    for (std::size_t i = 0; i < record.errors.size(); ++i) {
        CHECK(loaded.errors[i].position == record.errors[i].position);
        CHECK(loaded.errors[i].value == record.errors[i].value);
        CHECK(loaded.errors[i].basis == record.errors[i].basis); // bitwise-equal doubles
    }
}

TEST_CASE("key files: sk only in the secret file, loading works") {
    TempDir dir;
    Rng rng(4);
    const KeyPair kp = keygen("toy-16", 128, rng);
    write_public_key(dir.file("pk.json"), kp.pk, 9);
    write_secret_key(dir.file("sk.json"), kp, 9);

    const std::string pk_text = detail::read_file(dir.file("pk.json"));
    CHECK(pk_text.find("sk_hex") == std::string::npos);
    const std::string sk_text = detail::read_file(dir.file("sk.json"));
    CHECK(sk_text.find("sk_hex") != std::string::npos);

    const PublicKey pk = read_public_key(dir.file("pk.json"));
    const SecretKey sk = read_secret_key(dir.file("sk.json"));
    CHECK(pk.bytes == kp.pk.bytes);
    CHECK(sk.bytes == kp.sk.bytes);
    CHECK(pk.scheme == "toy-16");

    // a secret key cannot be loaded from a public-key file
    CHECK_THROWS_AS(read_secret_key(dir.file("pk.json")), FormatError);
}

TEST_CASE("challenge and certificate files round-trip") {
    TempDir dir;
    Rng rng(5);
    const Code code = make_code("hamming-7-4-3");
    const KeyPair keys = keygen("toy-4", 128, rng);
    auto [bundle, record] =
        encrypt_enhanced(keys.pk, BitString::random(4, rng), code, ErrorMode::Bloch, rng);
    const ClassicalChallenge challenge = make_classical_challenge(record, rng);
    write_challenge(dir.file("challenge.json"), challenge, 1);
    const ClassicalChallenge loaded = read_challenge(dir.file("challenge.json"));
    REQUIRE(loaded.size() == challenge.size());
    for (std::size_t i = 0; i < challenge.size(); ++i) CHECK(loaded[i] == challenge[i]);

    const BitString cert = BitString::from_string("1010011");
    write_certificate(dir.file("cert.json"), cert, 1);
    CHECK(read_certificate(dir.file("cert.json")) == cert);
}

TEST_CASE("file-mediated honest lifecycle: encrypt, delete, verify") {
    TempDir dir;
    Rng rng(6);
    const Code code = make_code("bch-31-16-7");
    const KeyPair keys = keygen("toy-16", 128, rng);
    auto [bundle, record] =
        encrypt_enhanced(keys.pk, BitString::random(16, rng), code, ErrorMode::Bloch, rng);

    // Alice writes her record; the channel file carries the register.
    write_record(dir.file("record.json"), record, 7);
    ReturnedState returned = bob_delete_quantum(bundle);
    write_qreg(dir.file("returned.qreg"), QregFile{code.name(), false, returned.product()});

    const AliceRecord alice = read_record(dir.file("record.json"));
    QregFile back = read_qreg(dir.file("returned.qreg"));
    ReturnedState handed(std::move(back.reg));
    Rng verify_rng(8);
    CHECK(alice_verify_quantum(alice, handed, verify_rng));
}

TEST_CASE("validate_file distinguishes healthy and broken artifacts") {
    TempDir dir;
    Rng rng(7);

    write_qreg(dir.file("ok.qreg"), QregFile{"hamming-7-4-3", false, sample_register(rng)});
    CHECK(validate_file(dir.file("ok.qreg")).ok);

    const auto data = detail::read_file(dir.file("ok.qreg"));
    detail::write_file(dir.file("bad.qreg"), data.substr(0, 20));
    const FileDiagnostic bad = validate_file(dir.file("bad.qreg"));
    CHECK_FALSE(bad.ok);
    REQUIRE_FALSE(bad.issues.empty());
    CHECK(bad.issues[0].find("at byte") != std::string::npos);

    // a record with duplicate decoy positions is flagged
    const Code code = make_code("bch-31-16-7");
    const KeyPair keys = keygen("toy-16", 128, rng);
    auto [bundle, record] =
        encrypt_enhanced(keys.pk, BitString::random(16, rng), code, ErrorMode::Bloch, rng);
    AliceRecord corrupt = record;
    corrupt.errors[1].position = corrupt.errors[0].position;
    write_record(dir.file("dup.json"), corrupt, 1);
    const FileDiagnostic dup = validate_file(dir.file("dup.json"));
    CHECK_FALSE(dup.ok);
    bool mentions_duplicate = false;
    for (const auto& issue : dup.issues)
        if (issue.find("duplicate") != std::string::npos) mentions_duplicate = true;
    CHECK(mentions_duplicate);

    detail::write_file(dir.file("junk.json"), "{ not json");
    CHECK_FALSE(validate_file(dir.file("junk.json")).ok);

    detail::write_file(dir.file("alien.json"), "{\"type\": \"mystery\"}");
    CHECK_FALSE(validate_file(dir.file("alien.json")).ok);
}

TEST_CASE("report JSON carries rows and notes in the documented schema") {
    Table1Report report;
    report.rows.push_back(Table1Row{"ours-measured", 0.5, 0.5, "ball-povm", 1.0, 100, 1});
    report.rows.push_back(Table1Row{"upper-bound", 0.5, 0.978553, "formula", 0.75, 0, 1});
    report.notes.push_back("note");
    const OrderedJson j = table1_to_json(report);
    CHECK(j["type"] == "report");
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["p_dist"]["strategy"] == "ball-povm");
    CHECK(j["rows"][0]["p_dist"]["value"] == 0.5);
    CHECK(j["rows"][0]["p_nfp"] == 1.0);
    CHECK(j["notes"].size() == 1);
}
