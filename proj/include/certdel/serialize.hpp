#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "certdel/bitstring.hpp"
#include "certdel/common.hpp"
#include "certdel/experiments.hpp"
#include "certdel/pke.hpp"
#include "certdel/protocol_enhanced.hpp"
#include "certdel/qubit.hpp"

namespace certdel {

using OrderedJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// .qreg: versioned little-endian binary register file.
//
//   0   magic "QRG1"
//   4   u32 version (1)
//   8   u8  sim_artifact flag (always 1: serialized amplitudes are a
//       simulation device, not physically transmissible information)
//   9   u8  used flag (bundle already claimed by an operation)
//   10  u32 code id length L, then L bytes
//   14+L u32 qubit count n
//   then per qubit: f64 re0, im0, re1, im1 and u8 consumed (33 bytes)
// ---------------------------------------------------------------------------

struct QregFile {
    std::string code_id;
    bool used = false;
    ProductRegister reg;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class ByteReader {
public:
    ByteReader(std::string data, std::string path) : data_(std::move(data)), path_(std::move(path)) {}

    std::size_t offset() const { return pos_; }

    std::uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
        return v;
    }

    double f64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
        return std::bit_cast<double>(v);
    }

    std::string bytes(std::size_t count, const char* what) {
        need(count, what);
        std::string s = data_.substr(pos_, count);
        pos_ += count;
        return s;
    }

    void expect_end() {
        if (pos_ != data_.size())
            throw FormatError(path_ + ": " + std::to_string(data_.size() - pos_) +
                              " trailing bytes at byte " + std::to_string(pos_));
    }

private:
    void need(std::size_t count, const char* what) {
        if (pos_ + count > data_.size())
            throw FormatError(path_ + ": truncated while reading " + std::string(what) +
                              " at byte " + std::to_string(pos_));
    }

    std::string data_;
    std::string path_;
    std::size_t pos_ = 0;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string() + ": cannot open");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(path.string() + ": cannot open for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw FormatError(path.string() + ": write failed");
}

inline std::string bytes_to_hex(const std::vector<std::uint8_t>& bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

inline std::vector<std::uint8_t> hex_to_bytes(const std::string& hex) {
    if (hex.size() % 2 != 0) throw FormatError("odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw FormatError("invalid hex digit");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return out;
}

} // namespace detail

inline void write_qreg(const std::filesystem::path& path, const QregFile& file) {
    std::string out;
    out += "QRG1";
    detail::put_u32(out, 1);
    out.push_back(1); // sim_artifact
    out.push_back(file.used ? 1 : 0);
    detail::put_u32(out, static_cast<std::uint32_t>(file.code_id.size()));
    out += file.code_id;
    detail::put_u32(out, static_cast<std::uint32_t>(file.reg.size()));
    for (std::size_t i = 0; i < file.reg.size(); ++i) {
        const Qubit& q = file.reg.qubit(i);
        detail::put_f64(out, q.amp0.real());
        detail::put_f64(out, q.amp0.imag());
        detail::put_f64(out, q.amp1.real());
        detail::put_f64(out, q.amp1.imag());
        out.push_back(file.reg.consumed(i) ? 1 : 0);
    }
    detail::write_file(path, out);
}

inline QregFile read_qreg(const std::filesystem::path& path) {
    detail::ByteReader r(detail::read_file(path), path.string());
    if (r.bytes(4, "magic") != "QRG1") throw FormatError(path.string() + ": bad magic at byte 0");
    const std::uint32_t version = r.u32("version");
    if (version != 1)
        throw FormatError(path.string() + ": unsupported version " + std::to_string(version));
    if (r.u8("sim_artifact flag") != 1)
        throw FormatError(path.string() + ": sim_artifact flag not set");
    const bool used = r.u8("used flag") != 0;
    const std::uint32_t id_len = r.u32("code id length");
    if (id_len > 256) throw FormatError(path.string() + ": implausible code id length");
    const std::string code_id = r.bytes(id_len, "code id");
    const std::uint32_t n = r.u32("qubit count");
    if (n > 4096) throw FormatError(path.string() + ": implausible qubit count");

    std::vector<Qubit> qubits;
    std::vector<std::uint8_t> consumed;
    qubits.reserve(n);
    consumed.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        // sequential reads; field order is part of the format
        const double re0 = r.f64("amp0.re");
        const double im0 = r.f64("amp0.im");
        const double re1 = r.f64("amp1.re");
        const double im1 = r.f64("amp1.im");
        Qubit q{Complex(re0, im0), Complex(re1, im1)};
        const std::uint8_t flag = r.u8("consumed flag");
        if (flag > 1) throw FormatError(path.string() + ": bad consumed flag at byte " +
                                        std::to_string(r.offset() - 1));
        qubits.push_back(q);
        consumed.push_back(flag);
    }
    r.expect_end();
    return QregFile{code_id, used, ProductRegister::restore(std::move(qubits), std::move(consumed))};
}

// ---------------------------------------------------------------------------
// JSON artifacts. Every file carries "type", "version" and the generator
// string; key order is fixed for reproducible bytes.
// ---------------------------------------------------------------------------

namespace detail {

inline OrderedJson json_header(const char* type) {
    OrderedJson j;
    j["type"] = type;
    j["version"] = 1;
    j["generator"] = kVersionString;
    return j;
}

inline OrderedJson parse_json(const std::filesystem::path& path, const char* expected_type) {
    OrderedJson j;
    try {
        j = OrderedJson::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("type") || j["type"] != expected_type)
        throw FormatError(path.string() + ": not a '" + expected_type + "' file");
    return j;
}

inline OrderedJson basis_to_json(const Basis& basis) {
    OrderedJson j;
    switch (basis.kind()) {
        case Basis::Kind::Computational: j["kind"] = "computational"; break;
        case Basis::Kind::Hadamard: j["kind"] = "hadamard"; break;
        case Basis::Kind::General:
            j["kind"] = "general";
            j["theta"] = basis.theta();
            j["psi"] = basis.psi();
            break;
    }
    return j;
}

inline Basis basis_from_json(const OrderedJson& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "computational") return Basis::computational();
    if (kind == "hadamard") return Basis::hadamard();
    if (kind == "general")
        return Basis::general(j.at("theta").get<double>(), j.at("psi").get<double>());
    throw FormatError("unknown basis kind '" + kind + "'");
}

} // namespace detail

inline void write_public_key(const std::filesystem::path& path, const PublicKey& pk,
                             std::uint64_t seed) {
    OrderedJson j = detail::json_header("public-key");
    j["scheme"] = pk.scheme;
    j["lambda"] = pk.lambda;
    j["seed"] = seed;
    j["pk_hex"] = detail::bytes_to_hex(pk.bytes);
    detail::write_file(path, j.dump(2) + "\n");
}

inline void write_secret_key(const std::filesystem::path& path, const KeyPair& kp,
                             std::uint64_t seed) {
    OrderedJson j = detail::json_header("secret-key");
    j["scheme"] = kp.sk.scheme;
    j["lambda"] = kp.sk.lambda;
    j["seed"] = seed;
    j["pk_hex"] = detail::bytes_to_hex(kp.pk.bytes);
    j["sk_hex"] = detail::bytes_to_hex(kp.sk.bytes);
    detail::write_file(path, j.dump(2) + "\n");
}

inline PublicKey read_public_key(const std::filesystem::path& path) {
    const OrderedJson j = detail::parse_json(path, "public-key");
    return PublicKey{j.at("scheme").get<std::string>(), j.at("lambda").get<std::uint32_t>(),
                     detail::hex_to_bytes(j.at("pk_hex").get<std::string>())};
}

inline SecretKey read_secret_key(const std::filesystem::path& path) {
    const OrderedJson j = detail::parse_json(path, "secret-key");
    return SecretKey{j.at("scheme").get<std::string>(), j.at("lambda").get<std::uint32_t>(),
                     detail::hex_to_bytes(j.at("sk_hex").get<std::string>())};
}

inline void write_record(const std::filesystem::path& path, const AliceRecord& record,
                         std::uint64_t seed) {
    OrderedJson j = detail::json_header("record");
    j["seed"] = seed;
    j["code"] = record.code_id;
    j["global_basis"] =
        record.global_basis.kind() == Basis::Kind::Hadamard ? "hadamard" : "computational";
    j["codeword"] = record.codeword.to_string();
    j["pke_ciphertext"] = record.pke_ciphertext.to_string();
    j["error_mode"] = to_string(record.error_mode);
    OrderedJson errors = OrderedJson::array();
    for (const auto& entry : record.errors) {
        OrderedJson e;
        e["position"] = entry.position;
        e["value"] = entry.value;
        e["basis"] = detail::basis_to_json(entry.basis);
        errors.push_back(std::move(e));
    }
    j["errors"] = std::move(errors);
    detail::write_file(path, j.dump(2) + "\n");
}

inline AliceRecord read_record(const std::filesystem::path& path) {
    const OrderedJson j = detail::parse_json(path, "record");
    AliceRecord record;
    record.code_id = j.at("code").get<std::string>();
    record.global_basis = j.at("global_basis").get<std::string>() == "hadamard"
                              ? Basis::hadamard()
                              : Basis::computational();
    record.codeword = BitString::from_string(j.at("codeword").get<std::string>());
    record.pke_ciphertext = BitString::from_string(j.at("pke_ciphertext").get<std::string>());
    record.error_mode = error_mode_from_string(j.at("error_mode").get<std::string>());
    for (const auto& e : j.at("errors")) {
        ErrorEntry entry;
        entry.position = e.at("position").get<std::size_t>();
        entry.value = e.at("value").get<int>();
        entry.basis = detail::basis_from_json(e.at("basis"));
        record.errors.push_back(entry);
    }
    return record;
}

inline void write_challenge(const std::filesystem::path& path, const ClassicalChallenge& challenge,
                            std::uint64_t seed) {
    OrderedJson j = detail::json_header("challenge");
    j["seed"] = seed;
    OrderedJson bases = OrderedJson::array();
    for (const auto& basis : challenge) bases.push_back(detail::basis_to_json(basis));
    j["bases"] = std::move(bases);
    detail::write_file(path, j.dump(2) + "\n");
}

inline ClassicalChallenge read_challenge(const std::filesystem::path& path) {
    const OrderedJson j = detail::parse_json(path, "challenge");
    ClassicalChallenge challenge;
    for (const auto& b : j.at("bases")) challenge.push_back(detail::basis_from_json(b));
    return challenge;
}

inline void write_certificate(const std::filesystem::path& path, const BitString& bits,
                              std::uint64_t seed) {
    OrderedJson j = detail::json_header("certificate");
    j["seed"] = seed;
    j["bits"] = bits.to_string();
    detail::write_file(path, j.dump(2) + "\n");
}

inline BitString read_certificate(const std::filesystem::path& path) {
    const OrderedJson j = detail::parse_json(path, "certificate");
    return BitString::from_string(j.at("bits").get<std::string>());
}

inline OrderedJson table1_to_json(const Table1Report& report) {
    OrderedJson j = detail::json_header("report");
    OrderedJson rows = OrderedJson::array();
    for (const auto& row : report.rows) {
        OrderedJson r;
        r["scheme"] = row.scheme;
        r["p_reading"] = row.p_reading;
        r["p_dist"] = OrderedJson{{"value", row.p_dist}, {"strategy", row.p_dist_strategy}};
        r["p_nfp"] = row.p_nfp;
        r["trials"] = row.trials;
        r["seed"] = row.seed;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["notes"] = report.notes;
    return j;
}

// ---------------------------------------------------------------------------
// File validation: schema, version and invariant checks, never mutating.
// ---------------------------------------------------------------------------

struct FileDiagnostic {
    std::string path;
    bool ok = true;
    std::vector<std::string> issues;
};

namespace detail {

inline void check_record_invariants(const AliceRecord& record, FileDiagnostic& diag) {
    Code code = make_code(record.code_id);
    if (record.codeword.size() != code.n()) {
        diag.issues.push_back("codeword length " + std::to_string(record.codeword.size()) +
                              " does not match code n=" + std::to_string(code.n()));
    }
    if (record.pke_ciphertext.size() != code.k())
        diag.issues.push_back("pke ciphertext length does not match code k");
    if (record.errors.size() > code.e())
        diag.issues.push_back("more error entries than the code's correction radius");
    for (std::size_t i = 0; i < record.errors.size(); ++i) {
        const auto& entry = record.errors[i];
        if (entry.position >= record.codeword.size())
            diag.issues.push_back("error position out of range");
        if (entry.value != 0 && entry.value != 1) diag.issues.push_back("error value not a bit");
        for (std::size_t j = i + 1; j < record.errors.size(); ++j)
            if (entry.position == record.errors[j].position)
                diag.issues.push_back("duplicate error positions " +
                                      std::to_string(entry.position));
    }
}

} // namespace detail

inline FileDiagnostic validate_file(const std::filesystem::path& path) {
    FileDiagnostic diag;
    diag.path = path.string();
    try {
        if (path.extension() == ".qreg") {
            const QregFile file = read_qreg(path);
            for (std::size_t i = 0; i < file.reg.size(); ++i) {
                const double norm = file.reg.qubit(i).norm_sq();
                if (std::abs(norm - 1.0) > 1e-9)
                    diag.issues.push_back("qubit " + std::to_string(i) + " is not normalized");
            }
            if (!file.code_id.empty()) make_code(file.code_id);
        } else {
            const OrderedJson j = OrderedJson::parse(detail::read_file(path));
            const std::string type = j.is_object() && j.contains("type")
                                         ? j["type"].get<std::string>()
                                         : std::string();
            if (type == "record") {
                detail::check_record_invariants(read_record(path), diag);
            } else if (type == "public-key") {
                read_public_key(path);
            } else if (type == "secret-key") {
                read_secret_key(path);
            } else if (type == "challenge") {
                read_challenge(path);
            } else if (type == "certificate") {
                read_certificate(path);
            } else if (type == "report") {
                // structural parse was enough
            } else {
                diag.issues.push_back("unknown artifact type '" + type + "'");
            }
        }
    } catch (const std::exception& e) {
        diag.issues.push_back(e.what());
    }
    diag.ok = diag.issues.empty();
    return diag;
}

} // namespace certdel
