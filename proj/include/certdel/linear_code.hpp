#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "certdel/bitstring.hpp"
#include "certdel/common.hpp"
#include "certdel/rng.hpp"

namespace certdel {

namespace detail {

// GF(2^5) generated by the primitive polynomial x^5 + x^2 + 1.
class Gf32 {
public:
    static const Gf32& instance() {
        static const Gf32 field;
        return field;
    }

    std::uint8_t mul(std::uint8_t a, std::uint8_t b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    std::uint8_t inv(std::uint8_t a) const {
        if (a == 0) throw DomainError("Gf32: inverse of zero");
        return exp_[(31 - log_[a]) % 31];
    }

    std::uint8_t pow_alpha(int e) const {
        e %= 31;
        if (e < 0) e += 31;
        return exp_[e];
    }

private:
    Gf32() {
        std::uint8_t x = 1;
        for (int i = 0; i < 31; ++i) {
            exp_[static_cast<std::size_t>(i)] = x;
            log_[x] = i;
            x = static_cast<std::uint8_t>(x << 1);
            if (x & 0x20) x ^= 0x25; // x^5 = x^2 + 1
        }
        for (int i = 31; i < 62; ++i) exp_[static_cast<std::size_t>(i)] = exp_[static_cast<std::size_t>(i - 31)];
        log_[0] = 0;
    }

    std::array<std::uint8_t, 62> exp_{};
    std::array<int, 32> log_{};
};

// Packed word convention throughout this module: bit q of the integer holds
// the coefficient of x^q, which is BitString position n-1-q. This is exactly
// BitString::to_uint / from_uint.
inline std::uint64_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    unsigned __int128 r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    if (r > static_cast<unsigned __int128>(~std::uint64_t{0})) throw BallTooLarge("binomial overflow");
    return static_cast<std::uint64_t>(r);
}

inline std::uint64_t ball_volume(std::size_t n, std::size_t radius) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i <= radius && i <= n; ++i) total += binomial(n, i);
    return total;
}

// Every n-bit mask of Hamming weight <= radius, zero first, then ascending
// weight with positions enumerated in lexicographic order.
inline std::vector<std::uint64_t> low_weight_masks(std::size_t n, std::size_t radius) {
    std::vector<std::uint64_t> out;
    out.push_back(0);
    for (std::size_t w = 1; w <= radius && w <= n; ++w) {
        std::vector<std::size_t> idx(w);
        for (std::size_t i = 0; i < w; ++i) idx[i] = i;
        while (true) {
            std::uint64_t mask = 0;
            for (auto i : idx) mask |= std::uint64_t{1} << i;
            out.push_back(mask);
            std::size_t j = w;
            bool advanced = false;
            while (j-- > 0) {
                if (idx[j] != n - w + j) {
                    ++idx[j];
                    for (std::size_t l = j + 1; l < w; ++l) idx[l] = idx[l - 1] + 1;
                    advanced = true;
                    break;
                }
            }
            if (!advanced) break;
        }
    }
    return out;
}

class CodeImpl {
public:
    CodeImpl(std::string name, std::size_t n, std::size_t k, std::size_t d)
        : name_(std::move(name)), n_(n), k_(k), d_(d) {}
    virtual ~CodeImpl() = default;

    const std::string& name() const { return name_; }
    std::size_t n() const { return n_; }
    std::size_t k() const { return k_; }
    std::size_t d() const { return d_; }
    std::size_t e() const { return (d_ - 1) / 2; }

    virtual std::uint64_t encode_word(std::uint64_t msg) const = 0;
    virtual std::optional<std::uint64_t> decode_word(std::uint64_t word) const = 0;

private:
    std::string name_;
    std::size_t n_, k_, d_;
};

// Systematic generator matrix plus a syndrome table covering every error
// pattern of weight <= e; bounded-distance by construction.
class TableCode : public CodeImpl {
public:
    static constexpr std::uint64_t kTableCap = 1u << 20;

    TableCode(std::string name, std::size_t n, std::size_t k, std::size_t d,
              std::vector<std::uint64_t> parity_rows)
        : CodeImpl(std::move(name), n, k, d), parity_rows_(std::move(parity_rows)) {
        if (ball_volume(n, e()) > kTableCap)
            throw BallTooLarge("TableCode: syndrome table would exceed cap");
        for (auto pattern : low_weight_masks(n, e())) {
            auto [it, inserted] = table_.emplace(syndrome(pattern), pattern);
            if (!inserted && it->second != pattern)
                throw DomainError("TableCode: declared distance is inconsistent with the matrix");
        }
    }

    std::uint64_t encode_word(std::uint64_t msg) const override {
        std::uint64_t parity = 0;
        for (std::size_t j = 0; j < k(); ++j)
            if ((msg >> (k() - 1 - j)) & 1) parity ^= parity_rows_[j];
        return (msg << (n() - k())) | parity;
    }

    std::optional<std::uint64_t> decode_word(std::uint64_t word) const override {
        const auto it = table_.find(syndrome(word));
        if (it == table_.end()) return std::nullopt;
        return (word ^ it->second) >> (n() - k());
    }

private:
    // Parity bits of the word XOR the parity implied by its message part;
    // zero exactly on codewords. Linear, so it serves for error masks too.
    std::uint64_t syndrome(std::uint64_t word) const {
        const std::uint64_t r_mask = (std::uint64_t{1} << (n() - k())) - 1;
        return (word ^ encode_word(word >> (n() - k()))) & r_mask;
    }

    std::vector<std::uint64_t> parity_rows_; // per message position, n-k bits
    std::unordered_map<std::uint64_t, std::uint64_t> table_; // syndrome -> error mask
};

// Narrow-sense BCH(31,16,7) over GF(2^5): the generator polynomial is the
// product of the minimal polynomials of alpha, alpha^3 and alpha^5 (degree
// 15). Decoding is syndrome evaluation, Berlekamp-Massey and Chien search,
// with a final syndrome recheck so failures never surface as silent
// miscorrections.
class Bch31Code : public CodeImpl {
public:
    Bch31Code() : CodeImpl("bch-31-16-7", 31, 16, 7) {
        gen_ = minimal_poly({1, 2, 4, 8, 16});
        gen_ = gf2_poly_mul(gen_, minimal_poly({3, 6, 12, 24, 17}));
        gen_ = gf2_poly_mul(gen_, minimal_poly({5, 10, 20, 9, 18}));
        if ((gen_ >> 15) != 1u) throw DomainError("Bch31Code: generator degree is not 15");
    }

    std::uint32_t generator_poly() const { return gen_; }

    std::uint64_t encode_word(std::uint64_t msg) const override {
        const std::uint64_t shifted = msg << 15;
        return shifted | poly_mod(shifted);
    }

    std::optional<std::uint64_t> decode_word(std::uint64_t word) const override {
        const auto& field = Gf32::instance();
        std::array<std::uint8_t, 7> synd{};
        bool all_zero = true;
        for (int i = 1; i <= 6; ++i) {
            synd[static_cast<std::size_t>(i)] = eval_syndrome(word, i);
            all_zero = all_zero && synd[static_cast<std::size_t>(i)] == 0;
        }
        if (all_zero) return word >> 15;

        // Berlekamp-Massey for the error locator sigma(x), degree <= 3.
        std::vector<std::uint8_t> sigma{1}, prev{1};
        std::size_t length = 0, gap = 1;
        std::uint8_t prev_delta = 1;
        for (int step = 0; step < 6; ++step) {
            std::uint8_t delta = synd[static_cast<std::size_t>(step + 1)];
            for (std::size_t i = 1; i <= length && i < sigma.size(); ++i)
                delta ^= field.mul(sigma[i], synd[static_cast<std::size_t>(step + 1) - i]);
            if (delta == 0) {
                ++gap;
                continue;
            }
            const std::vector<std::uint8_t> saved = sigma;
            const std::uint8_t coeff = field.mul(delta, field.inv(prev_delta));
            if (sigma.size() < prev.size() + gap) sigma.resize(prev.size() + gap, 0);
            for (std::size_t i = 0; i < prev.size(); ++i) sigma[i + gap] ^= field.mul(coeff, prev[i]);
            if (2 * length <= static_cast<std::size_t>(step)) {
                length = static_cast<std::size_t>(step) + 1 - length;
                prev = saved;
                prev_delta = delta;
                gap = 1;
            } else {
                ++gap;
            }
        }
        while (!sigma.empty() && sigma.back() == 0) sigma.pop_back();
        const std::size_t degree = sigma.size() - 1;
        if (degree == 0 || degree > 3 || degree != length) return std::nullopt;

        // Chien search: an error sits at coefficient q iff sigma(alpha^-q) = 0.
        std::uint64_t flips = 0;
        std::size_t roots = 0;
        for (int q = 0; q < 31; ++q) {
            std::uint8_t value = 0;
            for (std::size_t i = 0; i < sigma.size(); ++i)
                value ^= field.mul(sigma[i], field.pow_alpha(-q * static_cast<int>(i)));
            if (value == 0) {
                flips |= std::uint64_t{1} << q;
                ++roots;
            }
        }
        if (roots != degree) return std::nullopt;

        const std::uint64_t corrected = word ^ flips;
        for (int i = 1; i <= 6; ++i)
            if (eval_syndrome(corrected, i) != 0) return std::nullopt;
        return corrected >> 15;
    }

private:
    static std::uint8_t eval_syndrome(std::uint64_t word, int power) {
        const auto& field = Gf32::instance();
        std::uint8_t s = 0;
        for (int q = 0; q < 31; ++q)
            if ((word >> q) & 1) s ^= field.pow_alpha(power * q);
        return s;
    }

    // Minimal polynomial over GF(2) of the alpha powers in one cyclotomic
    // coset, computed as prod (x + alpha^j) with GF(32) coefficients.
    static std::uint32_t minimal_poly(const std::vector<int>& coset) {
        const auto& field = Gf32::instance();
        std::vector<std::uint8_t> poly{1};
        for (int j : coset) {
            std::vector<std::uint8_t> next(poly.size() + 1, 0);
            const std::uint8_t root = field.pow_alpha(j);
            for (std::size_t i = 0; i < poly.size(); ++i) {
                next[i + 1] ^= poly[i];
                next[i] ^= field.mul(poly[i], root);
            }
            poly = std::move(next);
        }
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            if (poly[i] > 1) throw DomainError("Bch31Code: minimal polynomial not binary");
            if (poly[i]) mask |= 1u << i;
        }
        return mask;
    }

    static std::uint32_t gf2_poly_mul(std::uint32_t a, std::uint32_t b) {
        std::uint32_t r = 0;
        for (int i = 0; i < 32; ++i)
            if ((a >> i) & 1) r ^= b << i;
        return r;
    }

    std::uint64_t poly_mod(std::uint64_t value) const {
        for (int q = 30; q >= 15; --q)
            if ((value >> q) & 1) value ^= static_cast<std::uint64_t>(gen_) << (q - 15);
        return value;
    }

    std::uint32_t gen_ = 0;
};

} // namespace detail

// A binary linear block code with systematic encoding and bounded-distance
// decoding: words within Hamming distance e = (d-1)/2 of a codeword decode
// to that codeword's message, anything farther is a decode failure.
class Code {
public:
    explicit Code(std::shared_ptr<const detail::CodeImpl> impl) : impl_(std::move(impl)) {}

    const std::string& name() const { return impl_->name(); }
    std::size_t n() const { return impl_->n(); }
    std::size_t k() const { return impl_->k(); }
    std::size_t d() const { return impl_->d(); }
    std::size_t e() const { return impl_->e(); }

    BitString encode(const BitString& message) const {
        if (message.size() != k()) throw LengthMismatch("Code::encode: message length != k");
        return BitString::from_uint(impl_->encode_word(message.to_uint()), n());
    }

    std::optional<BitString> decode(const BitString& word) const {
        if (word.size() != n()) throw LengthMismatch("Code::decode: word length != n");
        const auto msg = impl_->decode_word(word.to_uint());
        if (!msg) return std::nullopt;
        return BitString::from_uint(*msg, k());
    }

    std::uint64_t encode_word(std::uint64_t msg) const { return impl_->encode_word(msg); }

private:
    std::shared_ptr<const detail::CodeImpl> impl_;
};

// Builds a code from its registry id: "bch-31-16-7", "hamming-7-4-3" or
// "repetition-N" with 2 <= N <= 15.
inline Code make_code(const std::string& id) {
    if (id == "bch-31-16-7") return Code(std::make_shared<detail::Bch31Code>());
    if (id == "hamming-7-4-3") {
        const std::vector<std::uint64_t> parity_rows{0b110, 0b101, 0b011, 0b111};
        return Code(std::make_shared<detail::TableCode>(id, 7, 4, 3, parity_rows));
    }
    if (id.rfind("repetition-", 0) == 0) {
        std::size_t n = 0;
        try {
            n = static_cast<std::size_t>(std::stoul(id.substr(11)));
        } catch (const std::exception&) {
            throw UnsupportedScheme("make_code: bad repetition length in '" + id + "'");
        }
        if (n < 2 || n > 15) throw UnsupportedScheme("make_code: repetition length must be in [2,15]");
        const std::vector<std::uint64_t> parity_rows{(std::uint64_t{1} << (n - 1)) - 1};
        return Code(std::make_shared<detail::TableCode>(id, n, 1, n, parity_rows));
    }
    throw UnsupportedScheme("make_code: unknown code id '" + id + "'");
}

// Every string within the given Hamming distance of `center`.
inline std::vector<BitString> hamming_ball(const BitString& center, std::size_t radius,
                                           std::uint64_t cap = 1'000'000) {
    const std::size_t n = center.size();
    if (detail::ball_volume(n, radius) > cap) throw BallTooLarge("hamming_ball: ball exceeds cap");
    std::vector<BitString> out;
    const std::uint64_t center_word = center.to_uint();
    for (auto pattern : detail::low_weight_masks(n, radius))
        out.push_back(BitString::from_uint(center_word ^ pattern, n));
    return out;
}

struct CodeReport {
    std::size_t measured_distance = 0;
    bool distance_exhaustive = false;
    bool matches_declared = false;
    bool perfect = false;
    bool systematic_ok = false;
};

// Structural self-test: measured minimum distance (exhaustive via minimum
// nonzero codeword weight when 2^k is enumerable, sampled pairs otherwise),
// perfectness, and the systematic-prefix property.
inline CodeReport verify_code(const Code& code, Rng& rng, std::size_t samples = 100'000) {
    CodeReport report;

    report.systematic_ok = true;
    for (int trial = 0; trial < 64; ++trial) {
        const BitString msg = BitString::random(code.k(), rng);
        if (code.encode(msg).prefix(code.k()) != msg) report.systematic_ok = false;
    }

    std::size_t best = code.n() + 1;
    if (code.k() <= 20) {
        report.distance_exhaustive = true;
        for (std::uint64_t m = 1; m < (std::uint64_t{1} << code.k()); ++m) {
            const auto w = static_cast<std::size_t>(__builtin_popcountll(code.encode_word(m)));
            if (w < best) best = w;
        }
    } else {
        for (std::size_t i = 0; i < samples; ++i) {
            const std::uint64_t a = rng.below(std::uint64_t{1} << code.k());
            const std::uint64_t b = rng.below(std::uint64_t{1} << code.k());
            if (a == b) continue;
            const auto w = static_cast<std::size_t>(
                __builtin_popcountll(code.encode_word(a) ^ code.encode_word(b)));
            if (w < best) best = w;
        }
    }
    report.measured_distance = best;
    report.matches_declared = !report.distance_exhaustive || best == code.d();

    const unsigned __int128 covered =
        static_cast<unsigned __int128>(detail::ball_volume(code.n(), code.e())) << code.k();
    report.perfect = covered == (static_cast<unsigned __int128>(1) << code.n());
    return report;
}

} // namespace certdel
