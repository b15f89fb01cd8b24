#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "certdel/common.hpp"
#include "certdel/rng.hpp"

namespace certdel {

// Fixed-length bit string. Index 0 is the first (most significant) bit in
// every textual rendering: "1011" has bit 0 = 1 and equals hex "b".
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t n) : bits_(n, 0) {}

    static BitString random(std::size_t n, Rng& rng) {
        BitString s(n);
        for (std::size_t i = 0; i < n; ++i) s.bits_[i] = static_cast<std::uint8_t>(rng.bit());
        return s;
    }

    // Parses "1011 0110" (spaces and underscores ignored).
    static BitString from_string(std::string_view text) {
        BitString s;
        s.bits_.reserve(text.size());
        for (char c : text) {
            if (c == ' ' || c == '_') continue;
            if (c != '0' && c != '1') throw FormatError("BitString: invalid character in bit literal");
            s.bits_.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return s;
    }

    // MSB-first hex, exactly nbits long; nbits must be a multiple of 4.
    static BitString from_hex(std::string_view hex, std::size_t nbits) {
        if (nbits % 4 != 0 || hex.size() != nbits / 4)
            throw FormatError("BitString: hex literal length does not match bit count");
        BitString s(nbits);
        for (std::size_t i = 0; i < hex.size(); ++i) {
            const int v = hex_nibble(hex[i]);
            for (int b = 0; b < 4; ++b) s.bits_[i * 4 + b] = static_cast<std::uint8_t>((v >> (3 - b)) & 1);
        }
        return s;
    }

    // Low nbits of value, rendered MSB-first (bit 0 = bit nbits-1 of value).
    static BitString from_uint(std::uint64_t value, std::size_t nbits) {
        if (nbits > 64) throw DomainError("BitString::from_uint: at most 64 bits");
        BitString s(nbits);
        for (std::size_t i = 0; i < nbits; ++i)
            s.bits_[i] = static_cast<std::uint8_t>((value >> (nbits - 1 - i)) & 1);
        return s;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }

    int operator[](std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, int bit) { bits_[i] = static_cast<std::uint8_t>(bit & 1); }
    void flip(std::size_t i) { bits_[i] ^= 1; }

    BitString operator^(const BitString& other) const {
        if (size() != other.size()) throw LengthMismatch("BitString: XOR of unequal lengths");
        BitString out(size());
        for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] ^ other.bits_[i];
        return out;
    }

    bool operator==(const BitString&) const = default;

    std::size_t weight() const {
        std::size_t w = 0;
        for (auto b : bits_) w += b;
        return w;
    }

    std::size_t distance(const BitString& other) const { return (*this ^ other).weight(); }

    BitString prefix(std::size_t k) const {
        if (k > size()) throw LengthMismatch("BitString::prefix: longer than string");
        BitString out(k);
        for (std::size_t i = 0; i < k; ++i) out.bits_[i] = bits_[i];
        return out;
    }

    BitString concat(const BitString& other) const {
        BitString out(size() + other.size());
        for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i];
        for (std::size_t i = 0; i < other.size(); ++i) out.bits_[size() + i] = other.bits_[i];
        return out;
    }

    std::uint64_t to_uint() const {
        if (size() > 64) throw DomainError("BitString::to_uint: at most 64 bits");
        std::uint64_t v = 0;
        for (auto b : bits_) v = (v << 1) | b;
        return v;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(size());
        for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
        return s;
    }

    std::string to_hex() const {
        if (size() % 4 != 0) throw DomainError("BitString::to_hex: bit count not a multiple of 4");
        static constexpr char digits[] = "0123456789abcdef";
        std::string s;
        s.reserve(size() / 4);
        for (std::size_t i = 0; i < size(); i += 4) {
            const int v = (bits_[i] << 3) | (bits_[i + 1] << 2) | (bits_[i + 2] << 1) | bits_[i + 3];
            s.push_back(digits[v]);
        }
        return s;
    }

private:
    static int hex_nibble(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw FormatError("BitString: invalid hex digit");
    }

    std::vector<std::uint8_t> bits_;
};

} // namespace certdel
