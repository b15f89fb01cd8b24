#include <doctest.h>

#include <optional>
#include <set>
#include <vector>

#include "certdel/linear_code.hpp"

using namespace certdel;

namespace {

// Test-only reference decoder, independent of the production decode paths:
// try every error pattern of weight <= radius and test codeword membership
// by re-encoding the systematic prefix.
std::optional<BitString> brute_force_decode(const Code& code, const BitString& word,
                                            std::size_t radius) {
    for (auto pattern : detail::low_weight_masks(word.size(), radius)) {
        const BitString candidate = BitString::from_uint(word.to_uint() ^ pattern, word.size());
        const BitString msg = candidate.prefix(code.k());
        if (code.encode(msg) == candidate) return msg;
    }
    return std::nullopt;
}

BitString random_weight_pattern(std::size_t n, std::size_t weight, Rng& rng) {
    BitString p(n);
    std::size_t placed = 0;
    while (placed < weight) {
        const auto pos = static_cast<std::size_t>(rng.below(n));
        if (p[pos] == 0) {
            p.set(pos, 1);
            ++placed;
        }
    }
    return p;
}

} // namespace

TEST_CASE("zero message encodes to the zero codeword") {
    for (const char* id : {"bch-31-16-7", "hamming-7-4-3", "repetition-5"}) {
        const Code code = make_code(id);
        CHECK(code.encode(BitString(code.k())).weight() == 0);
    }
}

TEST_CASE("encode is systematic and linear") {
    Rng rng(10);
    for (const char* id : {"bch-31-16-7", "hamming-7-4-3", "repetition-7"}) {
        const Code code = make_code(id);
        for (int i = 0; i < 200; ++i) {
            const BitString a = BitString::random(code.k(), rng);
            const BitString b = BitString::random(code.k(), rng);
            CHECK(code.encode(a).prefix(code.k()) == a);
            CHECK((code.encode(a) ^ code.encode(b)) == code.encode(a ^ b));
        }
    }
}

TEST_CASE("hamming(7,4,3): exhaustive pairwise distances") {
    const Code code = make_code("hamming-7-4-3");
    std::vector<BitString> codewords;
    for (std::uint64_t m = 0; m < 16; ++m) codewords.push_back(code.encode(BitString::from_uint(m, 4)));
    std::size_t min_dist = 7;
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = i + 1; j < 16; ++j)
            min_dist = std::min(min_dist, codewords[i].distance(codewords[j]));
    CHECK(min_dist == 3);
}

TEST_CASE("hamming(7,4,3): exhaustive single-error roundtrip, 16 x 8 cases") {
    const Code code = make_code("hamming-7-4-3");
    for (std::uint64_t m = 0; m < 16; ++m) {
        const BitString msg = BitString::from_uint(m, 4);
        const BitString cw = code.encode(msg);
        CHECK(code.decode(cw) == msg);
        for (std::size_t p = 0; p < 7; ++p) {
            BitString corrupted = cw;
            corrupted.flip(p);
            CHECK(code.decode(corrupted) == msg);
        }
    }
}

TEST_CASE("bch(31,16,7): exhaustive minimum codeword weight is 7") {
    const Code code = make_code("bch-31-16-7");
    std::size_t best = 31;
    for (std::uint64_t m = 1; m < (1u << 16); ++m)
        best = std::min(best, static_cast<std::size_t>(__builtin_popcountll(code.encode_word(m))));
    CHECK(best == 7);
}

TEST_CASE("bch(31,16,7): random roundtrips under weight <= 3 corruption") {
    const Code code = make_code("bch-31-16-7");
    Rng rng(20);
    for (int i = 0; i < 10000; ++i) {
        const BitString msg = BitString::random(16, rng);
        const auto weight = static_cast<std::size_t>(rng.below(4));
        const BitString word = code.encode(msg) ^ random_weight_pattern(31, weight, rng);
        CHECK(code.decode(word) == msg);
    }
}

TEST_CASE("bch(31,16,7): weight-4 corruption never yields a silent in-radius lie") {
    const Code code = make_code("bch-31-16-7");
    Rng rng(21);
    std::size_t failures = 0;
    for (int i = 0; i < 2000; ++i) {
        const BitString msg = BitString::random(16, rng);
        const BitString word = code.encode(msg) ^ random_weight_pattern(31, 4, rng);
        const auto decoded = code.decode(word);
        if (!decoded) {
            ++failures;
            continue;
        }
        // a successful decode must point at a codeword within radius e
        CHECK(*decoded != msg);
        CHECK(code.encode(*decoded).distance(word) <= 3);
    }
    CHECK(failures > 0);
}

TEST_CASE("bch decoder agrees with the brute-force reference on arbitrary words") {
    const Code code = make_code("bch-31-16-7");
    Rng rng(22);
    for (int i = 0; i < 300; ++i) {
        const BitString word = BitString::random(31, rng);
        const auto fast = code.decode(word);
        const auto reference = brute_force_decode(code, word, 3);
        CHECK(fast == reference);
    }
}

TEST_CASE("table decoder agrees with the brute-force reference on arbitrary words") {
    const Code code = make_code("hamming-7-4-3");
    Rng rng(23);
    for (std::uint64_t w = 0; w < 128; ++w) {
        const BitString word = BitString::from_uint(w, 7);
        CHECK(code.decode(word) == brute_force_decode(code, word, 1));
    }
}

TEST_CASE("repetition codes decode by bounded distance") {
    const Code rep5 = make_code("repetition-5");
    CHECK(rep5.n() == 5);
    CHECK(rep5.k() == 1);
    CHECK(rep5.e() == 2);
    BitString one(1);
    one.set(0, 1);
    CHECK(rep5.encode(one).to_string() == "11111");
    CHECK(rep5.decode(BitString::from_string("11010")) == one);
    CHECK(rep5.decode(BitString::from_string("00100")) == BitString(1));

    const Code rep4 = make_code("repetition-4");
    CHECK(rep4.e() == 1);
    // weight-2 garbage sits outside every radius-1 ball
    CHECK_FALSE(rep4.decode(BitString::from_string("1100")).has_value());
}

TEST_CASE("decode input length is validated") {
    const Code code = make_code("hamming-7-4-3");
    CHECK_THROWS_AS(code.decode(BitString::from_string("101")), LengthMismatch);
    CHECK_THROWS_AS(code.encode(BitString::from_string("10101")), LengthMismatch);
}

TEST_CASE("hamming balls: size and membership") {
    CHECK(hamming_ball(BitString::from_string("0000000"), 0).size() == 1);
    const auto ball = hamming_ball(BitString::from_string("1010101"), 1);
    CHECK(ball.size() == 8);
    for (const auto& s : ball) CHECK(s.distance(BitString::from_string("1010101")) <= 1);
    CHECK_THROWS_AS(hamming_ball(BitString(31), 3, 100), BallTooLarge);
}

TEST_CASE("hamming(7,4,3) is perfect: radius-1 balls tile the space") {
    const Code code = make_code("hamming-7-4-3");
    std::set<std::uint64_t> seen;
    for (std::uint64_t m = 0; m < 16; ++m) {
        const BitString cw = BitString::from_uint(code.encode_word(m), 7);
        for (const auto& s : hamming_ball(cw, 1)) {
            const bool inserted = seen.insert(s.to_uint()).second;
            CHECK(inserted); // disjoint
        }
    }
    CHECK(seen.size() == 128); // covering
}

TEST_CASE("verify_code reports measured structure") {
    Rng rng(30);
    const CodeReport hamming = verify_code(make_code("hamming-7-4-3"), rng);
    CHECK(hamming.measured_distance == 3);
    CHECK(hamming.distance_exhaustive);
    CHECK(hamming.matches_declared);
    CHECK(hamming.perfect);
    CHECK(hamming.systematic_ok);

    const CodeReport rep5 = verify_code(make_code("repetition-5"), rng);
    CHECK(rep5.measured_distance == 5);
    CHECK(rep5.perfect);

    const CodeReport bch = verify_code(make_code("bch-31-16-7"), rng);
    CHECK(bch.measured_distance == 7);
    CHECK(bch.distance_exhaustive);
    CHECK(bch.matches_declared);
    CHECK_FALSE(bch.perfect);
    CHECK(bch.systematic_ok);
}

TEST_CASE("unknown code ids are rejected") {
    CHECK_THROWS_AS(make_code("golay-23-12-7"), UnsupportedScheme);
    CHECK_THROWS_AS(make_code("repetition-99"), UnsupportedScheme);
    CHECK_THROWS_AS(make_code("repetition-x"), UnsupportedScheme);
}
