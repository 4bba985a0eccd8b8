#include <doctest.h>

#include "docrebench/errors.hpp"
#include "docrebench/unicode.hpp"
#include "oracles.hpp"

using namespace docrebench;

TEST_CASE("utf8 round trip") {
    std::u32string s = U"abc বাং \U0001F600";
    CHECK(decode_utf8(encode_utf8(s)) == s);
    CHECK(char_count(encode_utf8(s)) == s.size());
    CHECK_THROWS_AS(decode_utf8("\xC3"), Error);       // truncated
    CHECK_THROWS_AS(decode_utf8("\xED\xA0\x80"), Error);  // surrogate
    CHECK_THROWS_AS(decode_utf8("\xC0\xAF"), Error);   // overlong
}

TEST_CASE("nfc composes canonical sequences") {
    CHECK(nfc("é") == "é");
    // Bengali vowel signs: 09C7+09BE -> 09CB, 09C7+09D7 -> 09CC
    CHECK(nfc("কো") == "কো");
    CHECK(nfc("শৌ") == "শৌ");
    // Hangul algorithmic composition
    CHECK(nfc(encode_utf8(U"가")) == encode_utf8(U"가"));
    CHECK(nfc(encode_utf8(U"각")) == encode_utf8(U"각"));
    // singleton decomposition re-composes to the canonical letter
    CHECK(nfc("Å") == "Å");
    // composition exclusion: Bengali RRA stays decomposed
    CHECK(nfc("ড়") == "ড়");
    // canonical reordering by combining class (220 before 230)
    CHECK(nfc("q̣́") == "q̣́");
    CHECK(nfc("q̣́") == "q̣́");
    // two marks composing in sequence
    CHECK(nfc("Ǻ") == "Ǻ");
}

TEST_CASE("nfc leaves composed text alone") {
    CHECK(nfc("hello world") == "hello world");
    CHECK(is_nfc("é"));
    CHECK_FALSE(is_nfc("é"));
}

TEST_CASE("nfc is idempotent on random mixed strings") {
    oracle::TestRng rng(2024);
    const std::vector<std::pair<char32_t, char32_t>> ranges = {
        {0x0020, 0x007E},  // ASCII
        {0x00C0, 0x024F},  // Latin with diacritics
        {0x0300, 0x036F},  // combining marks
        {0x0980, 0x09FF},  // Bengali
        {0x1100, 0x1112},  // Hangul jamo L
        {0x1161, 0x1175},  // Hangul jamo V
        {0xAC00, 0xD7A3},  // Hangul syllables
    };
    for (int it = 0; it < 500; ++it) {
        std::u32string s;
        int len = static_cast<int>(rng.uniform_int(0, 24));
        for (int i = 0; i < len; ++i) {
            auto [lo, hi] = ranges[rng.uniform_int(0, ranges.size() - 1)];
            s.push_back(static_cast<char32_t>(rng.uniform_int(lo, hi)));
        }
        std::string once = nfc(encode_utf8(s));
        CHECK(nfc(once) == once);
    }
}

TEST_CASE("split_tokens") {
    CHECK(split_tokens("a b c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_tokens("  a\t\nb  ") == std::vector<std::string>{"a", "b"});
    CHECK(split_tokens("") == std::vector<std::string>{});
    CHECK(split_tokens(" \n ") == std::vector<std::string>{});
}
