#include "docrebench/unicode.hpp"

#include <algorithm>
#include <cstdint>

#include "docrebench/errors.hpp"
#include "unicode_data.hpp"

namespace docrebench {

namespace {

// Hangul syllable composition constants (Unicode ch. 3.12).
constexpr char32_t kSBase = 0xAC00;
constexpr char32_t kLBase = 0x1100;
constexpr char32_t kVBase = 0x1161;
constexpr char32_t kTBase = 0x11A7;
constexpr char32_t kLCount = 19;
constexpr char32_t kVCount = 21;
constexpr char32_t kTCount = 28;
constexpr char32_t kNCount = kVCount * kTCount;
constexpr char32_t kSCount = kLCount * kNCount;

unsigned char ccc(char32_t cp) {
    using unicode_data::kCcc;
    using unicode_data::kCccCount;
    std::size_t lo = 0, hi = kCccCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (kCcc[mid].cp < cp)
            lo = mid + 1;
        else
            hi = mid;
    }
    return (lo < kCccCount && kCcc[lo].cp == cp) ? kCcc[lo].ccc : 0;
}

const unicode_data::DecompEntry* find_decomp(char32_t cp) {
    using unicode_data::kDecomp;
    using unicode_data::kDecompCount;
    std::size_t lo = 0, hi = kDecompCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (kDecomp[mid].cp < cp)
            lo = mid + 1;
        else
            hi = mid;
    }
    return (lo < kDecompCount && kDecomp[lo].cp == cp) ? &kDecomp[lo] : nullptr;
}

char32_t compose_pair(char32_t a, char32_t b) {
    // Hangul L+V and LV+T are algorithmic.
    if (a >= kLBase && a < kLBase + kLCount && b >= kVBase && b < kVBase + kVCount)
        return kSBase + ((a - kLBase) * kVCount + (b - kVBase)) * kTCount;
    if (a >= kSBase && a < kSBase + kSCount && (a - kSBase) % kTCount == 0 &&
        b > kTBase && b < kTBase + kTCount)
        return a + (b - kTBase);

    using unicode_data::kComp;
    using unicode_data::kCompCount;
    std::size_t lo = 0, hi = kCompCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (kComp[mid].first < a || (kComp[mid].first == a && kComp[mid].second < b))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < kCompCount && kComp[lo].first == a && kComp[lo].second == b)
        return kComp[lo].composed;
    return 0;
}

void decompose_cp(char32_t cp, std::u32string& out) {
    if (cp >= kSBase && cp < kSBase + kSCount) {
        char32_t s = cp - kSBase;
        out.push_back(kLBase + s / kNCount);
        out.push_back(kVBase + (s % kNCount) / kTCount);
        if (s % kTCount != 0) out.push_back(kTBase + s % kTCount);
        return;
    }
    if (const auto* d = find_decomp(cp)) {
        decompose_cp(d->first, out);
        if (d->second != 0) decompose_cp(d->second, out);
        return;
    }
    out.push_back(cp);
}

}  // namespace

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    const auto fail = [&] { throw Error("invalid UTF-8 at byte " + std::to_string(i)); };
    while (i < s.size()) {
        auto b0 = static_cast<unsigned char>(s[i]);
        char32_t cp;
        std::size_t n;
        if (b0 < 0x80) {
            cp = b0;
            n = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            n = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            n = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            n = 4;
        } else {
            fail();
            return out;
        }
        if (i + n > s.size()) fail();
        for (std::size_t k = 1; k < n; ++k) {
            auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) fail();
            cp = (cp << 6) | (b & 0x3F);
        }
        static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < kMin[n] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail();
        out.push_back(cp);
        i += n;
    }
    return out;
}

std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::u32string nfc_u32(std::u32string_view s) {
    // 1. Full canonical decomposition.
    std::u32string buf;
    buf.reserve(s.size());
    for (char32_t cp : s) decompose_cp(cp, buf);

    // 2. Canonical ordering: stable sort runs of nonzero-ccc marks.
    for (std::size_t i = 1; i < buf.size(); ++i) {
        unsigned char cc = ccc(buf[i]);
        if (cc == 0) continue;
        std::size_t j = i;
        while (j > 0 && ccc(buf[j - 1]) > cc) {
            std::swap(buf[j - 1], buf[j]);
            --j;
        }
    }

    // 3. Canonical composition.
    std::u32string out;
    out.reserve(buf.size());
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::size_t starter = kNone;
    for (char32_t cp : buf) {
        unsigned char cc = ccc(cp);
        if (starter != kNone) {
            // Blocked unless cp directly follows the starter or the preceding
            // mark has a strictly lower combining class.
            bool adjacent = out.size() - 1 == starter;
            bool blocked = !adjacent && ccc(out.back()) >= cc;
            if (!blocked) {
                if (char32_t p = compose_pair(out[starter], cp)) {
                    out[starter] = p;
                    continue;
                }
            }
        }
        if (cc == 0) starter = out.size();
        out.push_back(cp);
    }
    return out;
}

std::string nfc(std::string_view utf8) {
    return encode_utf8(nfc_u32(decode_utf8(utf8)));
}

bool is_nfc(std::string_view utf8) {
    return nfc(utf8) == utf8;
}

std::size_t char_count(std::string_view utf8) {
    return decode_utf8(utf8).size();
}

std::vector<std::string> split_tokens(std::string_view utf8) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    while (i < utf8.size()) {
        while (i < utf8.size() && is_ws(utf8[i])) ++i;
        std::size_t j = i;
        while (j < utf8.size() && !is_ws(utf8[j])) ++j;
        if (j > i) out.emplace_back(utf8.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace docrebench
