#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace docrebench {

/// Decodes UTF-8 into Unicode scalar values. Throws Error on malformed input.
std::u32string decode_utf8(std::string_view s);

std::string encode_utf8(std::u32string_view s);

/// Canonical composition (NFC) over scalar values.
std::u32string nfc_u32(std::u32string_view s);

/// NFC-normalizes a UTF-8 string.
std::string nfc(std::string_view utf8);

bool is_nfc(std::string_view utf8);

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t char_count(std::string_view utf8);

/// Splits on ASCII whitespace; never returns empty tokens.
std::vector<std::string> split_tokens(std::string_view utf8);

}  // namespace docrebench
