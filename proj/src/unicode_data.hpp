#pragma once

#include <cstddef>

namespace docrebench::unicode_data {

struct CccEntry {
    char32_t cp;
    unsigned char ccc;
};

// Canonical decomposition; second == 0 marks a singleton mapping.
struct DecompEntry {
    char32_t cp;
    char32_t first;
    char32_t second;
};

struct CompEntry {
    char32_t first;
    char32_t second;
    char32_t composed;
};

extern const CccEntry kCcc[];
extern const std::size_t kCccCount;
extern const DecompEntry kDecomp[];
extern const std::size_t kDecompCount;
extern const CompEntry kComp[];
extern const std::size_t kCompCount;

}  // namespace docrebench::unicode_data
