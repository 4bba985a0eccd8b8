#!/usr/bin/env python3
"""Regenerate src/unicode_data.cpp from the Unicode Character Database.

Emits three sorted tables consumed by src/unicode.cpp:
  * nonzero canonical combining classes
  * canonical (untagged) decomposition mappings, at most two code points each
  * primary composition pairs (pairs whose NFC recomposes to the composite)

Hangul syllables are intentionally absent; they are handled algorithmically.

Usage: python3 tools/gen_unicode_tables.py > src/unicode_data.cpp
"""

import sys
import unicodedata

SURROGATE_LO, SURROGATE_HI = 0xD800, 0xDFFF


def iter_codepoints():
    for cp in range(0x110000):
        if SURROGATE_LO <= cp <= SURROGATE_HI:
            continue
        yield cp


def main():
    ccc = []
    decomp = []
    comp = []

    for cp in iter_codepoints():
        ch = chr(cp)
        k = unicodedata.combining(ch)
        if k:
            ccc.append((cp, k))
        d = unicodedata.decomposition(ch)
        if d and not d.startswith("<"):
            parts = [int(p, 16) for p in d.split()]
            if len(parts) == 1:
                decomp.append((cp, parts[0], 0))
            elif len(parts) == 2:
                decomp.append((cp, parts[0], parts[1]))
                # Primary composite iff NFC of the pair restores the composite.
                if unicodedata.normalize("NFC", chr(parts[0]) + chr(parts[1])) == ch:
                    comp.append((parts[0], parts[1], cp))
            else:
                raise AssertionError(f"canonical decomposition >2 cps at U+{cp:04X}")

    comp.sort()

    out = sys.stdout
    out.write("// Generated by tools/gen_unicode_tables.py (unicodedata "
              f"{unicodedata.unidata_version}). Do not edit by hand.\n")
    out.write('#include "unicode_data.hpp"\n\n')
    out.write("namespace docrebench::unicode_data {\n\n")

    out.write(f"const CccEntry kCcc[{len(ccc)}] = {{\n")
    for cp, k in ccc:
        out.write(f"    {{0x{cp:04X}, {k}}},\n")
    out.write("};\n")
    out.write(f"const std::size_t kCccCount = {len(ccc)};\n\n")

    out.write(f"const DecompEntry kDecomp[{len(decomp)}] = {{\n")
    for cp, a, b in decomp:
        out.write(f"    {{0x{cp:04X}, 0x{a:04X}, 0x{b:04X}}},\n")
    out.write("};\n")
    out.write(f"const std::size_t kDecompCount = {len(decomp)};\n\n")

    out.write(f"const CompEntry kComp[{len(comp)}] = {{\n")
    for a, b, cp in comp:
        out.write(f"    {{0x{a:04X}, 0x{b:04X}, 0x{cp:04X}}},\n")
    out.write("};\n")
    out.write(f"const std::size_t kCompCount = {len(comp)};\n\n")

    out.write("}  // namespace docrebench::unicode_data\n")


if __name__ == "__main__":
    main()
