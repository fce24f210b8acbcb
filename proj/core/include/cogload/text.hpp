#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cogload::text {

/// Splits UTF-8 text into glyphs (one code point each). Invalid byte
/// sequences degrade to single-byte glyphs so the split is total.
std::vector<std::string> utf8_glyphs(std::string_view s);

/// Reverses a string glyph-by-glyph ("How" -> "woH"), keeping multi-byte
/// code points intact.
std::string reverse_glyphs(std::string_view s);

/// Splits on runs of whitespace; no empty entries.
std::vector<std::string> split_words(std::string_view s);

/// Splits on '\n'; keeps empty lines, drops a single trailing newline's
/// phantom entry.
std::vector<std::string> split_lines(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Word-order reversal with single-space joining ("sugar and flour Mix"
/// -> "Mix flour and sugar").
std::string reverse_words(std::string_view s);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

/// Replaces every occurrence of `from` with `to`.
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// FNV-1a 64-bit over the bytes. Stable across runs and platforms; used
/// for prompt fingerprints and deterministic seeding, not for integrity.
std::uint64_t fnv1a(std::string_view s);
std::string fnv1a_hex(std::string_view s);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_timestamp();

}  // namespace cogload::text
