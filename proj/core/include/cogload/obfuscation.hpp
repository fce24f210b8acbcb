#pragma once

#include <string>
#include <string_view>

namespace cogload::prompt {

/// Per-glyph wrapping scheme used to hide the observation task. Every
/// non-space glyph becomes open_tag + glyph + close_tag; glyphs inside a
/// word are joined with glyph_separator and each space character is
/// rendered as one word_separator.
struct ObfuscationScheme {
    std::string id = "inst-newline";
    std::string open_tag = "[INST]";
    std::string close_tag = "[/INST]";
    std::string glyph_separator = "\n";
    std::string word_separator = " \n";

    /// Throws ErrorCode::UsageError when the tag/separator invariants do
    /// not hold (empty tags, one tag inside the other, tag inside a
    /// separator).
    void validate() const;

    /// Decoding can only distinguish word boundaries from glyph boundaries
    /// when the glyph separator is not itself a run of word separators.
    /// Schemes where they coincide still encode, but spaces are not
    /// recoverable.
    bool roundtrip_safe() const;
};

/// Canonical scheme from the run configuration defaults.
ObfuscationScheme default_scheme();

/// Space-joined variant ([s]W[/s] [s]r[/s] ...). Word boundaries collapse
/// into glyph boundaries, so it is not roundtrip safe.
ObfuscationScheme space_joined_scheme();

/// Wraps every non-space glyph of `plain` in the scheme's tags.
/// Errors: EmptyInput when plain trims to nothing; AmbiguousEncoding when
/// plain already contains one of the tags.
std::string obfuscate(std::string_view plain, const ObfuscationScheme& scheme);

/// Strict inverse of obfuscate. Errors: MalformedObfuscation on unbalanced
/// tags, glyphs longer than one code point, or gaps that match neither
/// separator.
std::string deobfuscate(std::string_view encoded, const ObfuscationScheme& scheme);

}  // namespace cogload::prompt
