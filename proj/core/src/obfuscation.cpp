#include "cogload/obfuscation.hpp"

#include "cogload/errors.hpp"
#include "cogload/text.hpp"

namespace cogload::prompt {

void ObfuscationScheme::validate() const {
    if (open_tag.empty() || close_tag.empty()) {
        raise(ErrorCode::UsageError, "obfuscation tags must be non-empty");
    }
    if (open_tag == close_tag) {
        raise(ErrorCode::UsageError, "open and close tags must differ");
    }
    if (open_tag.find(close_tag) != std::string::npos ||
        close_tag.find(open_tag) != std::string::npos) {
        raise(ErrorCode::UsageError, "one obfuscation tag contains the other");
    }
    for (const std::string* sep : {&glyph_separator, &word_separator}) {
        if (sep->find(open_tag) != std::string::npos ||
            sep->find(close_tag) != std::string::npos) {
            raise(ErrorCode::UsageError, "separator contains an obfuscation tag");
        }
    }
}

bool ObfuscationScheme::roundtrip_safe() const {
    if (word_separator.empty()) return false;
    std::string_view g = glyph_separator;
    while (!g.empty() && g.substr(0, word_separator.size()) == word_separator) {
        g.remove_prefix(word_separator.size());
    }
    return !g.empty() || glyph_separator.empty();
}

ObfuscationScheme default_scheme() { return ObfuscationScheme{}; }

ObfuscationScheme space_joined_scheme() {
    ObfuscationScheme s;
    s.id = "s-space";
    s.open_tag = "[s]";
    s.close_tag = "[/s]";
    s.glyph_separator = " ";
    s.word_separator = " ";
    return s;
}

std::string obfuscate(std::string_view plain, const ObfuscationScheme& scheme) {
    scheme.validate();
    if (text::trim(plain).empty()) {
        raise(ErrorCode::EmptyInput, "nothing to obfuscate");
    }
    if (plain.find(scheme.open_tag) != std::string::npos ||
        plain.find(scheme.close_tag) != std::string::npos) {
        raise(ErrorCode::AmbiguousEncoding,
              "text already contains an obfuscation tag");
    }

    std::string out;
    out.reserve(plain.size() * (scheme.open_tag.size() + scheme.close_tag.size() + 2));
    bool previous_was_glyph = false;
    for (const auto& glyph : text::utf8_glyphs(plain)) {
        if (glyph == " ") {
            out += scheme.word_separator;
            previous_was_glyph = false;
            continue;
        }
        if (previous_was_glyph) out += scheme.glyph_separator;
        out += scheme.open_tag;
        out += glyph;
        out += scheme.close_tag;
        previous_was_glyph = true;
    }
    return out;
}

namespace {

// Gap between two wrapped glyphs is either one glyph_separator (no space)
// or k word_separators (k spaces). Anything else is malformed.
void decode_gap(std::string_view gap, const ObfuscationScheme& scheme,
                std::string& out) {
    if (gap.empty()) return;
    if (gap == scheme.glyph_separator) return;
    while (!gap.empty()) {
        if (gap.substr(0, scheme.word_separator.size()) != scheme.word_separator) {
            raise(ErrorCode::MalformedObfuscation,
                  "unexpected text between wrapped glyphs");
        }
        gap.remove_prefix(scheme.word_separator.size());
        out += ' ';
    }
}

}  // namespace

std::string deobfuscate(std::string_view encoded, const ObfuscationScheme& scheme) {
    scheme.validate();
    if (encoded.empty()) raise(ErrorCode::EmptyInput, "nothing to decode");

    std::string out;
    size_t pos = 0;
    bool first = true;
    while (pos < encoded.size()) {
        size_t open_at = encoded.find(scheme.open_tag, pos);
        if (open_at == std::string_view::npos) {
            // Only trailing word separators may remain.
            decode_gap(encoded.substr(pos), scheme, out);
            return out;
        }
        std::string_view gap = encoded.substr(pos, open_at - pos);
        if (first && gap == scheme.glyph_separator) {
            raise(ErrorCode::MalformedObfuscation, "leading glyph separator");
        }
        decode_gap(gap, scheme, out);
        first = false;

        size_t glyph_at = open_at + scheme.open_tag.size();
        if (glyph_at >= encoded.size()) {
            raise(ErrorCode::MalformedObfuscation, "open tag at end of input");
        }
        auto glyphs = text::utf8_glyphs(encoded.substr(glyph_at, 4));
        if (glyphs.empty()) {
            raise(ErrorCode::MalformedObfuscation, "missing glyph after open tag");
        }
        const std::string& glyph = glyphs.front();
        size_t close_at = glyph_at + glyph.size();
        if (encoded.substr(close_at, scheme.close_tag.size()) != scheme.close_tag) {
            raise(ErrorCode::MalformedObfuscation,
                  "glyph not followed by close tag (expected exactly one glyph)");
        }
        out += glyph;
        pos = close_at + scheme.close_tag.size();
    }
    return out;
}

}  // namespace cogload::prompt
