#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "cogload/tasks.hpp"

namespace cogload::prompt {

/// A model response split on the level's output labels.
struct SectionedResponse {
    std::map<std::string, std::string> sections;  // label -> section text
    std::string answer_plain;  // answer section, reverse-decoded if needed
    std::string unparsed_tail;  // text before the first recognized label
    std::string answer_label;  // label of the section answer_plain came from

    /// Byte offsets into the raw response, used for token accounting:
    /// answer_label_offset points at the label, answer_text_offset just
    /// past the ':' (and any following space).
    std::size_t answer_label_offset = 0;
    std::size_t answer_text_offset = 0;
};

/// Splits `raw` on the level's output labels, in order of appearance.
/// Labels match case-insensitively at line starts, tolerating leading
/// markdown bullets/numbering and optional "**" emphasis. The answer
/// section is word-reversed when the level ends with the ReverseAnswer
/// task. Errors: MissingAnswerSection, AmbiguousSections.
SectionedResponse parse_response(const std::string& raw, const LoadLevel& level);

}  // namespace cogload::prompt
