#include "cogload/response.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "cogload/errors.hpp"
#include "cogload/text.hpp"

namespace cogload::prompt {

namespace {

struct LabelHit {
    std::string label;
    std::size_t line_offset;     // start of the matched line in raw
    std::size_t content_offset;  // just past ':' (and one space)
};

// Matches "<bullet?> <**?>label<**?> :" at the start of a line. Returns
// the position just past the colon, or nullopt.
std::optional<std::pair<std::string, std::size_t>> match_label(
    const std::string& line, const std::vector<std::string>& labels) {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    };
    skip_ws();
    // Markdown bullet or numbering.
    if (i < line.size() && (line[i] == '-' || line[i] == '*' || line[i] == '+')) {
        std::size_t j = i + 1;
        if (j < line.size() && line[j] == ' ') i = j + 1;
    } else if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
        std::size_t j = i;
        while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
        if (j < line.size() && (line[j] == '.' || line[j] == ')')) {
            ++j;
            if (j < line.size() && line[j] == ' ') i = j + 1;
        }
    }
    skip_ws();
    bool emphasized = false;
    if (line.compare(i, 2, "**") == 0) {
        emphasized = true;
        i += 2;
    }
    std::size_t word_start = i;
    while (i < line.size() &&
           (std::isalpha(static_cast<unsigned char>(line[i])) || line[i] == '_')) {
        ++i;
    }
    if (i == word_start) return std::nullopt;
    std::string word = text::to_lower(line.substr(word_start, i - word_start));
    if (emphasized && line.compare(i, 2, "**") == 0) i += 2;
    skip_ws();
    if (i >= line.size() || line[i] != ':') return std::nullopt;
    ++i;
    if (i < line.size() && line[i] == ' ') ++i;
    for (const auto& label : labels) {
        if (word == label) return std::make_pair(label, i);
    }
    return std::nullopt;
}

}  // namespace

SectionedResponse parse_response(const std::string& raw, const LoadLevel& level) {
    const std::vector<std::string> labels = level.output_labels();

    std::vector<LabelHit> hits;
    std::size_t line_start = 0;
    bool at_end = false;
    while (!at_end) {
        std::size_t line_end = raw.find('\n', line_start);
        if (line_end == std::string::npos) {
            line_end = raw.size();
            at_end = true;
        }
        std::string line = raw.substr(line_start, line_end - line_start);
        if (auto hit = match_label(line, labels)) {
            for (const auto& seen : hits) {
                if (seen.label == hit->first) {
                    raise(ErrorCode::AmbiguousSections,
                          "label appears twice: " + hit->first);
                }
            }
            hits.push_back({hit->first, line_start, line_start + hit->second});
        }
        line_start = line_end + 1;
    }

    SectionedResponse response;
    if (hits.empty()) {
        raise(ErrorCode::MissingAnswerSection,
              "no labeled sections found (expected '" + level.answer_label() +
                  ":')");
    }
    response.unparsed_tail = text::trim(raw.substr(0, hits.front().line_offset));

    for (std::size_t k = 0; k < hits.size(); ++k) {
        std::size_t end =
            (k + 1 < hits.size()) ? hits[k + 1].line_offset : raw.size();
        response.sections[hits[k].label] =
            text::trim(raw.substr(hits[k].content_offset,
                                  end - hits[k].content_offset));
    }

    const std::string& answer_label = level.answer_label();
    auto it = response.sections.find(answer_label);
    if (it == response.sections.end()) {
        raise(ErrorCode::MissingAnswerSection,
              "response has no '" + answer_label + ":' section");
    }
    for (const auto& hit : hits) {
        if (hit.label == answer_label) {
            response.answer_label_offset = hit.line_offset;
            response.answer_text_offset = hit.content_offset;
        }
    }
    response.answer_label = answer_label;
    response.answer_plain = level.ends_with_reverse_answer()
                                ? text::reverse_words(it->second)
                                : it->second;
    return response;
}

}  // namespace cogload::prompt
