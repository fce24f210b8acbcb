#include "cogload/song.hpp"

#include "cogload/errors.hpp"
#include "cogload/text.hpp"

namespace cogload::prompt {

std::string SongStego::stego_text() const {
    return text::join(stego_lines, "\n");
}

SongStego hide_in_song(const std::string& question,
                       const std::vector<std::string>& carrier_lines) {
    auto words = text::split_words(question);
    if (words.empty()) raise(ErrorCode::EmptyInput, "empty question");
    if (carrier_lines.size() < words.size()) {
        raise(ErrorCode::CarrierTooShort,
              "carrier has " + std::to_string(carrier_lines.size()) +
                  " lines, question has " + std::to_string(words.size()) +
                  " words");
    }

    SongStego stego;
    stego.carrier_lines = carrier_lines;
    stego.hidden_question = question;
    stego.stego_lines = carrier_lines;
    for (std::size_t i = 0; i < words.size(); ++i) {
        stego.stego_lines[i] =
            text::reverse_glyphs(words[i]) + " " + carrier_lines[i];
    }
    return stego;
}

std::string extract_from_song(const std::vector<std::string>& stego_lines,
                              std::size_t word_count) {
    std::vector<std::string> words;
    words.reserve(word_count);
    for (std::size_t i = 0; i < word_count && i < stego_lines.size(); ++i) {
        auto line_words = text::split_words(stego_lines[i]);
        if (line_words.empty()) continue;
        words.push_back(text::reverse_glyphs(line_words.front()));
    }
    return text::join(words, " ");
}

std::string extract_from_song(const std::vector<std::string>& stego_lines) {
    return extract_from_song(stego_lines, stego_lines.size());
}

}  // namespace cogload::prompt
