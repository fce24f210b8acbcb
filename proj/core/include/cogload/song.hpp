#pragma once

#include <string>
#include <vector>

namespace cogload::prompt {

/// A question hidden in a carrier song: the i-th question word, with its
/// characters reversed, is prepended to the i-th carrier line.
struct SongStego {
    std::vector<std::string> carrier_lines;
    std::string hidden_question;
    std::vector<std::string> stego_lines;

    std::string stego_text() const;  // lines joined with '\n'
};

/// Errors: EmptyInput for an empty question; CarrierTooShort when the
/// carrier has fewer lines than the question has words.
SongStego hide_in_song(const std::string& question,
                       const std::vector<std::string>& carrier_lines);

/// Inverse of hide_in_song: takes the first word of each of the first
/// `word_count` lines and reverses its characters.
std::string extract_from_song(const std::vector<std::string>& stego_lines,
                              std::size_t word_count);

/// Recovers the hidden question without knowing its length: uses every
/// line that has a first word. This is what a reader of the rendered
/// prompt (and the simulator) does.
std::string extract_from_song(const std::vector<std::string>& stego_lines);

}  // namespace cogload::prompt
