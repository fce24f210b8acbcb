#include "cogload/prompt.hpp"

#include <random>
#include <sstream>

#include "cogload/errors.hpp"
#include "cogload/numberwords.hpp"
#include "cogload/song.hpp"
#include "cogload/templates.hpp"
#include "cogload/text.hpp"

namespace cogload::prompt {

namespace {

std::string describe_separator(const std::string& sep) {
    if (sep.empty()) return "nothing";
    std::string out;
    bool all_special = true;
    for (char c : sep) {
        if (c != ' ' && c != '\n' && c != '\t') {
            all_special = false;
            break;
        }
    }
    if (!all_special) return "the text \"" + sep + "\"";
    for (char c : sep) {
        if (!out.empty()) out += " then ";
        if (c == ' ') out += "a space";
        if (c == '\n') out += "a newline";
        if (c == '\t') out += "a tab";
    }
    return out;
}

std::string numbered_task_list(const LoadLevel& level,
                               const ObfuscationScheme& scheme) {
    std::ostringstream out;
    int n = 1;
    for (const auto& task : level.tasks) {
        std::string instruction = fill_placeholders(
            task.instruction_template,
            {{"OPEN_TAG", scheme.open_tag}, {"CLOSE_TAG", scheme.close_tag}});
        out << n++ << ". " << instruction << "\n";
    }
    std::string text = out.str();
    text.pop_back();
    return text;
}

std::string format_block(const LoadLevel& level) {
    std::ostringstream out;
    int n = 1;
    for (const auto& task : level.tasks) {
        out << task.output_label << ": <your output for task " << n++ << ">\n";
    }
    std::string text = out.str();
    text.pop_back();
    return text;
}

// Deterministic irrelevant text block for CL8/CL9/CL11: tagged scrambled
// words and number words written in reverse, seeded by (level, question).
std::string filler_block(const LoadLevel& level, const std::string& question,
                         int word_budget) {
    if (word_budget <= 0) return "";
    std::mt19937 rng(static_cast<unsigned>(
        text::fnv1a(level.label() + "\x1f" + question)));
    std::uniform_int_distribution<int> tag_digit(0, 9);
    std::uniform_int_distribution<int> number(0, 99);
    std::uniform_int_distribution<int> style(0, 2);

    const bool foreign = level.id == LevelId::CL9;
    static const numberwords::ForeignNumberWords* es_list = [] {
        static numberwords::ForeignNumberWords list =
            numberwords::ForeignNumberWords::parse(
                TemplateStore::instance().get("numbers/es"), "es");
        return &list;
    }();

    std::ostringstream out;
    int words = 0;
    while (words < word_budget) {
        int n = number(rng);
        std::string word = foreign && (words % 2 == 0)
                               ? es_list->word(n)
                               : numberwords::english(n);
        word = text::reverse_glyphs(word);
        switch (style(rng)) {
            case 0: {
                char tag = static_cast<char>('A' + tag_digit(rng));
                int idx = tag_digit(rng);
                out << '[' << tag << idx << ']' << word << "[/" << tag << idx
                    << "] ";
                break;
            }
            case 1:
                out << word << ' ';
                break;
            default:
                out << '(' << word << ") ";
                break;
        }
        ++words;
        if (words % 12 == 0) out << '\n';
    }
    out << "\n\n";
    return "Context notes (not relevant to your tasks):\n" + out.str();
}

}  // namespace

std::string AttackPrompt::fingerprint() const {
    return text::fnv1a_hex(rendered_text);
}

AttackPrompt render_prompt(const LoadLevel& level,
                           const std::string& observation_task,
                           const ObfuscationScheme& scheme,
                           const RenderOptions& options) {
    if (text::trim(observation_task).empty()) {
        raise(ErrorCode::EmptyInput, "empty observation task");
    }
    if (level.tasks.empty()) raise(ErrorCode::UnknownLevel, "level has no tasks");

    const TemplateStore& store = TemplateStore::instance();
    AttackPrompt prompt;
    prompt.level = level.id;
    prompt.level_label = level.label();
    prompt.observation_task_plain = observation_task;
    prompt.expected_labels = level.output_labels();
    prompt.obfuscation_id = scheme.id;

    if (level.family == LevelFamily::Stacked) {
        prompt.rendered_text = fill_placeholders(
            store.get("levels/stacked"),
            {{"OPEN_TAG", scheme.open_tag},
             {"CLOSE_TAG", scheme.close_tag},
             {"GLYPH_SEP_DESC", describe_separator(scheme.glyph_separator)},
             {"WORD_SEP_DESC", describe_separator(scheme.word_separator)},
             {"OBFUSCATED", obfuscate(observation_task, scheme)},
             {"TASK_LIST", numbered_task_list(level, scheme)},
             {"FORMAT_BLOCK", format_block(level)}});
        return prompt;
    }

    // Sonnet variant: the question is hidden in the carrier song. Only the
    // carrying lines are included so first-word extraction recovers exactly
    // the question.
    std::vector<std::string> carrier = options.carrier_lines;
    if (carrier.empty()) {
        carrier = text::split_lines(store.get("carrier_song"));
    }
    SongStego stego = hide_in_song(observation_task, carrier);
    std::size_t word_count = text::split_words(observation_task).size();
    std::vector<std::string> song_lines(stego.stego_lines.begin(),
                                        stego.stego_lines.begin() +
                                            static_cast<long>(word_count));

    bool wants_filler = level.id == LevelId::CL8 || level.id == LevelId::CL9 ||
                        level.id == LevelId::CL11;
    prompt.rendered_text = fill_placeholders(
        store.get("levels/sonnet"),
        {{"FILLER", wants_filler
                        ? filler_block(level, observation_task,
                                       options.input_filler_words)
                        : ""},
         {"SONG", text::join(song_lines, "\n")},
         {"TASK_LIST", numbered_task_list(level, scheme)},
         {"FORMAT_BLOCK", format_block(level)}});
    return prompt;
}

}  // namespace cogload::prompt
