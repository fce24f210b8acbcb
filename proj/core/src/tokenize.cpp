#include "cogload/tokenize.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include "cogload/errors.hpp"
#include "cogload/text.hpp"

namespace cogload::metrics {

namespace {

enum class RunKind { Letters, Digits, Whitespace, Other };

RunKind classify(unsigned char c) {
    if (std::isspace(c)) return RunKind::Whitespace;
    if (std::isalpha(c) || c >= 0x80) return RunKind::Letters;  // UTF-8 tails
    if (std::isdigit(c)) return RunKind::Digits;
    return RunKind::Other;
}

// Letter/digit runs get BPE merges; whitespace runs are one token each;
// every other byte stands alone.
std::vector<std::pair<std::string, RunKind>> pretokenize(std::string_view text) {
    std::vector<std::pair<std::string, RunKind>> out;
    std::size_t i = 0;
    while (i < text.size()) {
        RunKind kind = classify(static_cast<unsigned char>(text[i]));
        if (kind == RunKind::Other) {
            out.emplace_back(std::string(text.substr(i, 1)), kind);
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() &&
               classify(static_cast<unsigned char>(text[i])) == kind) {
            ++i;
        }
        out.emplace_back(std::string(text.substr(start, i - start)), kind);
    }
    return out;
}

}  // namespace

BpeTokenizer BpeTokenizer::parse(const std::string& merges_content) {
    BpeTokenizer tok;
    std::istringstream in(merges_content);
    std::string line;
    int rank = 0;
    while (std::getline(in, line)) {
        line = text::trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::size_t space = line.find(' ');
        if (space == std::string::npos || space == 0 || space + 1 >= line.size()) {
            raise(ErrorCode::IoError, "bad merge line: " + line);
        }
        tok.ranks_[{line.substr(0, space), line.substr(space + 1)}] = rank++;
    }
    return tok;
}

BpeTokenizer BpeTokenizer::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open merges file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void BpeTokenizer::merge_pretoken(std::vector<std::string>& symbols) const {
    while (symbols.size() > 1) {
        int best_rank = std::numeric_limits<int>::max();
        std::size_t best_at = 0;
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
            auto it = ranks_.find({symbols[i], symbols[i + 1]});
            if (it != ranks_.end() && it->second < best_rank) {
                best_rank = it->second;
                best_at = i;
            }
        }
        if (best_rank == std::numeric_limits<int>::max()) break;
        symbols[best_at] += symbols[best_at + 1];
        symbols.erase(symbols.begin() + static_cast<long>(best_at) + 1);
    }
}

std::vector<std::string> BpeTokenizer::encode(std::string_view text) const {
    std::vector<std::string> tokens;
    for (const auto& [run, kind] : pretokenize(text)) {
        if (kind == RunKind::Whitespace || kind == RunKind::Other) {
            tokens.push_back(run);
            continue;
        }
        std::vector<std::string> symbols;
        symbols.reserve(run.size());
        for (char c : run) symbols.emplace_back(1, c);
        merge_pretoken(symbols);
        for (auto& s : symbols) tokens.push_back(std::move(s));
    }
    return tokens;
}

std::size_t BpeTokenizer::count(std::string_view text) const {
    return encode(text).size();
}

TokenizerRegistry& TokenizerRegistry::instance() {
    static TokenizerRegistry registry;
    return registry;
}

void TokenizerRegistry::register_bpe(const std::string& id,
                                     const std::string& merges_path) {
    register_bpe_content(id, [&] {
        std::ifstream in(merges_path);
        if (!in) raise(ErrorCode::IoError, "cannot open merges file: " + merges_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }());
}

void TokenizerRegistry::register_bpe_content(const std::string& id,
                                             const std::string& content) {
    bpe_[id] = std::make_shared<BpeTokenizer>(BpeTokenizer::parse(content));
    if (default_id_ == "whitespace") default_id_ = id;
}

bool TokenizerRegistry::has(const std::string& id) const {
    return id == "whitespace" || bpe_.count(id) != 0;
}

std::string TokenizerRegistry::default_tokenizer() const { return default_id_; }

std::size_t TokenizerRegistry::count(std::string_view text,
                                     const std::string& tokenizer_id) const {
    if (tokenizer_id == "whitespace") {
        return text::split_words(text).size();
    }
    auto it = bpe_.find(tokenizer_id);
    if (it == bpe_.end()) {
        raise(ErrorCode::UnknownTokenizer, "not registered: " + tokenizer_id);
    }
    return it->second->count(text);
}

std::size_t count_tokens(std::string_view text, const std::string& tokenizer_id) {
    return TokenizerRegistry::instance().count(text, tokenizer_id);
}

}  // namespace cogload::metrics
