#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace cogload::metrics {

/// Byte-pair tokenizer over a merges file ("left right" per line, best
/// rank first, '#' comments allowed). Pre-tokenizes into letter runs,
/// digit runs, whitespace runs, and single punctuation bytes; merges are
/// applied inside letter/digit runs. A whitespace run is one token.
class BpeTokenizer {
public:
    static BpeTokenizer parse(const std::string& merges_content);
    static BpeTokenizer load(const std::string& path);

    std::size_t count(std::string_view text) const;
    std::vector<std::string> encode(std::string_view text) const;

    std::size_t merge_count() const { return ranks_.size(); }

private:
    std::map<std::pair<std::string, std::string>, int> ranks_;
    void merge_pretoken(std::vector<std::string>& symbols) const;
};

/// Process-wide tokenizer registry. "whitespace" is always available and
/// counts whitespace-separated words. BPE vocabularies are registered by
/// id from merges files; the first registered BPE id becomes
/// default_tokenizer() (falling back to "whitespace").
class TokenizerRegistry {
public:
    static TokenizerRegistry& instance();

    void register_bpe(const std::string& id, const std::string& merges_path);
    void register_bpe_content(const std::string& id, const std::string& content);
    bool has(const std::string& id) const;
    std::string default_tokenizer() const;

    std::size_t count(std::string_view text, const std::string& tokenizer_id) const;

private:
    std::map<std::string, std::shared_ptr<BpeTokenizer>> bpe_;
    std::string default_id_ = "whitespace";
};

/// Deterministic token count; throws UnknownTokenizer for unregistered ids.
std::size_t count_tokens(std::string_view text, const std::string& tokenizer_id);

}  // namespace cogload::metrics
