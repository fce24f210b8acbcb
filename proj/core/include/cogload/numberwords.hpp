#pragma once

#include <map>
#include <string>
#include <vector>

namespace cogload::numberwords {

/// English cardinal words, e.g. -20 -> "negative twenty",
/// 382 -> "three hundred eighty-two". Supports |n| < 1e9.
std::string english(long long n);

/// Two-decimal quantity in words: 204.75 -> "two hundred four point seven
/// five". Trailing zero cents are dropped (204.70 -> "... point seven",
/// 204.00 -> "two hundred four").
std::string english_decimal2(double value);

/// Word list for one language, loaded from a plain-text resource:
///     negative_prefix: <word>
///     0 <word>
///     1 <word>
///     ...
/// Lines starting with '#' are ignored.
class ForeignNumberWords {
public:
    static ForeignNumberWords parse(const std::string& content, std::string language_tag);
    static ForeignNumberWords load(const std::string& path, std::string language_tag);

    /// Word for n; negative values get the negative prefix. Throws
    /// ErrorCode::EmptyInput when |n| is outside the list.
    std::string word(long long n) const;

    long long max_value() const { return max_value_; }
    const std::string& language() const { return language_; }

private:
    std::string language_;
    std::string negative_prefix_;
    std::map<long long, std::string> words_;
    long long max_value_ = -1;
};

}  // namespace cogload::numberwords
