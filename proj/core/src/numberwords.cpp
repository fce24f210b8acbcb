#include "cogload/numberwords.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cogload/errors.hpp"
#include "cogload/text.hpp"

namespace cogload::numberwords {

namespace {

const char* kOnes[] = {"zero", "one",  "two", "three", "four",  "five",
                       "six",  "seven", "eight", "nine",  "ten",   "eleven",
                       "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
                       "seventeen", "eighteen", "nineteen"};
const char* kTens[] = {"",      "",      "twenty", "thirty", "forty",
                       "fifty", "sixty", "seventy", "eighty", "ninety"};

std::string below_hundred(long long n) {
    if (n < 20) return kOnes[n];
    std::string out = kTens[n / 10];
    if (n % 10) out += std::string("-") + kOnes[n % 10];
    return out;
}

std::string below_thousand(long long n) {
    std::string out;
    if (n >= 100) {
        out = std::string(kOnes[n / 100]) + " hundred";
        n %= 100;
        if (n) out += " " + below_hundred(n);
        return out;
    }
    return below_hundred(n);
}

}  // namespace

std::string english(long long n) {
    if (n == 0) return "zero";
    std::string out;
    unsigned long long v;
    if (n < 0) {
        out = "negative ";
        v = static_cast<unsigned long long>(-n);
    } else {
        v = static_cast<unsigned long long>(n);
    }
    if (v >= 1000000000ULL) raise(ErrorCode::ShapeError, "number out of range for words");

    std::string body;
    long long millions = static_cast<long long>(v / 1000000);
    long long thousands = static_cast<long long>((v / 1000) % 1000);
    long long rest = static_cast<long long>(v % 1000);
    if (millions) body += below_thousand(millions) + " million";
    if (thousands) {
        if (!body.empty()) body += " ";
        body += below_thousand(thousands) + " thousand";
    }
    if (rest) {
        if (!body.empty()) body += " ";
        body += below_thousand(rest);
    }
    return out + body;
}

std::string english_decimal2(double value) {
    long long cents = std::llround(value * 100.0);
    bool negative = cents < 0;
    if (negative) cents = -cents;
    long long whole = cents / 100;
    long long frac = cents % 100;

    std::string out = english(negative ? -whole : whole);
    if (negative && whole == 0 && frac != 0) out = "negative " + out;
    if (frac != 0) {
        out += " point";
        out += " " + std::string(kOnes[frac / 10]);
        if (frac % 10 != 0) out += " " + std::string(kOnes[frac % 10]);
    }
    return out;
}

ForeignNumberWords ForeignNumberWords::parse(const std::string& content,
                                             std::string language_tag) {
    ForeignNumberWords list;
    list.language_ = std::move(language_tag);
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        line = text::trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("negative_prefix:", 0) == 0) {
            list.negative_prefix_ = text::trim(line.substr(16));
            continue;
        }
        std::istringstream fields(line);
        long long n;
        if (!(fields >> n)) {
            raise(ErrorCode::IoError, "bad number-word line: " + line);
        }
        std::string word;
        std::getline(fields, word);
        word = text::trim(word);
        if (word.empty()) raise(ErrorCode::IoError, "missing word for " + std::to_string(n));
        list.words_[n] = word;
        list.max_value_ = std::max(list.max_value_, n);
    }
    if (list.words_.empty()) raise(ErrorCode::EmptyInput, "empty number-word list");
    return list;
}

ForeignNumberWords ForeignNumberWords::load(const std::string& path,
                                            std::string language_tag) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open number-word list: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), std::move(language_tag));
}

std::string ForeignNumberWords::word(long long n) const {
    long long v = n < 0 ? -n : n;
    auto it = words_.find(v);
    if (it == words_.end()) {
        raise(ErrorCode::EmptyInput,
              "no " + language_ + " word for " + std::to_string(n));
    }
    if (n < 0) {
        if (negative_prefix_.empty()) {
            raise(ErrorCode::EmptyInput, "list has no negative prefix");
        }
        return negative_prefix_ + " " + it->second;
    }
    return it->second;
}

}  // namespace cogload::numberwords
