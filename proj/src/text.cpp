// Copyright 2026 The brainrel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "brainrel/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace brainrel::text {

namespace {

constexpr std::array<std::string_view, 33> kStopWords = {
    "a",    "an",   "and",   "are",  "as",   "at",   "be",    "but",   "by",
    "for",  "if",   "in",    "into", "is",   "it",   "no",    "not",   "of",
    "on",   "or",   "such",  "that", "the",  "their", "then", "there", "these",
    "they", "this", "to",    "was",  "will", "with",
};

bool is_alnum_ascii(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Porter's word is a mutable buffer; j marks the end of the stem under test.
class PorterStemmer {
public:
    explicit PorterStemmer(std::string_view w) : b_(w) {}

    std::string run() {
        if (b_.empty()) return b_;
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5a();
        step5b();
        return b_;
    }

private:
    std::string b_;

    bool cons(std::size_t i) const {
        switch (b_[i]) {
            case 'a':
            case 'e':
            case 'i':
            case 'o':
            case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of VC sequences in b_[0, len).
    int measure(std::size_t len) const {
        int m = 0;
        std::size_t i = 0;
        while (i < len && cons(i)) ++i;
        while (i < len) {
            while (i < len && !cons(i)) ++i;
            if (i >= len) break;
            while (i < len && cons(i)) ++i;
            ++m;
        }
        return m;
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_cons(std::size_t len) const {
        return len >= 2 && b_[len - 1] == b_[len - 2] && cons(len - 1);
    }

    // consonant-vowel-consonant ending, last consonant not w, x or y.
    bool cvc(std::size_t len) const {
        if (len < 3) return false;
        if (!cons(len - 1) || cons(len - 2) || !cons(len - 3)) return false;
        const char c = b_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view s) const { return b_.ends_with(s); }

    std::size_t stem_len(std::string_view suffix) const { return b_.size() - suffix.size(); }

    void replace_suffix(std::string_view suffix, std::string_view repl) {
        b_.resize(stem_len(suffix));
        b_.append(repl);
    }

    struct Rule {
        std::string_view suffix;
        std::string_view repl;
    };

    // First rule whose suffix matches decides; min_m is the stem measure bound.
    template <std::size_t N>
    void apply_longest(const std::array<Rule, N>& rules, int min_m) {
        for (const auto& r : rules) {
            if (ends(r.suffix)) {
                if (measure(stem_len(r.suffix)) > min_m) replace_suffix(r.suffix, r.repl);
                return;
            }
        }
    }

    void step1a() {
        if (ends("sses")) {
            replace_suffix("sses", "ss");
        } else if (ends("ies")) {
            replace_suffix("ies", "i");
        } else if (ends("ss")) {
        } else if (ends("s")) {
            replace_suffix("s", "");
        }
    }

    void step1b() {
        if (ends("eed")) {
            if (measure(stem_len("eed")) > 0) replace_suffix("eed", "ee");
            return;
        }
        bool removed = false;
        if (ends("ed") && has_vowel(stem_len("ed"))) {
            replace_suffix("ed", "");
            removed = true;
        } else if (ends("ing") && has_vowel(stem_len("ing"))) {
            replace_suffix("ing", "");
            removed = true;
        }
        if (!removed) return;
        if (ends("at") || ends("bl") || ends("iz")) {
            b_.push_back('e');
        } else if (double_cons(b_.size())) {
            const char c = b_.back();
            if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
        } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
            b_.push_back('e');
        }
    }

    void step1c() {
        if (ends("y") && has_vowel(stem_len("y"))) b_.back() = 'i';
    }

    void step2() {
        static constexpr std::array<Rule, 20> rules = {{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
        }};
        apply_longest(sorted(rules), 0);
    }

    void step3() {
        static constexpr std::array<Rule, 7> rules = {{
            {"icate", "ic"},
            {"ative", ""},
            {"alize", "al"},
            {"iciti", "ic"},
            {"ical", "ic"},
            {"ful", ""},
            {"ness", ""},
        }};
        apply_longest(sorted(rules), 0);
    }

    void step4() {
        static constexpr std::array<std::string_view, 19> suffixes = {
            "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
            "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
        };
        std::string_view best;
        for (auto s : suffixes)
            if (ends(s) && s.size() > best.size()) best = s;
        if (best.empty()) return;
        const std::size_t len = stem_len(best);
        if (measure(len) <= 1) return;
        if (best == "ion" && !(len > 0 && (b_[len - 1] == 's' || b_[len - 1] == 't'))) return;
        b_.resize(len);
    }

    void step5a() {
        if (!ends("e")) return;
        const std::size_t len = stem_len("e");
        const int m = measure(len);
        if (m > 1 || (m == 1 && !cvc(len))) b_.pop_back();
    }

    void step5b() {
        if (measure(b_.size()) > 1 && double_cons(b_.size()) && b_.back() == 'l') b_.pop_back();
    }

    // Longest suffix first so that "first match decides" equals "longest match decides".
    template <std::size_t N>
    static std::array<Rule, N> sorted(std::array<Rule, N> rules) {
        std::stable_sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
            return a.suffix.size() > b.suffix.size();
        });
        return rules;
    }
};

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() &&
            !std::all_of(cur.begin(), cur.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            out.push_back(cur);
        }
        cur.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_alnum_ascii(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::span<const std::string_view> stop_words() { return kStopWords; }

bool is_stop_word(std::string_view token) {
    return std::find(kStopWords.begin(), kStopWords.end(), token) != kStopWords.end();
}

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!is_stop_word(t)) out.push_back(t);
    return out;
}

std::string stem(std::string_view token) { return PorterStemmer(token).run(); }

std::vector<std::string> analyze(std::string_view text) {
    std::vector<std::string> terms;
    for (const auto& t : remove_stopwords(tokenize(text))) {
        auto s = stem(t);
        // A lone "s" strips to nothing.
        if (!s.empty()) terms.push_back(std::move(s));
    }
    return terms;
}

std::optional<std::string> term_of_word(std::string_view word) {
    auto terms = analyze(word);
    if (terms.empty()) return std::nullopt;
    return terms.front();
}

}  // namespace brainrel::text
