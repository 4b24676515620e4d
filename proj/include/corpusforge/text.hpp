#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/unicode.hpp"

namespace corpusforge {

// Word tokens: maximal runs of non-whitespace non-CJK scalars, plus each CJK
// scalar as its own token. This is the shared "whitespace-or-CJK-boundary"
// tokenization used by simhash and the cleaner's word level.
inline std::vector<std::string_view> word_tokenize(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t run_start = std::string_view::npos;
    std::size_t i = 0;
    while (i < text.size()) {
        DecodedChar d = decode_utf8(text, i);
        if (is_whitespace(d.cp) || is_cjk(d.cp)) {
            if (run_start != std::string_view::npos) {
                tokens.push_back(text.substr(run_start, i - run_start));
                run_start = std::string_view::npos;
            }
            if (is_cjk(d.cp)) tokens.push_back(text.substr(i, d.len));
        } else if (run_start == std::string_view::npos) {
            run_start = i;
        }
        i += d.len;
    }
    if (run_start != std::string_view::npos) tokens.push_back(text.substr(run_start));
    return tokens;
}

// Paragraphs are separated by blank lines. Separators are kept so documents
// can be reassembled byte-exactly.
struct ParagraphSplit {
    std::vector<std::string_view> paragraphs;
    std::vector<std::string_view> separators;  // separators[i] follows paragraphs[i]
};

inline ParagraphSplit split_paragraphs(std::string_view text) {
    ParagraphSplit out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t start = pos;
        std::size_t sep_start = std::string_view::npos;
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string_view::npos) {
                pos = text.size();
                break;
            }
            // A blank-line separator: '\n' followed by optional whitespace-only
            // line(s) and another '\n'.
            std::size_t j = nl + 1;
            while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
            if (j < text.size() && text[j] == '\n') {
                sep_start = nl;
                while (j < text.size() && text[j] == '\n') {
                    ++j;
                    std::size_t k = j;
                    while (k < text.size() && (text[k] == ' ' || text[k] == '\t')) ++k;
                    if (k < text.size() && text[k] == '\n')
                        j = k;
                    else
                        break;
                }
                pos = j;
                break;
            }
            pos = nl + 1;
        }
        if (sep_start == std::string_view::npos) {
            out.paragraphs.push_back(text.substr(start));
            out.separators.push_back(std::string_view{});
            break;
        }
        out.paragraphs.push_back(text.substr(start, sep_start - start));
        out.separators.push_back(text.substr(sep_start, pos - sep_start));
    }
    return out;
}

// One sentence as byte spans into the original text. Consecutive spans tile
// the input exactly: [begin, end) includes surrounding whitespace, while
// [text_begin, text_end) is the trimmed sentence used for fingerprinting.
struct SentenceSpan {
    std::size_t begin;
    std::size_t text_begin;
    std::size_t text_end;
    std::size_t end;

    bool empty() const { return text_begin == text_end; }
};

// A sentence ends at a terminal punctuation scalar {., !, ?, 。, ！, ？}
// followed by whitespace or end of input. A trailing fragment without
// terminal punctuation counts as a sentence too.
inline std::vector<SentenceSpan> split_sentences(std::string_view text) {
    std::vector<SentenceSpan> spans;
    std::size_t cursor = 0;
    while (cursor < text.size()) {
        std::size_t s = cursor;
        while (s < text.size()) {
            DecodedChar d = decode_utf8(text, s);
            if (!is_whitespace(d.cp)) break;
            s += d.len;
        }
        if (s >= text.size()) {
            // trailing whitespace: attach to the previous span if any
            if (!spans.empty())
                spans.back().end = text.size();
            else
                spans.push_back({cursor, text.size(), text.size(), text.size()});
            break;
        }
        std::size_t j = s;
        std::size_t sent_end = std::string_view::npos;
        while (j < text.size()) {
            DecodedChar d = decode_utf8(text, j);
            if (is_terminal_punct(d.cp)) {
                std::size_t next = j + d.len;
                if (next >= text.size() || is_whitespace(decode_utf8(text, next).cp)) {
                    sent_end = next;
                    break;
                }
            }
            j += d.len;
        }
        if (sent_end == std::string_view::npos) sent_end = text.size();
        std::size_t e = sent_end;
        while (e < text.size()) {
            DecodedChar d = decode_utf8(text, e);
            if (!is_whitespace(d.cp)) break;
            e += d.len;
        }
        spans.push_back({cursor, s, sent_end, e});
        cursor = e;
    }
    return spans;
}

// Character n-grams over Unicode scalars, emitted as byte strings.
template <typename Fn>
inline void for_each_char_ngram(std::string_view text, std::size_t n, Fn&& fn) {
    std::vector<std::size_t> offsets;
    offsets.reserve(64);
    std::size_t i = 0;
    while (i < text.size()) {
        offsets.push_back(i);
        i += decode_utf8(text, i).len;
    }
    offsets.push_back(text.size());
    if (offsets.size() <= n) return;
    for (std::size_t k = 0; k + n < offsets.size(); ++k)
        fn(text.substr(offsets[k], offsets[k + n] - offsets[k]));
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (true) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

}  // namespace corpusforge
