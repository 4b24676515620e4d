#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace corpusforge {

constexpr char32_t kReplacementChar = 0xFFFD;

struct DecodedChar {
    char32_t cp;      // kReplacementChar when invalid
    std::size_t len;  // bytes consumed (>= 1)
    bool valid;
};

// Decodes one UTF-8 scalar starting at text[pos]. On malformed input consumes
// exactly one byte so the caller can count invalid bytes precisely.
inline DecodedChar decode_utf8(std::string_view text, std::size_t pos) {
    const auto* s = reinterpret_cast<const unsigned char*>(text.data()) + pos;
    std::size_t remain = text.size() - pos;
    unsigned char b0 = s[0];
    if (b0 < 0x80) return {b0, 1, true};
    auto bad = DecodedChar{kReplacementChar, 1, false};
    if (b0 < 0xC2) return bad;  // continuation byte or overlong lead
    if (b0 < 0xE0) {
        if (remain < 2 || (s[1] & 0xC0) != 0x80) return bad;
        return {static_cast<char32_t>(((b0 & 0x1F) << 6) | (s[1] & 0x3F)), 2, true};
    }
    if (b0 < 0xF0) {
        if (remain < 3 || (s[1] & 0xC0) != 0x80 || (s[2] & 0xC0) != 0x80) return bad;
        char32_t cp = ((b0 & 0x0F) << 12) | ((s[1] & 0x3F) << 6) | (s[2] & 0x3F);
        if (cp < 0x800) return bad;                    // overlong
        if (cp >= 0xD800 && cp <= 0xDFFF) return bad;  // surrogate
        return {cp, 3, true};
    }
    if (b0 < 0xF5) {
        if (remain < 4 || (s[1] & 0xC0) != 0x80 || (s[2] & 0xC0) != 0x80 ||
            (s[3] & 0xC0) != 0x80)
            return bad;
        char32_t cp = ((b0 & 0x07) << 18) | ((s[1] & 0x3F) << 12) | ((s[2] & 0x3F) << 6) |
                      (s[3] & 0x3F);
        if (cp < 0x10000 || cp > 0x10FFFF) return bad;
        return {cp, 4, true};
    }
    return bad;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::size_t scalar_count(std::string_view text) {
    std::size_t n = 0, i = 0;
    while (i < text.size()) {
        i += decode_utf8(text, i).len;
        ++n;
    }
    return n;
}

// Walks scalars: fn(cp, byte_offset, byte_len). Invalid bytes appear as
// U+FFFD, one per byte.
template <typename Fn>
inline void for_each_scalar(std::string_view text, Fn&& fn) {
    std::size_t i = 0;
    while (i < text.size()) {
        DecodedChar d = decode_utf8(text, i);
        fn(d.cp, i, d.len);
        i += d.len;
    }
}

inline std::size_t count_invalid_bytes(std::string_view text) {
    std::size_t bad = 0, i = 0;
    while (i < text.size()) {
        DecodedChar d = decode_utf8(text, i);
        if (!d.valid) ++bad;
        i += d.len;
    }
    return bad;
}

// Replaces every invalid byte with U+FFFD. Valid input comes back unchanged.
inline std::string repair_utf8(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        DecodedChar d = decode_utf8(text, i);
        if (d.valid)
            out.append(text.substr(i, d.len));
        else
            append_utf8(out, kReplacementChar);
        i += d.len;
    }
    return out;
}

// ---- coarse character classification ----------------------------------
// Range tables, not full Unicode properties; precise enough for corpus
// heuristics and kept deliberately dependency-free.

inline bool is_han(char32_t c) {
    return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
           (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x20000 && c <= 0x2A6DF);
}
inline bool is_hiragana(char32_t c) { return c >= 0x3040 && c <= 0x309F; }
inline bool is_katakana(char32_t c) {
    return (c >= 0x30A0 && c <= 0x30FF) || (c >= 0x31F0 && c <= 0x31FF);
}
inline bool is_kana(char32_t c) { return is_hiragana(c) || is_katakana(c); }
inline bool is_hangul(char32_t c) {
    return (c >= 0xAC00 && c <= 0xD7AF) || (c >= 0x1100 && c <= 0x11FF) ||
           (c >= 0x3130 && c <= 0x318F);
}
inline bool is_cyrillic(char32_t c) { return c >= 0x0400 && c <= 0x052F; }
inline bool is_arabic(char32_t c) {
    return (c >= 0x0600 && c <= 0x06FF) || (c >= 0x0750 && c <= 0x077F) ||
           (c >= 0x08A0 && c <= 0x08FF) || (c >= 0xFB50 && c <= 0xFDFF) ||
           (c >= 0xFE70 && c <= 0xFEFF);
}
inline bool is_latin_letter(char32_t c) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) return true;
    if (c == 0x00D7 || c == 0x00F7) return false;  // multiplication/division signs
    return (c >= 0x00C0 && c <= 0x024F) || (c >= 0x1E00 && c <= 0x1EFF);
}

// Letter in the broad sense: the scripts above plus a few common blocks.
inline bool is_letter(char32_t c) {
    return is_latin_letter(c) || is_han(c) || is_kana(c) || is_hangul(c) ||
           is_cyrillic(c) || is_arabic(c) ||
           (c >= 0x0370 && c <= 0x03FF) ||  // Greek
           (c >= 0x0590 && c <= 0x05FF) ||  // Hebrew
           (c >= 0x0900 && c <= 0x097F) ||  // Devanagari
           (c >= 0x0E00 && c <= 0x0E7F);    // Thai
}

inline bool is_ascii_digit(char32_t c) { return c >= '0' && c <= '9'; }
inline bool is_fullwidth_digit(char32_t c) { return c >= 0xFF10 && c <= 0xFF19; }
inline bool is_digit(char32_t c) { return is_ascii_digit(c) || is_fullwidth_digit(c); }
inline bool is_alnum(char32_t c) { return is_letter(c) || is_digit(c); }

inline bool is_whitespace(char32_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == 0x0B || c == 0x0C ||
           c == 0x00A0 || c == 0x3000 || (c >= 0x2000 && c <= 0x200A);
}

inline bool is_zero_width(char32_t c) {
    return c == 0x200B || c == 0x200C || c == 0x200D || c == 0x2060 || c == 0xFEFF;
}

// Control characters other than the structural \n and \t.
inline bool is_stray_control(char32_t c) {
    if (c == '\n' || c == '\t') return false;
    return c < 0x20 || c == 0x7F || (c >= 0x80 && c <= 0x9F);
}

inline bool is_noncharacter(char32_t c) {
    if (c >= 0xFDD0 && c <= 0xFDEF) return true;
    return (c & 0xFFFE) == 0xFFFE;  // U+xxFFFE / U+xxFFFF of every plane
}

// "Garbled" for the chapter-level quality heuristics: replacement chars,
// stray controls, and noncharacters.
inline bool is_garbled(char32_t c) {
    return c == kReplacementChar || is_stray_control(c) || is_noncharacter(c);
}

// CJK scalars tokenize one character at a time (no whitespace between words).
inline bool is_cjk(char32_t c) { return is_han(c) || is_kana(c) || is_hangul(c); }

inline bool is_terminal_punct(char32_t c) {
    return c == '.' || c == '!' || c == '?' || c == 0x3002 || c == 0xFF01 || c == 0xFF1F;
}

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string ascii_lower_copy(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_lower(c);
    return out;
}

}  // namespace corpusforge
