#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpusforge/document.hpp"
#include "corpusforge/hash.hpp"
#include "corpusforge/io.hpp"
#include "corpusforge/text.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge {

// Rank table of a language's most frequent character trigrams
// (Cavnar-Trenkle style). Built from a seed corpus, stored as a JSON map
// trigram -> rank.
struct LanguageProfile {
    std::string lang;
    std::unordered_map<std::string, int> trigram_ranks;
    int top_k = 300;
};

namespace detail {

// Trigram stream for language id: ASCII-folded, whitespace and non-letter
// runs collapsed to a single space so punctuation does not pollute ranks.
inline std::string lid_normalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool last_space = true;
    for_each_scalar(text, [&](char32_t cp, std::size_t off, std::size_t len) {
        if (is_letter(cp)) {
            if (cp < 0x80)
                out.push_back(ascii_lower(static_cast<char>(cp)));
            else
                out.append(text.substr(off, len));
            last_space = false;
        } else if (!last_space) {
            out.push_back(' ');
            last_space = true;
        }
    });
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

inline std::vector<std::pair<std::string, uint64_t>> ranked_trigrams(std::string_view text,
                                                                     std::size_t top_k) {
    std::unordered_map<std::string, uint64_t> counts;
    std::string norm = lid_normalize(text);
    for_each_char_ngram(norm, 3, [&](std::string_view g) { ++counts[std::string(g)]; });
    std::vector<std::pair<std::string, uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    return ranked;
}

enum class ScriptGroup { latin, cyrillic, arabic, han, kana, hangul, other };

inline ScriptGroup dominant_script(std::string_view text, double& purity) {
    uint64_t latin = 0, cyr = 0, arab = 0, han = 0, kana = 0, hangul = 0, other = 0;
    for_each_scalar(text, [&](char32_t cp, std::size_t, std::size_t) {
        if (!is_letter(cp)) return;
        if (is_kana(cp))
            ++kana;
        else if (is_han(cp))
            ++han;
        else if (is_hangul(cp))
            ++hangul;
        else if (is_cyrillic(cp))
            ++cyr;
        else if (is_arabic(cp))
            ++arab;
        else if (is_latin_letter(cp))
            ++latin;
        else
            ++other;
    });
    uint64_t total = latin + cyr + arab + han + kana + hangul + other;
    purity = 0.0;
    if (total == 0) return ScriptGroup::other;
    // Any kana implies Japanese even though Han usually dominates the count.
    if (kana > 0 && kana + han >= total / 2) {
        purity = static_cast<double>(kana + han) / static_cast<double>(total);
        return ScriptGroup::kana;
    }
    struct Entry {
        uint64_t n;
        ScriptGroup g;
    };
    Entry best{latin, ScriptGroup::latin};
    for (Entry e : {Entry{cyr, ScriptGroup::cyrillic}, Entry{arab, ScriptGroup::arabic},
                    Entry{han, ScriptGroup::han}, Entry{hangul, ScriptGroup::hangul},
                    Entry{other, ScriptGroup::other}})
        if (e.n > best.n) best = e;
    purity = static_cast<double>(best.n) / static_cast<double>(total);
    return best.g;
}

inline ScriptGroup profile_script(const LanguageProfile& p) {
    if (p.lang == "zh") return ScriptGroup::han;
    if (p.lang == "ja") return ScriptGroup::kana;
    if (p.lang == "ko") return ScriptGroup::hangul;
    if (p.lang == "ru" || p.lang == "uk" || p.lang == "bg" || p.lang == "sr")
        return ScriptGroup::cyrillic;
    if (p.lang == "ar" || p.lang == "fa" || p.lang == "ur") return ScriptGroup::arabic;
    return ScriptGroup::latin;
}

}  // namespace detail

inline LanguageProfile build_language_profile(std::string_view seed_text, std::string lang,
                                              int top_k = 300) {
    if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
    LanguageProfile p;
    p.lang = std::move(lang);
    p.top_k = top_k;
    auto ranked = detail::ranked_trigrams(seed_text, static_cast<std::size_t>(top_k));
    for (std::size_t i = 0; i < ranked.size(); ++i)
        p.trigram_ranks[ranked[i].first] = static_cast<int>(i);
    return p;
}

inline void save_language_profile(const LanguageProfile& p, const std::string& path) {
    // File format is a flat JSON map trigram -> rank; the language code is
    // the file stem.
    std::vector<std::pair<std::string, int>> sorted(p.trigram_ranks.begin(),
                                                    p.trigram_ranks.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [gram, rank] : sorted) j[gram] = rank;
    write_file_bytes(path, j.dump(2) + "\n");
}

inline LanguageProfile load_language_profile(const std::string& path) {
    auto j = nlohmann::json::parse(read_file_bytes(path));
    LanguageProfile p;
    p.lang = std::filesystem::path(path).stem().string();
    int max_rank = -1;
    for (const auto& [gram, rank] : j.items()) {
        p.trigram_ranks[gram] = rank.get<int>();
        max_rank = std::max(max_rank, rank.get<int>());
    }
    p.top_k = std::max(300, max_rank + 1);
    return p;
}

inline std::vector<LanguageProfile> load_language_profiles(const std::string& dir) {
    std::vector<LanguageProfile> out;
    for (const auto& path : glob_paths(dir + "/*.json")) out.push_back(load_language_profile(path));
    return out;
}

struct DetectedLanguage {
    std::string lang;
    double confidence = 0.0;
};

// Two-tier detector: a Unicode-script gate narrows the candidate profiles,
// then the Cavnar-Trenkle out-of-place measure ranks the survivors. When the
// gate pins the language by script alone (Han, kana, Hangul, or a script with
// a single bundled profile), confidence is the script purity; otherwise it is
// 1 - best_distance / worst_possible_distance. Texts under 20 scalars return
// ("und", 0).
inline DetectedLanguage detect_language(std::string_view text,
                                        const std::vector<LanguageProfile>& profiles) {
    if (profiles.empty()) throw std::invalid_argument("detect_language: no profiles");
    if (scalar_count(text) < 20) return {"und", 0.0};

    double purity = 0.0;
    detail::ScriptGroup script = detail::dominant_script(text, purity);

    std::vector<const LanguageProfile*> candidates;
    for (const auto& p : profiles)
        if (detail::profile_script(p) == script) candidates.push_back(&p);
    if (candidates.empty()) {
        for (const auto& p : profiles) candidates.push_back(&p);
        purity = 0.0;
    }
    if (candidates.size() == 1) return {candidates[0]->lang, purity};

    const std::size_t top_k = static_cast<std::size_t>(candidates[0]->top_k);
    auto text_ranks = detail::ranked_trigrams(text, top_k);
    if (text_ranks.empty()) return {"und", 0.0};

    // Worst case: every text trigram missing from the profile.
    const double worst =
        static_cast<double>(text_ranks.size()) * static_cast<double>(top_k);
    const LanguageProfile* best = nullptr;
    double best_dist = 0.0;
    for (const auto* p : candidates) {
        double dist = 0.0;
        for (std::size_t i = 0; i < text_ranks.size(); ++i) {
            auto it = p->trigram_ranks.find(text_ranks[i].first);
            if (it == p->trigram_ranks.end())
                dist += static_cast<double>(top_k);
            else
                dist += std::abs(static_cast<double>(i) - static_cast<double>(it->second));
        }
        if (!best || dist < best_dist || (dist == best_dist && p->lang < best->lang)) {
            best = p;
            best_dist = dist;
        }
    }
    return {best->lang, worst > 0 ? 1.0 - best_dist / worst : 0.0};
}

// ---- record normalization ----------------------------------------------

struct NormalizeOptions {
    double repair_budget = 0.001;  // max fraction of bytes replaced with U+FFFD
};

struct NormalizeResult {
    bool ok = false;
    Document doc;
    std::string reject_reason;  // "encoding", "empty", "bad_json", ...

    static NormalizeResult rejected(std::string reason) {
        NormalizeResult r;
        r.reject_reason = std::move(reason);
        return r;
    }
};

namespace detail {

inline std::string normalize_newlines(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

inline std::string_view strip_bom(std::string_view raw) {
    if (raw.size() >= 3 && static_cast<unsigned char>(raw[0]) == 0xEF &&
        static_cast<unsigned char>(raw[1]) == 0xBB && static_cast<unsigned char>(raw[2]) == 0xBF)
        return raw.substr(3);
    return raw;
}

}  // namespace detail

// Converts one raw record (a JSON object line or plain text bytes) into a
// canonical Document: BOM stripped, line endings folded to '\n', UTF-8
// repaired within the budget, id synthesized as
// <source>:<content hash>:<ordinal> when the record carries none.
inline NormalizeResult normalize_record(std::string_view raw, const std::string& source,
                                        const NormalizeOptions& opts = {}, uint64_t ordinal = 0) {
    std::string_view body = detail::strip_bom(raw);

    Document d;
    d.source = source;
    std::string content;

    // JSON record sniffing: an object with a "content" key is a structured
    // record; anything else is plain text ingest.
    std::string_view trimmed = body;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t'))
        trimmed.remove_prefix(1);
    if (!trimmed.empty() && trimmed.front() == '{') {
        auto parsed = nlohmann::json::parse(trimmed, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("content"))
            return NormalizeResult::rejected("bad_json");
        if (!parsed.at("content").is_string()) return NormalizeResult::rejected("bad_json");
        content = parsed.at("content").get<std::string>();
        for (const auto& [key, value] : parsed.items()) {
            if (key == "content") continue;
            if (key == "id" && value.is_string())
                d.id = value.get<std::string>();
            else if (key == "source" && value.is_string())
                d.source = value.get<std::string>();
            else if (key == "url" && value.is_string())
                d.url = value.get<std::string>();
            else if (key == "lang" && value.is_string())
                d.lang = value.get<std::string>();
            else if (key == "meta" && value.is_object())
                for (const auto& [mk, mv] : value.items())
                    d.meta[mk] = mv.is_string() ? mv.get<std::string>() : mv.dump();
            else
                d.meta["x_" + key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    } else {
        content.assign(body);
    }

    std::size_t invalid = count_invalid_bytes(content);
    if (invalid > 0) {
        if (content.empty() ||
            static_cast<double>(invalid) / static_cast<double>(content.size()) > opts.repair_budget)
            return NormalizeResult::rejected("encoding");
        content = repair_utf8(content);
    }
    content = detail::normalize_newlines(content);
    content = detail::strip_bom(content);
    if (content.empty()) return NormalizeResult::rejected("empty");

    d.content = std::move(content);
    if (d.id.empty()) {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(d.content)));
        d.id = d.source + ":" + buf + ":" + std::to_string(ordinal);
    }
    NormalizeResult r;
    r.ok = true;
    r.doc = std::move(d);
    return r;
}

}  // namespace corpusforge
