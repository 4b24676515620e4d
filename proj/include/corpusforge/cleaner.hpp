#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpusforge/document.hpp"
#include "corpusforge/io.hpp"
#include "corpusforge/matcher.hpp"
#include "corpusforge/text.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge {

enum class RuleLevel { character, word, line, chapter };
enum class RuleAction { drop_doc, drop_line, remove_match, replace_match };

inline std::string_view to_string(RuleLevel l) {
    switch (l) {
        case RuleLevel::character: return "char";
        case RuleLevel::word: return "word";
        case RuleLevel::line: return "line";
        case RuleLevel::chapter: return "chapter";
    }
    return "?";
}

inline RuleLevel rule_level_from_string(std::string_view s) {
    if (s == "char") return RuleLevel::character;
    if (s == "word") return RuleLevel::word;
    if (s == "line") return RuleLevel::line;
    if (s == "chapter") return RuleLevel::chapter;
    throw std::invalid_argument("unknown rule level: " + std::string(s));
}

inline std::string_view to_string(RuleAction a) {
    switch (a) {
        case RuleAction::drop_doc: return "drop_doc";
        case RuleAction::drop_line: return "drop_line";
        case RuleAction::remove_match: return "remove_match";
        case RuleAction::replace_match: return "replace_match";
    }
    return "?";
}

inline RuleAction rule_action_from_string(std::string_view s) {
    if (s == "drop_doc") return RuleAction::drop_doc;
    if (s == "drop_line") return RuleAction::drop_line;
    if (s == "remove_match") return RuleAction::remove_match;
    if (s == "replace_match") return RuleAction::replace_match;
    throw std::invalid_argument("unknown rule action: " + std::string(s));
}

// Declarative cleaning rule. The rule kind is taken from params["kind"] when
// present, else from the id, so one kind can be instantiated several times
// with different parameters.
struct CleanRule {
    std::string id;
    RuleLevel level;
    std::set<std::string> applies_to;  // empty = all sources
    RuleAction action = RuleAction::remove_match;
    nlohmann::json params = nlohmann::json::object();

    std::string kind() const {
        if (params.is_object() && params.contains("kind")) return params.at("kind").get<std::string>();
        return id;
    }
    bool applies(const std::string& source) const {
        return applies_to.empty() || applies_to.count(source) > 0;
    }
};

struct CleanOutcome {
    enum class Verdict { kept, dropped };
    Verdict verdict = Verdict::kept;
    std::optional<Document> doc;                       // present iff kept
    std::vector<std::pair<std::string, int>> fired;    // (rule id, count)
    std::optional<std::string> drop_reason;            // rule id when dropped

    bool kept() const { return verdict == Verdict::kept; }
};

namespace detail {

struct CompiledRule {
    CleanRule decl;
    // lexicon kinds
    std::shared_ptr<PatternAutomaton> automaton;
    std::vector<bool> alphabetic;  // per pattern: boundary-gated
    // numeric parameters
    double threshold = 0.0;
    int int_param = 0;
    std::string replacement;
};

inline bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool pattern_is_alphabetic(std::string_view p) {
    for (char c : p) {
        unsigned char u = static_cast<unsigned char>(c);
        bool letter = (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
        if (!letter && c != ' ' && c != '\'' && c != '-') return false;
    }
    return true;
}

// Collects [begin,end) spans of lexicon matches, boundary-gated for
// alphabetic patterns.
inline std::vector<std::pair<std::size_t, std::size_t>> lexicon_spans(const CompiledRule& r,
                                                                      std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    r.automaton->scan(text, [&](uint32_t p, uint64_t end_off) {
        std::size_t end = static_cast<std::size_t>(end_off);
        std::size_t begin = end - r.automaton->pattern(p).size();
        if (r.alphabetic[p]) {
            if (begin > 0 && is_word_byte(static_cast<unsigned char>(text[begin - 1]))) return;
            if (end < text.size() && is_word_byte(static_cast<unsigned char>(text[end]))) return;
        }
        spans.emplace_back(begin, end);
    });
    std::sort(spans.begin(), spans.end());
    return spans;
}

inline std::string remove_spans(std::string_view text,
                                const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                                const std::string& replacement, int& removed) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    for (auto [b, e] : spans) {
        if (b < pos) continue;  // overlap already covered
        out.append(text.substr(pos, b - pos));
        out.append(replacement);
        pos = e;
        ++removed;
    }
    out.append(text.substr(pos));
    return out;
}

}  // namespace detail

// Validated, executable form of an ordered rule list. Immutable and
// shareable across threads.
class CompiledRuleSet {
public:
    explicit CompiledRuleSet(std::vector<CleanRule> rules) {
        for (auto& rule : rules) compile_one(std::move(rule));
    }

    const std::vector<detail::CompiledRule>& rules() const { return rules_; }

private:
    void compile_one(CleanRule rule) {
        using detail::CompiledRule;
        static const std::set<std::string> kChar = {"strip_zero_width", "strip_control",
                                                    "collapse_runs"};
        static const std::set<std::string> kWord = {"ad_trigger"};
        static const std::set<std::string> kLine = {"symbol_ratio", "short_punct_line",
                                                    "lexicon_line"};
        static const std::set<std::string> kChapter = {"garbled_ratio", "mean_line_length",
                                                       "alpha_fraction", "min_length"};
        const std::string kind = rule.kind();
        switch (rule.level) {
            case RuleLevel::character:
            case RuleLevel::word:
                if (rule.action != RuleAction::remove_match && rule.action != RuleAction::replace_match)
                    throw std::invalid_argument("rule " + rule.id +
                                                ": char/word rules must remove or replace");
                break;
            case RuleLevel::line:
                if (rule.action != RuleAction::drop_line)
                    throw std::invalid_argument("rule " + rule.id + ": line rules must drop_line");
                break;
            case RuleLevel::chapter:
                if (rule.action != RuleAction::drop_doc)
                    throw std::invalid_argument("rule " + rule.id + ": chapter rules must drop_doc");
                break;
        }
        auto known = [&](const std::set<std::string>& s) { return s.count(kind) > 0; };
        bool ok = (rule.level == RuleLevel::character && known(kChar)) ||
                  (rule.level == RuleLevel::word && known(kWord)) ||
                  (rule.level == RuleLevel::line && known(kLine)) ||
                  (rule.level == RuleLevel::chapter && known(kChapter));
        if (!ok)
            throw std::invalid_argument("rule " + rule.id + ": unknown kind '" + kind +
                                        "' for level " + std::string(to_string(rule.level)));

        CompiledRule c;
        auto num = [&](const char* key, double fallback) {
            return rule.params.is_object() && rule.params.contains(key)
                       ? rule.params.at(key).get<double>()
                       : fallback;
        };
        if (kind == "collapse_runs") {
            c.int_param = static_cast<int>(num("max_run", 10));
            if (c.int_param < 1) throw std::invalid_argument("rule " + rule.id + ": max_run < 1");
        } else if (kind == "symbol_ratio") {
            c.threshold = num("max", 0.5);
        } else if (kind == "short_punct_line") {
            c.int_param = static_cast<int>(num("min_len", 3));
        } else if (kind == "garbled_ratio") {
            c.threshold = num("max", 0.3);
        } else if (kind == "mean_line_length") {
            c.threshold = num("min", 5.0);
        } else if (kind == "alpha_fraction") {
            c.threshold = num("min", 0.6);
        } else if (kind == "min_length") {
            c.int_param = static_cast<int>(num("min", 50));
        } else if (kind == "ad_trigger" || kind == "lexicon_line") {
            std::vector<std::string> patterns;
            if (rule.params.contains("lexicon"))
                for (const auto& p : rule.params.at("lexicon"))
                    patterns.push_back(p.get<std::string>());
            if (rule.params.contains("lexicon_file"))
                for_each_line(read_file_bytes(rule.params.at("lexicon_file").get<std::string>()),
                              [&](std::string_view line) {
                                  if (!line.empty() && line.front() != '#')
                                      patterns.emplace_back(line);
                              });
            if (patterns.empty())
                throw std::invalid_argument("rule " + rule.id + ": empty lexicon");
            c.automaton = std::make_shared<PatternAutomaton>();
            for (const auto& p : patterns) {
                c.automaton->add_pattern(p);
                c.alphabetic.push_back(detail::pattern_is_alphabetic(p));
            }
            c.automaton->build();
            if (rule.action == RuleAction::replace_match)
                c.replacement = rule.params.contains("replacement")
                                    ? rule.params.at("replacement").get<std::string>()
                                    : " ";
        }
        c.decl = std::move(rule);
        rules_.push_back(std::move(c));
    }

    std::vector<detail::CompiledRule> rules_;
};

namespace detail {

inline std::string apply_char_rule(const CompiledRule& r, std::string_view text, int& fired) {
    const std::string kind = r.decl.kind();
    std::string out;
    out.reserve(text.size());
    if (kind == "collapse_runs") {
        char32_t prev = 0xFFFFFFFF;
        int run = 0;
        for_each_scalar(text, [&](char32_t cp, std::size_t off, std::size_t len) {
            run = (cp == prev) ? run + 1 : 1;
            prev = cp;
            if (run <= r.int_param)
                out.append(text.substr(off, len));
            else if (run == r.int_param + 1)
                ++fired;  // one fire per collapsed run
        });
        return out;
    }
    for_each_scalar(text, [&](char32_t cp, std::size_t off, std::size_t len) {
        bool hit = (kind == "strip_zero_width") ? is_zero_width(cp) : is_stray_control(cp);
        if (hit)
            ++fired;
        else
            out.append(text.substr(off, len));
    });
    return out;
}

inline std::string apply_word_rule(const CompiledRule& r, std::string text, int& fired) {
    // Removal can create new matches at the seams; iterate to a fixpoint.
    for (int pass = 0; pass < 8; ++pass) {
        auto spans = lexicon_spans(r, text);
        if (spans.empty()) break;
        int removed = 0;
        text = remove_spans(text, spans, r.replacement, removed);
        fired += removed;
        if (r.decl.action == RuleAction::replace_match) break;  // replacement may re-match
    }
    return text;
}

inline bool line_rule_fires(const CompiledRule& r, std::string_view line) {
    const std::string kind = r.decl.kind();
    if (kind == "lexicon_line") return !lexicon_spans(r, line).empty();
    uint64_t alnum = 0, symbols = 0, scalars = 0, nonspace = 0, punct_like = 0;
    for_each_scalar(line, [&](char32_t cp, std::size_t, std::size_t) {
        ++scalars;
        if (is_whitespace(cp)) return;
        ++nonspace;
        if (is_alnum(cp))
            ++alnum;
        else {
            ++symbols;
            ++punct_like;
        }
    });
    if (kind == "symbol_ratio") {
        if (nonspace == 0) return false;
        if (alnum == 0) return symbols > 0;
        return static_cast<double>(symbols) / static_cast<double>(alnum) > r.threshold;
    }
    // short_punct_line: shorter than min_len scalars and purely punctuation
    return scalars < static_cast<uint64_t>(r.int_param) && nonspace > 0 && punct_like == nonspace;
}

inline bool chapter_rule_fires(const CompiledRule& r, std::string_view text) {
    const std::string kind = r.decl.kind();
    if (kind == "min_length") return scalar_count(text) < static_cast<std::size_t>(r.int_param);
    if (kind == "garbled_ratio") {
        uint64_t total = 0, garbled = 0;
        for_each_scalar(text, [&](char32_t cp, std::size_t, std::size_t) {
            ++total;
            if (is_garbled(cp)) ++garbled;
        });
        return total > 0 && static_cast<double>(garbled) / static_cast<double>(total) > r.threshold;
    }
    if (kind == "mean_line_length") {
        uint64_t lines = 0, chars = 0;
        for (std::string_view line : split_lines(text)) {
            std::size_t n = scalar_count(line);
            if (n == 0) continue;
            ++lines;
            chars += n;
        }
        double mean = lines ? static_cast<double>(chars) / static_cast<double>(lines) : 0.0;
        return mean < r.threshold;
    }
    // alpha_fraction: letters (Han included) over non-whitespace scalars
    uint64_t nonspace = 0, letters = 0;
    for_each_scalar(text, [&](char32_t cp, std::size_t, std::size_t) {
        if (is_whitespace(cp)) return;
        ++nonspace;
        if (is_letter(cp)) ++letters;
    });
    if (nonspace == 0) return true;
    return static_cast<double>(letters) / static_cast<double>(nonspace) < r.threshold;
}

}  // namespace detail

// Applies the rule set in the fixed level order char -> word -> line ->
// chapter; within a level, rules fire in list order. Chapter statistics are
// computed on the post-line-filtering text. A document whose content ends up
// empty is dropped regardless of rule outcome.
inline CleanOutcome apply_rules(const Document& doc, const CompiledRuleSet& ruleset) {
    CleanOutcome outcome;
    std::string text = doc.content;
    auto record = [&](const std::string& id, int count) {
        if (count > 0) outcome.fired.emplace_back(id, count);
    };

    for (const auto& r : ruleset.rules()) {
        if (r.decl.level != RuleLevel::character || !r.decl.applies(doc.source)) continue;
        int fired = 0;
        text = detail::apply_char_rule(r, text, fired);
        record(r.decl.id, fired);
    }
    for (const auto& r : ruleset.rules()) {
        if (r.decl.level != RuleLevel::word || !r.decl.applies(doc.source)) continue;
        int fired = 0;
        text = detail::apply_word_rule(r, std::move(text), fired);
        record(r.decl.id, fired);
    }
    {
        std::vector<std::string_view> lines = split_lines(text);
        std::vector<std::pair<const detail::CompiledRule*, int>> counts;
        std::string rebuilt;
        rebuilt.reserve(text.size());
        bool any_dropped = false;
        std::size_t kept = 0;
        for (std::string_view line : lines) {
            const detail::CompiledRule* dropper = nullptr;
            for (const auto& r : ruleset.rules()) {
                if (r.decl.level != RuleLevel::line || !r.decl.applies(doc.source)) continue;
                if (detail::line_rule_fires(r, line)) {
                    dropper = &r;
                    break;
                }
            }
            if (dropper) {
                any_dropped = true;
                auto it = std::find_if(counts.begin(), counts.end(),
                                       [&](const auto& p) { return p.first == dropper; });
                if (it == counts.end())
                    counts.emplace_back(dropper, 1);
                else
                    ++it->second;
            } else {
                if (kept++) rebuilt.push_back('\n');
                rebuilt.append(line);
            }
        }
        // keep the rule-list order in `fired`
        for (const auto& r : ruleset.rules()) {
            if (r.decl.level != RuleLevel::line) continue;
            for (const auto& [rule, count] : counts)
                if (rule == &r) record(r.decl.id, count);
        }
        if (any_dropped) text = std::move(rebuilt);
    }
    for (const auto& r : ruleset.rules()) {
        if (r.decl.level != RuleLevel::chapter || !r.decl.applies(doc.source)) continue;
        if (detail::chapter_rule_fires(r, text)) {
            outcome.verdict = CleanOutcome::Verdict::dropped;
            outcome.fired.emplace_back(r.decl.id, 1);
            outcome.drop_reason = r.decl.id;
            return outcome;
        }
    }
    if (text.empty()) {
        outcome.verdict = CleanOutcome::Verdict::dropped;
        outcome.drop_reason = "empty_after_cleaning";
        return outcome;
    }
    Document cleaned = doc;
    cleaned.content = std::move(text);
    outcome.doc = std::move(cleaned);
    return outcome;
}

inline CleanOutcome apply_rules(const Document& doc, const std::vector<CleanRule>& rules) {
    return apply_rules(doc, CompiledRuleSet(rules));
}

// Built-in fallback ad-trigger phrases; a real deployment points the rule at
// a lexicon file instead.
inline const std::vector<std::string>& default_ad_triggers() {
    static const std::vector<std::string> kTriggers = {
        "click here",     "buy now",           "order now",      "limited time offer",
        "free shipping",  "100% free",         "make money fast", "act now",
        "call now",       "visit our website", "subscribe now",  "best price guaranteed",
        "点击这里",        "立即购买",           "限时优惠",        "免费领取",
        "加微信",          "扫码关注",
    };
    return kTriggers;
}

inline const std::set<std::string>& default_source_taxonomy() {
    static const std::set<std::string> kSources = {"web",  "news",   "book", "encyclopedia",
                                                   "code", "qa",     "social", "academic"};
    return kSources;
}

// The bundled per-source defaults. Char-level repairs are source-independent;
// the symbol-ratio line rule is disabled for code, which legitimately runs
// symbol-heavy. All thresholds are artifact defaults surfaced in params.
inline std::vector<CleanRule> default_ruleset(const std::string& source,
                                              const std::string& ad_lexicon_file = "") {
    if (default_source_taxonomy().count(source) == 0)
        throw std::invalid_argument("unknown source category: " + source);
    std::vector<CleanRule> rules;
    auto add = [&](std::string id, RuleLevel level, RuleAction action, nlohmann::json params,
                   std::set<std::string> applies = {}) {
        rules.push_back(CleanRule{std::move(id), level, std::move(applies), action, std::move(params)});
    };
    add("strip_zero_width", RuleLevel::character, RuleAction::remove_match, {});
    add("strip_control", RuleLevel::character, RuleAction::remove_match, {});
    add("collapse_runs", RuleLevel::character, RuleAction::remove_match, {{"max_run", 10}});

    nlohmann::json ad_params;
    if (!ad_lexicon_file.empty())
        ad_params["lexicon_file"] = ad_lexicon_file;
    else
        ad_params["lexicon"] = default_ad_triggers();
    add("ad_trigger", RuleLevel::word, RuleAction::remove_match, ad_params);

    if (source != "code")
        add("symbol_ratio", RuleLevel::line, RuleAction::drop_line, {{"max", 0.5}});
    add("short_punct_line", RuleLevel::line, RuleAction::drop_line, {{"min_len", 3}});

    add("garbled_ratio", RuleLevel::chapter, RuleAction::drop_doc, {{"max", 0.3}});
    add("mean_line_length", RuleLevel::chapter, RuleAction::drop_doc, {{"min", 5}});
    add("alpha_fraction", RuleLevel::chapter, RuleAction::drop_doc, {{"min", 0.6}});
    add("min_length", RuleLevel::chapter, RuleAction::drop_doc, {{"min", 50}});
    return rules;
}

// Rule config file: JSON array of {id, level, applies_to, action, params}.
inline std::vector<CleanRule> load_rules_json(const std::string& path) {
    auto j = nlohmann::json::parse(read_file_bytes(path));
    if (!j.is_array()) throw std::invalid_argument("rule config must be a JSON array: " + path);
    std::vector<CleanRule> rules;
    for (const auto& rj : j) {
        CleanRule r;
        r.id = rj.at("id").get<std::string>();
        r.level = rule_level_from_string(rj.at("level").get<std::string>());
        r.action = rule_action_from_string(rj.at("action").get<std::string>());
        if (rj.contains("applies_to"))
            for (const auto& s : rj.at("applies_to")) r.applies_to.insert(s.get<std::string>());
        if (rj.contains("params")) r.params = rj.at("params");
        rules.push_back(std::move(r));
    }
    return rules;
}

}  // namespace corpusforge
