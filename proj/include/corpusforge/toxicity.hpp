#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpusforge/document.hpp"
#include "corpusforge/hash.hpp"
#include "corpusforge/io.hpp"
#include "corpusforge/matcher.hpp"
#include "corpusforge/text.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge {

struct LexiconEntry {
    std::string term;
    std::string category;  // adult, violence, privacy, illegal, medical_whitelist, ...
    double weight = 1.0;
};

struct ToxicMatch {
    std::string term;
    std::string category;
    uint64_t offset = 0;  // byte offset of the match start
    double weight = 1.0;

    bool operator==(const ToxicMatch&) const = default;
};

struct LexiconOptions {
    // Token-boundary gating applies to alphabetic-script terms only; CJK and
    // other unsegmented scripts match on raw codepoints.
    bool boundary_alphabetic = true;
};

// Sensitive-term matcher: a DFA over bytes reporting every (overlapping)
// occurrence of every term, ASCII case-insensitive. Immutable after
// compilation and shareable across threads.
class LexiconMatcher {
public:
    LexiconMatcher() = default;

    static LexiconMatcher compile(const std::vector<LexiconEntry>& entries,
                                  const LexiconOptions& options = {}) {
        if (entries.empty()) throw std::invalid_argument("compile_lexicon: no patterns");
        LexiconMatcher m;
        m.options_ = options;
        std::set<std::pair<std::string, std::string>> seen;
        for (const LexiconEntry& e : entries) {
            if (e.term.empty()) throw std::invalid_argument("compile_lexicon: empty term");
            if (!seen.emplace(e.term, e.category).second)
                throw std::invalid_argument("compile_lexicon: duplicate pattern: " + e.term +
                                            " / " + e.category);
            m.entries_.push_back(e);
            m.automaton_.add_pattern(e.term);
            m.gated_.push_back(options.boundary_alphabetic &&
                               detail::pattern_is_alphabetic(e.term));
            m.max_term_len_ = std::max(m.max_term_len_, e.term.size());
        }
        m.automaton_.build();
        return m;
    }

    const std::vector<LexiconEntry>& entries() const { return entries_; }
    const PatternAutomaton& automaton() const { return automaton_; }
    bool gated(std::size_t pattern) const { return gated_[pattern]; }
    std::size_t max_term_length() const { return max_term_len_; }

    std::vector<ToxicMatch> scan(std::string_view text) const;

private:
    std::vector<LexiconEntry> entries_;
    PatternAutomaton automaton_;
    std::vector<bool> gated_;
    std::size_t max_term_len_ = 0;
    LexiconOptions options_;
};

// Incremental scanner: feed() arbitrary chunks, finish(), then take the
// matches. Chunked scanning yields exactly the matches of a whole-document
// scan, with global byte offsets. Matches whose boundary check depends on the
// next byte are held pending across chunk edges.
class StreamScanner {
public:
    explicit StreamScanner(const LexiconMatcher& matcher)
        : matcher_(matcher), ring_(matcher.max_term_length() + 1, 0) {}

    void feed(std::string_view chunk) {
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            unsigned char b = static_cast<unsigned char>(chunk[i]);
            resolve_pending(b, false);
            matcher_.automaton().scan_resume(
                state_, chunk.substr(i, 1),
                [&](uint32_t p, uint64_t) {
                    pending_.push_back({p, pos_ + 1});
                },
                pos_);
            ring_[pos_ % ring_.size()] = b;
            ++pos_;
            if (pending_.size() > 1 && pending_.back().end != pos_) flush_resolved();
        }
    }

    std::vector<ToxicMatch> finish() {
        resolve_pending(0, true);
        std::sort(matches_.begin(), matches_.end(), [](const ToxicMatch& a, const ToxicMatch& b) {
            if (a.offset != b.offset) return a.offset < b.offset;
            if (a.term.size() != b.term.size()) return a.term.size() < b.term.size();
            return a.term < b.term;
        });
        return std::move(matches_);
    }

private:
    struct Pending {
        uint32_t pattern;
        uint64_t end;
    };

    void flush_resolved() {}  // pendings are only ever for the current position

    void resolve_pending(unsigned char next_byte, bool eos) {
        if (pending_.empty()) return;
        for (const Pending& p : pending_) accept(p, next_byte, eos);
        pending_.clear();
    }

    void accept(const Pending& p, unsigned char next_byte, bool eos) {
        const LexiconEntry& entry = matcher_.entries()[p.pattern];
        uint64_t start = p.end - entry.term.size();
        if (matcher_.gated(p.pattern)) {
            if (!eos && detail::is_word_byte(next_byte)) return;
            if (start > 0) {
                unsigned char before = ring_[(start - 1) % ring_.size()];
                if (detail::is_word_byte(before)) return;
            }
        }
        matches_.push_back({entry.term, entry.category, start, entry.weight});
    }

    const LexiconMatcher& matcher_;
    int state_ = 0;
    uint64_t pos_ = 0;
    std::vector<unsigned char> ring_;
    std::vector<Pending> pending_;
    std::vector<ToxicMatch> matches_;
};

inline std::vector<ToxicMatch> LexiconMatcher::scan(std::string_view text) const {
    StreamScanner scanner(*this);
    scanner.feed(text);
    return scanner.finish();
}

// compile_lexicon(patterns) per the module contract; weights default to 1.
inline LexiconMatcher compile_lexicon(
    const std::vector<std::pair<std::string, std::string>>& patterns,
    const LexiconOptions& options = {}) {
    std::vector<LexiconEntry> entries;
    entries.reserve(patterns.size());
    for (const auto& [term, category] : patterns) entries.push_back({term, category, 1.0});
    return LexiconMatcher::compile(entries, options);
}

// Lexicon file: TSV  term<TAB>category<TAB>weight  (weight optional, default 1).
inline std::vector<LexiconEntry> load_lexicon_tsv(const std::string& path) {
    std::vector<LexiconEntry> entries;
    for_each_line(read_file_bytes(path), [&](std::string_view line) {
        if (line.empty() || line.front() == '#') return;
        std::size_t t1 = line.find('\t');
        if (t1 == std::string_view::npos)
            throw std::invalid_argument("lexicon line missing category: " + std::string(line));
        std::size_t t2 = line.find('\t', t1 + 1);
        LexiconEntry e;
        e.term = std::string(line.substr(0, t1));
        if (t2 == std::string_view::npos) {
            e.category = std::string(line.substr(t1 + 1));
        } else {
            e.category = std::string(line.substr(t1 + 1, t2 - t1 - 1));
            e.weight = std::stod(std::string(line.substr(t2 + 1)));
        }
        entries.push_back(std::move(e));
    });
    return entries;
}

// ---- second stage: trained classifier --------------------------------------

struct FeatureSpec {
    int n_min = 3;
    int n_max = 5;
    uint32_t buckets = 1u << 18;

    bool operator==(const FeatureSpec&) const = default;
};

namespace detail {

// Hashed character n-gram term frequencies, sorted by feature id.
inline std::map<uint32_t, double> featurize(std::string_view text, const FeatureSpec& spec) {
    std::map<uint32_t, double> tf;
    for (int n = spec.n_min; n <= spec.n_max; ++n)
        for_each_char_ngram(text, static_cast<std::size_t>(n), [&](std::string_view gram) {
            tf[static_cast<uint32_t>(fnv1a64(gram) % spec.buckets)] += 1.0;
        });
    return tf;
}

inline double sigmoid(double z) {
    z = std::clamp(z, -35.0, 35.0);
    return 1.0 / (1.0 + std::exp(-z));
}

}  // namespace detail

// Linear scorer over hashed character n-grams. score() is strictly inside
// (0,1) and deterministic for a given (model, text).
struct ToxicityModel {
    FeatureSpec feature_spec;
    double bias = 0.0;
    std::map<uint32_t, double> weights;

    double score(std::string_view text) const {
        double z = bias;
        for (const auto& [f, tf] : detail::featurize(text, feature_spec)) {
            auto it = weights.find(f);
            if (it != weights.end()) z += it->second * tf;
        }
        return detail::sigmoid(z);
    }
};

// Any scorer text -> (0,1) can stand in for the bundled model.
using ToxicityScorer = std::function<double(std::string_view)>;

enum class ToxicityLabel { clean = 0, toxic = 1 };

struct TrainConfig {
    int epochs = 300;
    double learning_rate = 0.1;
    uint64_t seed = 0;  // reserved for plug-in trainers; the bundled one is
                        // deterministic without it
    FeatureSpec feature_spec;
};

// Deterministic full-batch gradient descent on logistic loss. Same data and
// config always reproduce identical weights.
inline ToxicityModel train_classifier(
    const std::vector<std::pair<std::string, ToxicityLabel>>& labeled,
    const TrainConfig& cfg = {}) {
    std::size_t toxic = 0, clean = 0;
    for (const auto& [text, label] : labeled) {
        (void)text;
        (label == ToxicityLabel::toxic ? toxic : clean) += 1;
    }
    if (toxic < 10 || clean < 10)
        throw std::invalid_argument("train_classifier: need >= 10 examples of each label");

    std::vector<std::map<uint32_t, double>> features;
    features.reserve(labeled.size());
    for (const auto& [text, label] : labeled) {
        (void)label;
        features.push_back(detail::featurize(text, cfg.feature_spec));
    }

    ToxicityModel model;
    model.feature_spec = cfg.feature_spec;
    const double inv_n = 1.0 / static_cast<double>(labeled.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::map<uint32_t, double> grad;
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            double z = model.bias;
            for (const auto& [f, tf] : features[i]) {
                auto it = model.weights.find(f);
                if (it != model.weights.end()) z += it->second * tf;
            }
            double err = detail::sigmoid(z) -
                         (labeled[i].second == ToxicityLabel::toxic ? 1.0 : 0.0);
            grad_bias += err;
            for (const auto& [f, tf] : features[i]) grad[f] += err * tf;
        }
        model.bias -= cfg.learning_rate * grad_bias * inv_n;
        for (const auto& [f, g] : grad) model.weights[f] -= cfg.learning_rate * g * inv_n;
    }
    return model;
}

// Model file: JSON {feature_spec, bias, weights} with sparse id -> value pairs.
inline void save_toxicity_model(const ToxicityModel& m, const std::string& path) {
    nlohmann::ordered_json j;
    j["feature_spec"] = {{"n_min", m.feature_spec.n_min},
                         {"n_max", m.feature_spec.n_max},
                         {"buckets", m.feature_spec.buckets}};
    j["bias"] = m.bias;
    nlohmann::ordered_json w = nlohmann::ordered_json::object();
    for (const auto& [f, v] : m.weights) w[std::to_string(f)] = v;
    j["weights"] = w;
    write_file_bytes(path, j.dump() + "\n");
}

inline ToxicityModel load_toxicity_model(const std::string& path) {
    auto j = nlohmann::json::parse(read_file_bytes(path));
    ToxicityModel m;
    m.feature_spec.n_min = j.at("feature_spec").at("n_min").get<int>();
    m.feature_spec.n_max = j.at("feature_spec").at("n_max").get<int>();
    m.feature_spec.buckets = j.at("feature_spec").at("buckets").get<uint32_t>();
    m.bias = j.at("bias").get<double>();
    for (const auto& [k, v] : j.at("weights").items())
        m.weights[static_cast<uint32_t>(std::stoul(k))] = v.get<double>();
    return m;
}

// ---- dual-stage verdict -----------------------------------------------------

struct ToxicityVerdict {
    enum class Verdict { clean, flagged_lexicon, flagged_classifier };
    Verdict verdict = Verdict::clean;
    std::vector<ToxicMatch> matches;
    std::optional<double> score;

    bool flagged() const { return verdict != Verdict::clean; }
};

struct ToxicityConfig {
    // Stage 1 flags on weighted match density: category-weighted matches per
    // 1000 characters. Long documents are not dropped for one stray term.
    double max_matches = 2.0;
    double score_threshold = 0.8;
};

inline ToxicityVerdict filter_toxic(const Document& doc, const LexiconMatcher& matcher,
                                    const ToxicityScorer& scorer, const ToxicityConfig& cfg = {}) {
    if (cfg.max_matches < 0) throw std::invalid_argument("max_matches must be >= 0");
    if (!(cfg.score_threshold > 0.0 && cfg.score_threshold < 1.0))
        throw std::invalid_argument("score_threshold must be in (0,1)");
    ToxicityVerdict v;
    v.matches = matcher.scan(doc.content);
    double weight_sum = 0.0;
    for (const ToxicMatch& m : v.matches) weight_sum += m.weight;
    double chars = static_cast<double>(std::max<std::size_t>(1, scalar_count(doc.content)));
    double density = weight_sum * 1000.0 / chars;
    if (!v.matches.empty() && density > cfg.max_matches) {
        v.verdict = ToxicityVerdict::Verdict::flagged_lexicon;
        return v;
    }
    if (scorer) {
        v.score = scorer(doc.content);
        if (*v.score >= cfg.score_threshold) {
            v.verdict = ToxicityVerdict::Verdict::flagged_classifier;
            return v;
        }
    }
    return v;
}

inline ToxicityVerdict filter_toxic(const Document& doc, const LexiconMatcher& matcher,
                                    const ToxicityModel* model, const ToxicityConfig& cfg = {}) {
    ToxicityScorer scorer;
    if (model) scorer = [model](std::string_view text) { return model->score(text); };
    return filter_toxic(doc, matcher, scorer, cfg);
}

}  // namespace corpusforge
