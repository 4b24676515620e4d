#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>

#include <nlohmann/json.hpp>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpusforge/document.hpp"
#include "corpusforge/hash.hpp"
#include "corpusforge/text.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge {

// ---- URL canonicalization ------------------------------------------------

// Canonical form: scheme and host lowercased, default port removed, fragment
// dropped, query parameters stably sorted by key, empty path normalized to
// "/". Returns nullopt for anything that does not parse as an absolute URL;
// the caller falls back to simHash-only dedup for that document.
inline std::optional<std::string> canonicalize_url(std::string_view url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
    std::string scheme = ascii_lower_copy(url.substr(0, scheme_end));
    if (!(scheme[0] >= 'a' && scheme[0] <= 'z')) return std::nullopt;
    for (char c : scheme)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.'))
            return std::nullopt;

    std::string_view rest = url.substr(scheme_end + 3);
    std::size_t frag = rest.find('#');
    if (frag != std::string_view::npos) rest = rest.substr(0, frag);

    std::size_t authority_end = rest.find_first_of("/?");
    std::string_view authority =
        authority_end == std::string_view::npos ? rest : rest.substr(0, authority_end);
    std::string_view path_query =
        authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

    std::string_view userinfo;
    std::size_t at = authority.rfind('@');
    if (at != std::string_view::npos) {
        userinfo = authority.substr(0, at + 1);
        authority = authority.substr(at + 1);
    }
    if (authority.empty()) return std::nullopt;

    // host[:port], IPv6 hosts bracketed
    std::string_view host = authority;
    std::string_view port;
    if (authority.front() == '[') {
        std::size_t close = authority.find(']');
        if (close == std::string_view::npos) return std::nullopt;
        host = authority.substr(0, close + 1);
        std::string_view tail = authority.substr(close + 1);
        if (!tail.empty()) {
            if (tail.front() != ':') return std::nullopt;
            port = tail.substr(1);
        }
    } else {
        std::size_t colon = authority.rfind(':');
        if (colon != std::string_view::npos) {
            host = authority.substr(0, colon);
            port = authority.substr(colon + 1);
        }
    }
    if (host.empty()) return std::nullopt;
    for (char c : port)
        if (c < '0' || c > '9') return std::nullopt;

    bool default_port = port.empty() || (scheme == "http" && port == "80") ||
                        (scheme == "https" && port == "443") || (scheme == "ftp" && port == "21");

    std::string_view path = path_query;
    std::string_view query;
    std::size_t qpos = path_query.find('?');
    if (qpos != std::string_view::npos) {
        path = path_query.substr(0, qpos);
        query = path_query.substr(qpos + 1);
    }

    std::string out = scheme + "://";
    out.append(userinfo);
    out += ascii_lower_copy(host);
    if (!default_port) {
        out.push_back(':');
        out.append(port);
    }
    out += path.empty() ? std::string("/") : std::string(path);

    if (!query.empty()) {
        std::vector<std::string_view> params;
        std::size_t pos = 0;
        while (pos <= query.size()) {
            std::size_t amp = query.find('&', pos);
            std::string_view param =
                amp == std::string_view::npos ? query.substr(pos) : query.substr(pos, amp - pos);
            if (!param.empty()) params.push_back(param);
            if (amp == std::string_view::npos) break;
            pos = amp + 1;
        }
        std::stable_sort(params.begin(), params.end(),
                         [](std::string_view a, std::string_view b) {
                             return a.substr(0, a.find('=')) < b.substr(0, b.find('='));
                         });
        if (!params.empty()) {
            out.push_back('?');
            for (std::size_t i = 0; i < params.size(); ++i) {
                if (i) out.push_back('&');
                out.append(params[i]);
            }
        }
    }
    return out;
}

// ---- simHash ---------------------------------------------------------------

struct SimHashSignature {
    uint64_t bits = 0;
    bool operator==(const SimHashSignature&) const = default;
};

// Word tokens (whitespace/CJK boundary) weighted by frequency; each token
// hashed to 64 bits; per-bit weighted vote; bit set iff the vote is positive.
// Empty text maps to 0.
inline SimHashSignature simhash(std::string_view text) {
    std::unordered_map<std::string_view, int64_t> freq;
    for (std::string_view tok : word_tokenize(text)) ++freq[tok];
    if (freq.empty()) return {};
    int64_t votes[64] = {};
    for (const auto& [tok, weight] : freq) {
        uint64_t h = fnv1a64(tok);
        for (int b = 0; b < 64; ++b)
            votes[b] += (h >> b) & 1 ? weight : -weight;
    }
    uint64_t bits = 0;
    for (int b = 0; b < 64; ++b)
        if (votes[b] > 0) bits |= (1ULL << b);
    return {bits};
}

inline int hamming_distance(SimHashSignature a, SimHashSignature b) {
    return std::popcount(a.bits ^ b.bits);
}

// ---- clustering ------------------------------------------------------------

struct DedupCluster {
    std::string representative;        // lexicographically smallest member
    std::vector<std::string> members;  // sorted

    bool operator==(const DedupCluster&) const = default;
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

inline std::vector<DedupCluster> clusters_from_unionfind(
    UnionFind& uf, const std::vector<std::string>& ids) {
    std::unordered_map<std::size_t, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < ids.size(); ++i) groups[uf.find(i)].push_back(ids[i]);
    std::vector<DedupCluster> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        out.push_back(DedupCluster{members.front(), std::move(members)});
    }
    std::sort(out.begin(), out.end(),
              [](const DedupCluster& a, const DedupCluster& b) {
                  return a.representative < b.representative;
              });
    return out;
}

}  // namespace detail

enum class NearDupMode { banded, exact };

// Document-level near-duplicate clustering over simHash signatures.
//
// Banded mode blocks on the four 16-bit slices of the signature: two
// signatures within Hamming distance 3 differ in at most 3 slices, so by
// pigeonhole they agree on at least one slice and land in a shared bucket
// (complete recall for k <= 3). Candidates are verified with the exact
// Hamming distance; clusters come from union-find and include singletons.
inline std::vector<DedupCluster> find_near_duplicates(
    const std::vector<std::pair<std::string, SimHashSignature>>& sigs, int k,
    NearDupMode mode = NearDupMode::banded) {
    if (mode == NearDupMode::banded && k > 3)
        throw std::invalid_argument(
            "banded simhash index guarantees recall only for k <= 3; request exact mode");
    std::vector<std::string> ids;
    ids.reserve(sigs.size());
    {
        std::unordered_map<std::string_view, int> seen;
        for (const auto& [id, sig] : sigs) {
            (void)sig;
            if (++seen[id] > 1) throw std::invalid_argument("duplicate document id: " + id);
            ids.push_back(id);
        }
    }
    detail::UnionFind uf(sigs.size());
    if (mode == NearDupMode::exact) {
        for (std::size_t i = 0; i < sigs.size(); ++i)
            for (std::size_t j = i + 1; j < sigs.size(); ++j)
                if (hamming_distance(sigs[i].second, sigs[j].second) <= k) uf.unite(i, j);
        return detail::clusters_from_unionfind(uf, ids);
    }
    for (int band = 0; band < 4; ++band) {
        std::unordered_map<uint16_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < sigs.size(); ++i) {
            uint16_t slice = static_cast<uint16_t>(sigs[i].second.bits >> (16 * band));
            buckets[slice].push_back(i);
        }
        for (const auto& [slice, members] : buckets) {
            (void)slice;
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b)
                    if (hamming_distance(sigs[members[a]].second, sigs[members[b]].second) <= k)
                        uf.unite(members[a], members[b]);
        }
    }
    return detail::clusters_from_unionfind(uf, ids);
}

// ---- paragraph-level: cosine over hashed character 3-grams -----------------

inline constexpr uint32_t kParagraphBuckets = 1u << 20;

// Sparse TF vector of character 3-grams hashed into 2^20 buckets. Dims are
// sorted by feature id so dot products are deterministic.
struct ParagraphVector {
    std::vector<std::pair<uint32_t, double>> dims;
    double norm = 0.0;
};

inline ParagraphVector paragraph_vector(std::string_view text) {
    std::unordered_map<uint32_t, double> counts;
    for_each_char_ngram(text, 3, [&](std::string_view gram) {
        ++counts[static_cast<uint32_t>(fnv1a64(gram) & (kParagraphBuckets - 1))];
    });
    ParagraphVector v;
    v.dims.assign(counts.begin(), counts.end());
    std::sort(v.dims.begin(), v.dims.end());
    double sq = 0.0;
    for (const auto& [id, tf] : v.dims) sq += tf * tf;
    v.norm = std::sqrt(sq);
    return v;
}

inline double cosine_similarity(const ParagraphVector& a, const ParagraphVector& b) {
    if (a.norm <= 0.0 || b.norm <= 0.0)
        throw std::invalid_argument("cosine_similarity: zero-norm vector");
    double dot = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.dims.size() && j < b.dims.size()) {
        if (a.dims[i].first < b.dims[j].first)
            ++i;
        else if (a.dims[i].first > b.dims[j].first)
            ++j;
        else
            dot += a.dims[i++].second * b.dims[j++].second;
    }
    return std::clamp(dot / (a.norm * b.norm), 0.0, 1.0);
}

// ---- MinHash-LSH candidate generation ---------------------------------------

inline constexpr std::size_t kMinHashFuncs = 128;
inline constexpr std::size_t kMinHashBands = 16;
inline constexpr std::size_t kMinHashRows = 8;  // 16 bands x 8 rows = 128
inline constexpr uint64_t kMinHashSeed = 0x5eed0c0ffee0d0caULL;

struct MinHashSignature {
    std::array<uint64_t, kMinHashFuncs> mins;
};

inline MinHashSignature minhash_signature(std::string_view text, uint64_t seed = kMinHashSeed) {
    MinHashSignature sig;
    sig.mins.fill(UINT64_MAX);
    std::vector<uint64_t> feature_seeds(kMinHashFuncs);
    uint64_t s = seed;
    for (auto& fs : feature_seeds) fs = s = splitmix64(s);
    for_each_char_ngram(text, 3, [&](std::string_view gram) {
        uint64_t h = fnv1a64(gram);
        for (std::size_t i = 0; i < kMinHashFuncs; ++i) {
            uint64_t v = seeded_hash(h, feature_seeds[i]);
            if (v < sig.mins[i]) sig.mins[i] = v;
        }
    });
    return sig;
}

namespace detail {

inline uint64_t band_key(const MinHashSignature& sig, std::size_t band) {
    const uint64_t* row = sig.mins.data() + band * kMinHashRows;
    return fnv1a64(std::string_view(reinterpret_cast<const char*>(row),
                                    kMinHashRows * sizeof(uint64_t)));
}

// Candidate pairs sharing at least one LSH band, as index pairs (i < j).
inline std::vector<std::pair<std::size_t, std::size_t>> lsh_candidates(
    const std::vector<MinHashSignature>& sigs) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t band = 0; band < kMinHashBands; ++band) {
        std::unordered_map<uint64_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < sigs.size(); ++i)
            buckets[band_key(sigs[i], band)].push_back(i);
        for (const auto& [key, members] : buckets) {
            (void)key;
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b)
                    pairs.emplace_back(members[a], members[b]);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

}  // namespace detail

// MinHash-LSH over character-3-gram shingles generates candidates (128
// hashes, 16 bands x 8 rows); each candidate is verified by exact cosine
// similarity >= threshold. Pairs come back sorted, each pair (smaller id,
// larger id). Paragraphs with no 3-gram features are never reported.
inline std::vector<std::pair<std::string, std::string>> paragraph_duplicates(
    const std::vector<std::pair<std::string, std::string>>& paragraphs, double threshold = 0.95,
    uint64_t seed = kMinHashSeed) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw std::invalid_argument("threshold must be in (0,1]");
    std::vector<MinHashSignature> sigs;
    std::vector<ParagraphVector> vecs;
    sigs.reserve(paragraphs.size());
    vecs.reserve(paragraphs.size());
    for (const auto& [id, text] : paragraphs) {
        (void)id;
        sigs.push_back(minhash_signature(text, seed));
        vecs.push_back(paragraph_vector(text));
    }
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [i, j] : detail::lsh_candidates(sigs)) {
        if (vecs[i].norm <= 0.0 || vecs[j].norm <= 0.0) continue;
        if (cosine_similarity(vecs[i], vecs[j]) >= threshold) {
            const std::string& a = paragraphs[i].first;
            const std::string& b = paragraphs[j].first;
            out.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---- sentence-level: prefix-suffix fingerprints -----------------------------

struct SentenceFingerprint {
    uint64_t prefix_hash = 0;
    uint64_t suffix_hash = 0;
    uint32_t len_bucket = 0;

    bool operator==(const SentenceFingerprint&) const = default;
};

struct SentenceFingerprintHash {
    std::size_t operator()(const SentenceFingerprint& f) const {
        return static_cast<std::size_t>(
            hash_combine(hash_combine(f.prefix_hash, f.suffix_hash), f.len_bucket));
    }
};

// Hashes of the first and last k scalars plus a length bucket floor(len/16).
// Sentences shorter than 2k hash the whole sentence on both sides, so equal
// sentences always collide and mid-sentence edits do not.
inline SentenceFingerprint sentence_fingerprint(std::string_view sentence, int k = 16) {
    if (k < 1) throw std::invalid_argument("sentence_fingerprint: k must be >= 1");
    std::vector<std::size_t> offsets;
    std::size_t i = 0;
    while (i < sentence.size()) {
        offsets.push_back(i);
        i += decode_utf8(sentence, i).len;
    }
    offsets.push_back(sentence.size());
    const std::size_t len = offsets.size() - 1;
    SentenceFingerprint f;
    f.len_bucket = static_cast<uint32_t>(len / 16);
    if (len < 2 * static_cast<std::size_t>(k)) {
        f.prefix_hash = f.suffix_hash = fnv1a64(sentence);
    } else {
        f.prefix_hash = fnv1a64(sentence.substr(0, offsets[static_cast<std::size_t>(k)]));
        f.suffix_hash = fnv1a64(sentence.substr(offsets[len - static_cast<std::size_t>(k)]));
    }
    return f;
}

// Corpus-wide boilerplate stripping, two passes: count() every document
// first, then strip() each one. A sentence is removed when its fingerprint
// was seen at least min_repeat times. Paragraph breaks survive; paragraphs
// whose every sentence was boilerplate disappear with their separators.
class BoilerplateStripper {
public:
    explicit BoilerplateStripper(int min_repeat = 8, int k = 16)
        : min_repeat_(min_repeat), k_(k) {
        if (min_repeat < 2) throw std::invalid_argument("min_repeat must be >= 2");
    }

    void count(std::string_view content) {
        for_each_sentence(content, [&](std::string_view sentence) {
            ++counts_[sentence_fingerprint(sentence, k_)];
        });
    }

    uint64_t removed_sentences() const { return removed_; }

    std::string strip(std::string_view content) {
        std::string out;
        out.reserve(content.size());
        ParagraphSplit split = split_paragraphs(content);
        for (std::size_t p = 0; p < split.paragraphs.size(); ++p) {
            std::string_view para = split.paragraphs[p];
            std::string kept;
            kept.reserve(para.size());
            uint64_t removed_here = 0;
            for (const SentenceSpan& span : split_sentences(para)) {
                std::string_view sentence =
                    para.substr(span.text_begin, span.text_end - span.text_begin);
                if (!span.empty()) {
                    auto it = counts_.find(sentence_fingerprint(sentence, k_));
                    if (it != counts_.end() && it->second >= static_cast<uint64_t>(min_repeat_)) {
                        ++removed_here;
                        continue;
                    }
                }
                kept.append(para.substr(span.begin, span.end - span.begin));
            }
            removed_ += removed_here;
            bool emptied = removed_here > 0 &&
                           kept.find_first_not_of(" \t\n") == std::string::npos;
            if (!emptied) {
                out.append(kept);
                out.append(split.separators[p]);
            }
        }
        return out;
    }

private:
    template <typename Fn>
    void for_each_sentence(std::string_view content, Fn&& fn) const {
        for (std::string_view para : split_paragraphs(content).paragraphs)
            for (const SentenceSpan& span : split_sentences(para))
                if (!span.empty())
                    fn(para.substr(span.text_begin, span.text_end - span.text_begin));
    }

    int min_repeat_;
    int k_;
    uint64_t removed_ = 0;
    std::unordered_map<SentenceFingerprint, uint64_t, SentenceFingerprintHash> counts_;
};

// Whole-corpus convenience wrapper over the two-pass stripper.
inline std::pair<std::vector<Document>, StageStats> strip_boilerplate_sentences(
    const std::vector<Document>& docs, int min_repeat = 8, int k = 16) {
    BoilerplateStripper stripper(min_repeat, k);
    for (const Document& d : docs) stripper.count(d.content);
    StageStats stats;
    stats.stage = "sentence_dedup";
    std::vector<Document> out;
    out.reserve(docs.size());
    for (const Document& d : docs) {
        stats.count_in(d);
        Document stripped = d;
        stripped.content = stripper.strip(d.content);
        stats.count_out(stripped);
        out.push_back(std::move(stripped));
    }
    return {std::move(out), std::move(stats)};
}

// Dedup manifest record: one line per cluster that lost members.
struct DedupRecord {
    std::string representative;
    std::vector<std::string> dropped;
    std::string level;  // url | simhash | paragraph
};

inline std::string dedup_record_to_jsonl(const DedupRecord& r) {
    nlohmann::ordered_json j;
    j["cluster_representative"] = r.representative;
    j["dropped_ids"] = r.dropped;
    j["level"] = r.level;
    return j.dump();
}

}  // namespace corpusforge
