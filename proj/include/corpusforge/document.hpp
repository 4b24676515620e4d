#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace corpusforge {

// One corpus record. Immutable by convention once a stage has emitted it.
struct Document {
    std::string id;
    std::string source;
    std::optional<std::string> url;
    std::optional<std::string> lang;
    std::string content;
    std::map<std::string, std::string> meta;

    bool operator==(const Document&) const = default;
};

// Whether a source category's volume is fixed (books, papers) or keeps
// growing (web, social media). Drives allocator up/down-sampling.
enum class SourceKind { static_data, dynamic_data };

inline std::string_view to_string(SourceKind k) {
    return k == SourceKind::static_data ? "static" : "dynamic";
}

inline SourceKind source_kind_from_string(std::string_view s) {
    if (s == "static") return SourceKind::static_data;
    if (s == "dynamic") return SourceKind::dynamic_data;
    throw std::invalid_argument("unknown source kind: " + std::string(s));
}

// Per-stage counters. Merging across shards must reproduce the single-run
// numbers exactly, so everything here is integral.
struct StageStats {
    std::string stage;
    uint64_t docs_in = 0;
    uint64_t docs_out = 0;
    uint64_t bytes_in = 0;
    uint64_t bytes_out = 0;
    std::map<std::string, uint64_t> drop_reasons;

    bool operator==(const StageStats&) const = default;

    void count_in(const Document& d) {
        ++docs_in;
        bytes_in += d.content.size();
    }
    void count_out(const Document& d) {
        ++docs_out;
        bytes_out += d.content.size();
    }
    void count_drop(const std::string& reason) { ++drop_reasons[reason]; }
};

inline StageStats merge_stats(const StageStats& a, const StageStats& b) {
    if (a.stage != b.stage)
        throw std::invalid_argument("merge_stats: stage mismatch: '" + a.stage + "' vs '" +
                                    b.stage + "'");
    StageStats out = a;
    out.docs_in += b.docs_in;
    out.docs_out += b.docs_out;
    out.bytes_in += b.bytes_in;
    out.bytes_out += b.bytes_out;
    for (const auto& [k, v] : b.drop_reasons) out.drop_reasons[k] += v;
    return out;
}

inline nlohmann::ordered_json stats_to_json(const StageStats& s) {
    nlohmann::ordered_json j;
    j["stage"] = s.stage;
    j["docs_in"] = s.docs_in;
    j["docs_out"] = s.docs_out;
    j["bytes_in"] = s.bytes_in;
    j["bytes_out"] = s.bytes_out;
    j["drop_reasons"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.drop_reasons) j["drop_reasons"][k] = v;
    return j;
}

inline StageStats stats_from_json(const nlohmann::json& j) {
    StageStats s;
    s.stage = j.at("stage").get<std::string>();
    s.docs_in = j.at("docs_in").get<uint64_t>();
    s.docs_out = j.at("docs_out").get<uint64_t>();
    s.bytes_in = j.at("bytes_in").get<uint64_t>();
    s.bytes_out = j.at("bytes_out").get<uint64_t>();
    if (j.contains("drop_reasons"))
        for (const auto& [k, v] : j.at("drop_reasons").items())
            s.drop_reasons[k] = v.get<uint64_t>();
    return s;
}

// ---- JSONL record schema ------------------------------------------------
// Required keys: id, source, content. Optional: url, lang, meta (object of
// strings). Unknown keys are preserved into meta under an "x_" prefix.

inline std::string document_to_jsonl(const Document& d) {
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["source"] = d.source;
    if (d.url) j["url"] = *d.url;
    if (d.lang) j["lang"] = *d.lang;
    j["content"] = d.content;
    if (!d.meta.empty()) {
        nlohmann::ordered_json m = nlohmann::ordered_json::object();
        for (const auto& [k, v] : d.meta) m[k] = v;
        j["meta"] = m;
    }
    return j.dump();
}

inline Document document_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
    Document d;
    d.id = j.at("id").get<std::string>();
    d.source = j.at("source").get<std::string>();
    d.content = j.at("content").get<std::string>();
    if (d.id.empty()) throw std::invalid_argument("record id is empty");
    for (const auto& [key, value] : j.items()) {
        if (key == "id" || key == "source" || key == "content") continue;
        if (key == "url") {
            d.url = value.get<std::string>();
        } else if (key == "lang") {
            d.lang = value.get<std::string>();
        } else if (key == "meta") {
            if (!value.is_object()) throw std::invalid_argument("meta is not an object");
            for (const auto& [mk, mv] : value.items())
                d.meta[mk] = mv.is_string() ? mv.get<std::string>() : mv.dump();
        } else {
            d.meta["x_" + key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    return d;
}

inline Document document_from_jsonl(std::string_view line) {
    return document_from_json(nlohmann::json::parse(line));
}

}  // namespace corpusforge
