#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/unicode.hpp"

namespace corpusforge {

// Aho-Corasick automaton compiled to a full byte-transition DFA. Reports
// every occurrence of every pattern (overlaps included). Matching is
// case-insensitive for ASCII: patterns and haystack bytes are folded, which
// never changes byte offsets.
class PatternAutomaton {
public:
    void add_pattern(std::string_view pattern) {
        if (pattern.empty()) throw std::invalid_argument("empty pattern");
        patterns_.emplace_back(pattern);
        built_ = false;
    }

    std::size_t pattern_count() const { return patterns_.size(); }
    const std::string& pattern(std::size_t i) const { return patterns_[i]; }

    void build() {
        trie_.assign(1, Node{});
        for (std::size_t p = 0; p < patterns_.size(); ++p) {
            int node = 0;
            for (char raw : patterns_[p]) {
                unsigned char c = static_cast<unsigned char>(ascii_lower(raw));
                int next = trie_[static_cast<std::size_t>(node)].next[c];
                if (next == 0) {
                    trie_.push_back(Node{});
                    next = static_cast<int>(trie_.size()) - 1;
                    trie_[static_cast<std::size_t>(node)].next[c] = next;
                }
                node = next;
            }
            trie_[static_cast<std::size_t>(node)].outputs.push_back(static_cast<uint32_t>(p));
        }
        // BFS: fail links, then collapse into goto-complete transitions and
        // flatten output links.
        std::deque<int> queue;
        for (int c = 0; c < 256; ++c) {
            int next = trie_[0].next[c];
            if (next != 0) {
                trie_[static_cast<std::size_t>(next)].fail = 0;
                queue.push_back(next);
            }
        }
        while (!queue.empty()) {
            int node = queue.front();
            queue.pop_front();
            Node& n = trie_[static_cast<std::size_t>(node)];
            const Node& f = trie_[static_cast<std::size_t>(n.fail)];
            for (uint32_t out : f.outputs) n.outputs.push_back(out);
            for (int c = 0; c < 256; ++c) {
                int next = n.next[c];
                if (next != 0) {
                    trie_[static_cast<std::size_t>(next)].fail = f.next[c];
                    queue.push_back(next);
                } else {
                    n.next[c] = f.next[c];
                }
            }
        }
        built_ = true;
    }

    bool built() const { return built_; }

    // fn(pattern_index, end_offset): end_offset is one past the last byte of
    // the match. Offsets are relative to `text` plus `base_offset`.
    template <typename Fn>
    void scan(std::string_view text, Fn&& fn, uint64_t base_offset = 0) const {
        int state = 0;
        scan_resume(state, text, fn, base_offset);
    }

    // Streaming form: `state` carries the automaton position across chunks.
    template <typename Fn>
    void scan_resume(int& state, std::string_view text, Fn&& fn, uint64_t base_offset = 0) const {
        if (!built_) throw std::logic_error("PatternAutomaton not built");
        for (std::size_t i = 0; i < text.size(); ++i) {
            unsigned char c = static_cast<unsigned char>(ascii_lower(text[i]));
            state = trie_[static_cast<std::size_t>(state)].next[c];
            for (uint32_t p : trie_[static_cast<std::size_t>(state)].outputs)
                fn(p, base_offset + i + 1);
        }
    }

private:
    struct Node {
        std::array<int, 256> next{};  // zero-init: all edges to root
        int fail = 0;
        std::vector<uint32_t> outputs;
    };

    std::vector<std::string> patterns_;
    std::vector<Node> trie_{1};
    bool built_ = false;
};

}  // namespace corpusforge
