#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "repnet/errors.hpp"
#include "repnet/graph.hpp"

namespace repnet {

namespace detail {

// Exact canonical labeling by branch-and-bound: find the node ordering whose
// adjacency bits, read in graph6's pair order (0,1),(0,2),(1,2),(0,3),...,
// form the lexicographically smallest string. Assigning one node at a time
// appends a contiguous block of bits, so a prefix that already exceeds the
// best known string kills the whole subtree. Candidates are tried smallest
// block first, which makes the first completed labeling a strong bound.
class CanonicalSearch {
public:
    static constexpr int max_n = 16;

    CanonicalSearch(int n, const std::uint32_t* rows) : n_(n) {
        if (n < 1 || n > max_n) {
            throw capacity_error("exact canonical search is limited to n <= " +
                                 std::to_string(max_n));
        }
        for (int v = 0; v < n_; ++v) adj_[v] = rows[v];
    }

    explicit CanonicalSearch(const Graph& g)
        : CanonicalSearch(g.node_count(), rows_of(g).data()) {}

    void run() {
        have_best_ = false;
        used_ = 0;
        dfs(0, 0);
    }

    // graph6 token of the minimal form; valid after run().
    std::string key() const {
        std::string out;
        out.push_back(static_cast<char>(63 + n_));
        const int total_bits = n_ * (n_ - 1) / 2;
        int group = 0;
        int filled = 0;
        for (int b = 0; b < total_bits; ++b) {
            group = (group << 1) | best_bits_[b];
            if (++filled == 6) {
                out.push_back(static_cast<char>(63 + group));
                group = 0;
                filled = 0;
            }
        }
        if (filled != 0) {
            group <<= (6 - filled);
            out.push_back(static_cast<char>(63 + group));
        }
        return out;
    }

    // Map old node -> position in the minimal form; valid after run().
    std::vector<int> relabeling() const {
        std::vector<int> new_label_of(static_cast<std::size_t>(n_));
        for (int pos = 0; pos < n_; ++pos) {
            new_label_of[static_cast<std::size_t>(best_order_[pos])] = pos;
        }
        return new_label_of;
    }

private:
    static std::array<std::uint32_t, max_n> rows_of(const Graph& g) {
        if (g.node_count() > max_n) {
            throw capacity_error("exact canonical search is limited to n <= " +
                                 std::to_string(max_n));
        }
        std::array<std::uint32_t, max_n> rows{};
        for (int v = 0; v < g.node_count(); ++v) {
            rows[static_cast<std::size_t>(v)] =
                static_cast<std::uint32_t>(g.adjacency_mask(v));
        }
        return rows;
    }

    void dfs(int depth, int bitpos) {
        if (depth == n_) {
            if (!have_best_ ||
                std::memcmp(cur_bits_.data(), best_bits_.data(),
                            static_cast<std::size_t>(bitpos)) < 0) {
                best_bits_ = cur_bits_;
                best_order_ = order_;
                have_best_ = true;
            }
            return;
        }
        struct Candidate {
            std::uint32_t block;
            int v;
        };
        std::array<Candidate, max_n> cands;
        int count = 0;
        for (int v = 0; v < n_; ++v) {
            if (used_ & (1u << v)) continue;
            std::uint32_t block = 0;
            for (int q = 0; q < depth; ++q) {
                block = (block << 1) | ((adj_[v] >> order_[q]) & 1u);
            }
            cands[static_cast<std::size_t>(count++)] = {block, v};
        }
        std::sort(cands.begin(), cands.begin() + count,
                  [](const Candidate& a, const Candidate& b) {
                      return a.block != b.block ? a.block < b.block : a.v < b.v;
                  });
        for (int c = 0; c < count; ++c) {
            const Candidate& cand = cands[static_cast<std::size_t>(c)];
            for (int q = 0; q < depth; ++q) {
                cur_bits_[static_cast<std::size_t>(bitpos + q)] =
                    static_cast<std::uint8_t>((cand.block >> (depth - 1 - q)) & 1u);
            }
            if (have_best_ &&
                std::memcmp(cur_bits_.data(), best_bits_.data(),
                            static_cast<std::size_t>(bitpos + depth)) > 0) {
                // Candidates are sorted by block, so every later one is
                // at least as large; the whole remainder is beaten.
                break;
            }
            used_ |= 1u << cand.v;
            order_[static_cast<std::size_t>(depth)] = cand.v;
            dfs(depth + 1, bitpos + depth);
            used_ &= ~(1u << cand.v);
        }
    }

    int n_;
    std::array<std::uint32_t, max_n> adj_{};
    std::array<std::uint8_t, max_n*(max_n - 1) / 2> cur_bits_{};
    std::array<std::uint8_t, max_n*(max_n - 1) / 2> best_bits_{};
    std::array<int, max_n> order_{};
    std::array<int, max_n> best_order_{};
    std::uint32_t used_ = 0;
    bool have_best_ = false;
};

}  // namespace detail

// Isomorphism-canonical relabeling of g: the same graph for every input
// labeling of the same structure.
inline Graph canonical_form(const Graph& g) {
    detail::CanonicalSearch search(g);
    search.run();
    return relabeled(g, search.relabeling());
}

// Order-independent identifier: equal for two graphs iff they are
// isomorphic, stable across runs. Rendered as the canonical form's graph6
// token so keys double as loadable graph descriptions.
inline std::string canonical_key(const Graph& g) {
    detail::CanonicalSearch search(g);
    search.run();
    return search.key();
}

}  // namespace repnet
