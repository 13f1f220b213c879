#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "repnet/errors.hpp"
#include "repnet/graph.hpp"

namespace repnet {

// Short-form graph6 text encoding (n <= 62): one size byte n+63, then the
// upper-triangle adjacency bits in column order (0,1),(0,2),(1,2),(0,3),...
// packed big-endian into 6-bit groups, each group offset by 63. Trailing
// padding bits are zero.

inline std::string graph6_encode(const Graph& g) {
    const int n = g.node_count();
    // Graph already guarantees n <= 62.
    std::string out;
    const std::size_t pair_bits = static_cast<std::size_t>(n) * (n - 1) / 2;
    out.reserve(1 + (pair_bits + 5) / 6);
    out.push_back(static_cast<char>(63 + n));
    int group = 0;
    int filled = 0;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            group = (group << 1) | (g.has_edge(i, j) ? 1 : 0);
            if (++filled == 6) {
                out.push_back(static_cast<char>(63 + group));
                group = 0;
                filled = 0;
            }
        }
    }
    if (filled != 0) {
        group <<= (6 - filled);
        out.push_back(static_cast<char>(63 + group));
    }
    return out;
}

inline Graph graph6_decode(std::string_view token) {
    if (token.empty()) {
        throw parse_error("empty graph6 token", 0);
    }
    const unsigned char size_byte = static_cast<unsigned char>(token[0]);
    if (size_byte < 63 + 1 || size_byte > 63 + Graph::max_nodes) {
        throw parse_error("graph6 size byte out of supported range", 0);
    }
    const int n = static_cast<int>(size_byte) - 63;
    const std::size_t pair_bits = static_cast<std::size_t>(n) * (n - 1) / 2;
    const std::size_t expected_len = 1 + (pair_bits + 5) / 6;
    if (token.size() < expected_len) {
        throw parse_error("graph6 token truncated", token.size());
    }
    if (token.size() > expected_len) {
        throw parse_error("trailing bytes after graph6 token", expected_len);
    }
    Graph g(n);
    std::size_t bit_index = 0;
    for (std::size_t pos = 1; pos < expected_len; ++pos) {
        const unsigned char byte = static_cast<unsigned char>(token[pos]);
        if (byte < 63 || byte > 126) {
            throw parse_error("graph6 payload byte out of range", pos);
        }
        const int group = byte - 63;
        for (int b = 5; b >= 0; --b, ++bit_index) {
            const bool set = (group >> b) & 1;
            if (bit_index >= pair_bits) {
                if (set) throw parse_error("nonzero graph6 padding bits", pos);
                continue;
            }
            if (set) {
                // Invert the column-order bit index to the pair (i, j).
                std::size_t rem = bit_index;
                int j = 1;
                while (rem >= static_cast<std::size_t>(j)) {
                    rem -= static_cast<std::size_t>(j);
                    ++j;
                }
                g.add_edge(static_cast<int>(rem), j);
            }
        }
    }
    return g;
}

}  // namespace repnet
