#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repnet/errors.hpp"

namespace repnet {

// Undirected simple graph on densely numbered nodes 0..n-1.
// Adjacency is one bitmask row per node, which caps the size at 62 nodes
// (the graph6 short-form bound; far above desk scale here) and makes
// degree and triangle queries single popcounts.
class Graph {
public:
    static constexpr int max_nodes = 62;

    explicit Graph(int node_count) : n_(node_count) {
        if (node_count < 1 || node_count > max_nodes) {
            throw invalid_parameter_error(
                "node count must be in 1.." + std::to_string(max_nodes) +
                ", got " + std::to_string(node_count));
        }
        rows_.assign(static_cast<std::size_t>(n_), 0);
    }

    int node_count() const noexcept { return n_; }

    void add_edge(int i, int j) {
        check_node(i);
        check_node(j);
        if (i == j) {
            throw invalid_parameter_error("self-loops are not allowed (node " +
                                          std::to_string(i) + ")");
        }
        rows_[static_cast<std::size_t>(i)] |= bit(j);
        rows_[static_cast<std::size_t>(j)] |= bit(i);
    }

    bool has_edge(int i, int j) const {
        check_node(i);
        check_node(j);
        return i != j && (rows_[static_cast<std::size_t>(i)] & bit(j)) != 0;
    }

    // Neighbor set of v as a bitmask; bit j set iff {v, j} is an edge.
    std::uint64_t adjacency_mask(int v) const {
        assert(v >= 0 && v < n_);
        return rows_[static_cast<std::size_t>(v)];
    }

    int degree(int v) const {
        check_node(v);
        return std::popcount(rows_[static_cast<std::size_t>(v)]);
    }

    std::size_t edge_count() const noexcept {
        std::size_t twice = 0;
        for (std::uint64_t row : rows_) twice += std::popcount(row);
        return twice / 2;
    }

    // Edges in (i, j) lexicographic order with i < j.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(edge_count());
        for (int i = 0; i < n_; ++i) {
            std::uint64_t later = rows_[static_cast<std::size_t>(i)] >> (i + 1);
            while (later != 0) {
                const int j = i + 1 + std::countr_zero(later);
                out.emplace_back(i, j);
                later &= later - 1;
            }
        }
        return out;
    }

    // The index-th edge in the same order as edges(); avoids building the
    // full list on hot paths.
    std::pair<int, int> edge_at(std::size_t index) const {
        for (int i = 0; i < n_; ++i) {
            std::uint64_t later = rows_[static_cast<std::size_t>(i)] >> (i + 1);
            const std::size_t in_row = static_cast<std::size_t>(std::popcount(later));
            if (index < in_row) {
                while (index > 0) {
                    later &= later - 1;
                    --index;
                }
                return {i, i + 1 + std::countr_zero(later)};
            }
            index -= in_row;
        }
        throw invalid_parameter_error("edge index out of range");
    }

    // Degree shared by every node, or nullopt if degrees are mixed.
    std::optional<int> regular_degree() const {
        const int d = std::popcount(rows_[0]);
        for (int v = 1; v < n_; ++v) {
            if (degree(v) != d) return std::nullopt;
        }
        return d;
    }

    bool operator==(const Graph& other) const = default;

private:
    static std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

    void check_node(int v) const {
        if (v < 0 || v >= n_) {
            throw invalid_parameter_error("node " + std::to_string(v) +
                                          " out of range 0.." +
                                          std::to_string(n_ - 1));
        }
    }

    int n_;
    std::vector<std::uint64_t> rows_;
};

// Copy of g with node v renamed to new_label_of[v]; new_label_of must be a
// permutation of 0..n-1.
inline Graph relabeled(const Graph& g, const std::vector<int>& new_label_of) {
    const int n = g.node_count();
    if (static_cast<int>(new_label_of.size()) != n) {
        throw invalid_parameter_error("relabeling size does not match graph");
    }
    std::uint64_t seen = 0;
    for (int label : new_label_of) {
        if (label < 0 || label >= n || (seen & (std::uint64_t{1} << label))) {
            throw invalid_parameter_error("relabeling is not a permutation");
        }
        seen |= std::uint64_t{1} << label;
    }
    Graph out(n);
    for (const auto& [i, j] : g.edges()) {
        out.add_edge(new_label_of[static_cast<std::size_t>(i)],
                     new_label_of[static_cast<std::size_t>(j)]);
    }
    return out;
}

inline bool is_connected(const Graph& g) {
    const int n = g.node_count();
    std::uint64_t reached = 1;  // start from node 0
    std::uint64_t frontier = 1;
    while (frontier != 0) {
        std::uint64_t next = 0;
        while (frontier != 0) {
            const int v = std::countr_zero(frontier);
            frontier &= frontier - 1;
            next |= g.adjacency_mask(v);
        }
        frontier = next & ~reached;
        reached |= next;
    }
    return std::popcount(reached) == n;
}

// Number of adjacent pairs among v's neighbors.
inline int local_triangle_count(const Graph& g, int v) {
    if (v < 0 || v >= g.node_count()) {
        throw invalid_parameter_error("node " + std::to_string(v) +
                                      " out of range");
    }
    const std::uint64_t nbrs = g.adjacency_mask(v);
    int closed = 0;
    std::uint64_t rest = nbrs;
    while (rest != 0) {
        const int u = std::countr_zero(rest);
        rest &= rest - 1;
        closed += std::popcount(g.adjacency_mask(u) & rest);
    }
    return closed;
}

using WarningSink = std::function<void(const std::string&)>;

// Mean over nodes of local_triangle_count(v) / C(deg(v), 2). Nodes of
// degree < 2 have no neighbor pairs; they contribute 0 and are reported
// through `warn` rather than failing.
inline double average_clustering(const Graph& g, const WarningSink& warn = {}) {
    const int n = g.node_count();
    double sum = 0.0;
    for (int v = 0; v < n; ++v) {
        const int d = g.degree(v);
        if (d < 2) {
            if (warn) {
                warn("node " + std::to_string(v) + " has degree " +
                     std::to_string(d) + " < 2; local coefficient taken as 0");
            }
            continue;
        }
        const double pairs = 0.5 * d * (d - 1);
        sum += static_cast<double>(local_triangle_count(g, v)) / pairs;
    }
    return sum / static_cast<double>(n);
}

}  // namespace repnet
