#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "repnet/canonical.hpp"
#include "repnet/errors.hpp"
#include "repnet/graph.hpp"

namespace repnet {

struct GraphSetEntry {
    Graph graph;               // canonical representative of the class
    std::string canonical_key;
    double chi;                // average clustering coefficient
};

namespace detail {

// Exhaustive generation of connected k-regular graphs on n nodes, one per
// isomorphism class. Nodes are filled in index order, each connecting only
// to higher-indexed nodes; node 0's neighborhood is pinned to {1..k}, which
// every class can realize, so only duplicates are cut, never classes.
// Duplicates are rejected by canonical key.
class RegularEnumerator {
public:
    RegularEnumerator(int n, int k) : n_(n), k_(k) {}

    std::map<std::string, Graph> run() {
        found_.clear();
        if (k_ == 0) {
            finish();  // only n == 1 yields a (vacuously) connected graph
            return std::move(found_);
        }
        for (int v = 1; v <= k_; ++v) connect(0, v);
        fill_vertex(1);
        return std::move(found_);
    }

private:
    void connect(int a, int b) {
        adj_[static_cast<std::size_t>(a)] |= 1u << b;
        adj_[static_cast<std::size_t>(b)] |= 1u << a;
        ++deg_[static_cast<std::size_t>(a)];
        ++deg_[static_cast<std::size_t>(b)];
    }

    void disconnect(int a, int b) {
        adj_[static_cast<std::size_t>(a)] &= ~(1u << b);
        adj_[static_cast<std::size_t>(b)] &= ~(1u << a);
        --deg_[static_cast<std::size_t>(a)];
        --deg_[static_cast<std::size_t>(b)];
    }

    bool connected() const {
        std::uint32_t reached = 1;
        std::uint32_t frontier = 1;
        while (frontier != 0) {
            std::uint32_t next = 0;
            while (frontier != 0) {
                const int v = std::countr_zero(frontier);
                frontier &= frontier - 1;
                next |= adj_[static_cast<std::size_t>(v)];
            }
            frontier = next & ~reached;
            reached |= next;
        }
        return std::popcount(reached) == n_;
    }

    void finish() {
        if (!connected()) return;
        CanonicalSearch search(n_, adj_.data());
        search.run();
        std::string key = search.key();
        if (found_.contains(key)) return;
        Graph g(n_);
        for (int i = 0; i < n_; ++i) {
            std::uint32_t later = adj_[static_cast<std::size_t>(i)] >> (i + 1);
            while (later != 0) {
                g.add_edge(i, i + 1 + std::countr_zero(later));
                later &= later - 1;
            }
        }
        found_.emplace(std::move(key), relabeled(g, search.relabeling()));
    }

    void fill_vertex(int u) {
        if (u == n_) {
            finish();
            return;
        }
        if (deg_[static_cast<std::size_t>(u)] == k_) {
            fill_vertex(u + 1);
            return;
        }
        pick_partners(u, u + 1, k_ - deg_[static_cast<std::size_t>(u)]);
    }

    void pick_partners(int u, int from, int remaining) {
        int open = 0;
        for (int v = from; v < n_; ++v) {
            if (deg_[static_cast<std::size_t>(v)] < k_) ++open;
        }
        if (open < remaining) return;
        // Nodes that have no edges yet are mutually interchangeable, so
        // only the lowest-indexed one needs to be tried; the others would
        // only relabel the same classes.
        bool fresh_tried = false;
        for (int v = from; v < n_; ++v) {
            if (deg_[static_cast<std::size_t>(v)] >= k_) continue;
            if (deg_[static_cast<std::size_t>(v)] == 0) {
                if (fresh_tried) {
                    if (--open < remaining) return;
                    continue;
                }
                fresh_tried = true;
            }
            connect(u, v);
            if (remaining == 1) {
                fill_vertex(u + 1);
            } else {
                pick_partners(u, v + 1, remaining - 1);
            }
            disconnect(u, v);
            if (--open < remaining) return;
        }
    }

    int n_;
    int k_;
    std::array<std::uint32_t, 12> adj_{};
    std::array<int, 12> deg_{};
    std::map<std::string, Graph> found_;
};

}  // namespace detail

// One representative per isomorphism class of connected k-regular simple
// graphs on n nodes, sorted by canonical key.
inline std::vector<GraphSetEntry> enumerate_k_regular_connected(int n, int k) {
    if (n < 1) {
        throw invalid_parameter_error("node count must be positive");
    }
    if (k < 0 || k >= n) {
        throw invalid_parameter_error("degree must satisfy 0 <= k < n");
    }
    if (n > 12) {
        throw capacity_error("exhaustive enumeration is limited to n <= 12");
    }
    if ((n * k) % 2 != 0) {
        throw invalid_parameter_error(
            "no k-regular graph exists: n*k = " + std::to_string(n * k) +
            " is odd");
    }
    detail::RegularEnumerator enumerator(n, k);
    std::vector<GraphSetEntry> out;
    for (auto& [key, graph] : enumerator.run()) {
        const double chi = average_clustering(graph);
        out.push_back(GraphSetEntry{std::move(graph), key, chi});
    }
    return out;
}

}  // namespace repnet
