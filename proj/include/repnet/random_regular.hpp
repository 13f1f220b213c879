#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "repnet/errors.hpp"
#include "repnet/graph.hpp"
#include "repnet/rng.hpp"

namespace repnet {

// Uniform-style random connected k-regular simple graph on n nodes via the
// pairing (configuration) model: k stubs per node, a random perfect matching
// of stubs, with whole-sample rejection of self-loops, repeated edges, and
// disconnected outcomes.
inline Graph random_k_regular_connected(int n, int k, Rng& rng,
                                        int max_attempts = 10000) {
    if (k < 1 || k >= n) {
        throw invalid_parameter_error("degree must satisfy 1 <= k < n, got k=" +
                                      std::to_string(k) + ", n=" +
                                      std::to_string(n));
    }
    if ((n * k) % 2 != 0) {
        throw invalid_parameter_error(
            "no k-regular graph exists: n*k = " + std::to_string(n * k) +
            " is odd");
    }
    std::vector<int> stubs(static_cast<std::size_t>(n) * k);
    for (int v = 0; v < n; ++v) {
        for (int s = 0; s < k; ++s) stubs[static_cast<std::size_t>(v * k + s)] = v;
    }
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        for (std::size_t i = stubs.size() - 1; i > 0; --i) {
            const std::size_t j = rng.uniform_below(i + 1);
            std::swap(stubs[i], stubs[j]);
        }
        Graph g(n);
        bool simple = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            const int a = stubs[i];
            const int b = stubs[i + 1];
            if (a == b || g.has_edge(a, b)) {
                simple = false;
                break;
            }
            g.add_edge(a, b);
        }
        if (simple && is_connected(g)) return g;
    }
    throw generation_failure_error(
        "no simple connected " + std::to_string(k) + "-regular graph on " +
        std::to_string(n) + " nodes found within " +
        std::to_string(max_attempts) + " pairing attempts");
}

}  // namespace repnet
