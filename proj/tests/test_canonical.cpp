#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "repnet/canonical.hpp"
#include "repnet/errors.hpp"
#include "repnet/graph.hpp"
#include "repnet/graph6.hpp"
#include "repnet/random_regular.hpp"
#include "repnet/rng.hpp"
#include "test_helpers.hpp"

using namespace repnet;
using test_helpers::bipartite_regular;
using test_helpers::circulant;
using test_helpers::complete;
using test_helpers::cycle;
using test_helpers::random_permutation;

TEST_CASE("canonical key is invariant under relabeling", "[canonical]") {
    const Graph k5 = complete(5);
    CHECK(canonical_key(k5) == "D~{");
    CHECK(canonical_key(relabeled(k5, {4, 3, 2, 1, 0})) == "D~{");

    Rng rng(11);
    const std::vector<Graph> samples = {
        circulant(10, {1, 2}),
        cycle(10),
        bipartite_regular(3, 3),
        bipartite_regular(5, 4),
        random_k_regular_connected(10, 4, rng),
        random_k_regular_connected(10, 4, rng),
        random_k_regular_connected(8, 3, rng),
    };
    for (const auto& g : samples) {
        const std::string key = canonical_key(g);
        for (int trial = 0; trial < 60; ++trial) {
            const auto perm = random_permutation(g.node_count(), rng);
            CHECK(canonical_key(relabeled(g, perm)) == key);
        }
    }
}

TEST_CASE("non-isomorphic graphs get different keys", "[canonical]") {
    CHECK(canonical_key(cycle(10)) != canonical_key(circulant(10, {1, 2})));
    CHECK(canonical_key(bipartite_regular(3, 3)) !=
          canonical_key(circulant(6, {2, 3})));  // K33 vs prism
    CHECK(canonical_key(cycle(4)) != canonical_key(complete(4)));
}

TEST_CASE("canonical keys are stable literals", "[canonical]") {
    CHECK(canonical_key(circulant(10, {1, 2})) == "I@T|DfAqG");
    CHECK(canonical_key(cycle(10)) == "I??XQa_o?");
    CHECK(canonical_key(bipartite_regular(3, 3)) == "EFz_");
}

TEST_CASE("canonical form realizes the key and preserves structure",
          "[canonical]") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = random_k_regular_connected(10, 4, rng);
        const Graph canon = canonical_form(g);
        CHECK(graph6_encode(canon) == canonical_key(g));
        CHECK(canon.edge_count() == g.edge_count());
        CHECK(canon.regular_degree() == g.regular_degree());
        CHECK(canonical_key(canon) == canonical_key(g));
        CHECK(is_connected(canon));
    }
}

TEST_CASE("canonical search is guarded at desk scale", "[canonical]") {
    CHECK_THROWS_AS(canonical_key(cycle(17)), capacity_error);
    CHECK_NOTHROW(canonical_key(cycle(12)));
}
