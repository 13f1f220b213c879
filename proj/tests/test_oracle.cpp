#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <utility>
#include <vector>

#include "repnet/errors.hpp"
#include "repnet/experiment.hpp"
#include "repnet/game.hpp"
#include "repnet/graph.hpp"
#include "repnet/oracle.hpp"
#include "test_helpers.hpp"

using namespace repnet;
using test_helpers::complete;
using test_helpers::cycle;

namespace {

// A third route for cross-checking: exact expectations of the *plain*
// decision rule restricted to a graph's edges, written independently of
// both oracle.hpp and game.hpp.
struct EdgeVanillaOracle {
    int n;
    std::vector<std::pair<int, int>> edges;
    PayoffMatrix p;
    int steps;

    std::array<bool, 4> cheater{};
    std::array<std::array<bool, 4>, 4> distrust{};
    std::array<double, 4> pay{};
    std::array<int, 4> plays{};
    std::vector<std::array<long double, 4>> acc;  // coopV, coopW, cheatV, cheatW

    ExactCurves run(int m) {
        acc.assign(static_cast<std::size_t>(steps), {0.0L, 0.0L, 0.0L, 0.0L});
        int assignments = 0;
        for (int mask = 0; mask < (1 << n); ++mask) {
            if (std::popcount(static_cast<unsigned>(mask)) != m) continue;
            ++assignments;
        }
        for (int mask = 0; mask < (1 << n); ++mask) {
            if (std::popcount(static_cast<unsigned>(mask)) != m) continue;
            for (int v = 0; v < n; ++v) {
                cheater[static_cast<std::size_t>(v)] = (mask >> v) & 1;
                pay[static_cast<std::size_t>(v)] = 0.0;
                plays[static_cast<std::size_t>(v)] = 0;
                distrust[static_cast<std::size_t>(v)] = {};
            }
            walk(0, 1.0L / assignments);
        }
        ExactCurves out;
        out.points.resize(static_cast<std::size_t>(steps));
        for (int t = 0; t < steps; ++t) {
            auto& point = out.points[static_cast<std::size_t>(t)];
            point.r = 2.0 * (t + 1) / n;
            const auto& a = acc[static_cast<std::size_t>(t)];
            if (a[1] > 0.0L) point.coop_mean = static_cast<double>(a[0] / a[1]);
            if (a[3] > 0.0L) point.cheat_mean = static_cast<double>(a[2] / a[3]);
        }
        return out;
    }

    void walk(int depth, long double weight) {
        const long double w = weight / edges.size();
        for (const auto& [a, b] : edges) {
            const bool ca = distrust[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] ||
                            cheater[static_cast<std::size_t>(a)];
            const bool cb = distrust[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] ||
                            cheater[static_cast<std::size_t>(b)];
            const bool prev_ab =
                distrust[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            const bool prev_ba =
                distrust[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
            const double pay_a = ca ? (cb ? p.dd : p.dc) : (cb ? p.cd : p.cc);
            const double pay_b = cb ? (ca ? p.dd : p.dc) : (ca ? p.cd : p.cc);
            pay[static_cast<std::size_t>(a)] += pay_a;
            pay[static_cast<std::size_t>(b)] += pay_b;
            ++plays[static_cast<std::size_t>(a)];
            ++plays[static_cast<std::size_t>(b)];
            distrust[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = cb;
            distrust[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = ca;

            double sum[2] = {0.0, 0.0};
            int count[2] = {0, 0};
            for (int v = 0; v < n; ++v) {
                if (plays[static_cast<std::size_t>(v)] == 0) continue;
                const int ty = cheater[static_cast<std::size_t>(v)] ? 1 : 0;
                sum[ty] += pay[static_cast<std::size_t>(v)] /
                           plays[static_cast<std::size_t>(v)];
                ++count[ty];
            }
            auto& slot = acc[static_cast<std::size_t>(depth)];
            if (count[0] > 0) {
                slot[0] += w * (sum[0] / count[0]);
                slot[1] += w;
            }
            if (count[1] > 0) {
                slot[2] += w * (sum[1] / count[1]);
                slot[3] += w;
            }
            if (depth + 1 < steps) walk(depth + 1, w);

            distrust[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = prev_ab;
            distrust[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = prev_ba;
            --plays[static_cast<std::size_t>(a)];
            --plays[static_cast<std::size_t>(b)];
            pay[static_cast<std::size_t>(a)] -= pay_a;
            pay[static_cast<std::size_t>(b)] -= pay_b;
        }
    }
};

}  // namespace

TEST_CASE("two agents, one cheater: closed form", "[oracle]") {
    const auto curves = exact_vanilla_curves(2, 1, 8, PayoffMatrix::defaults());
    REQUIRE(curves.points.size() == 8);
    for (int t = 1; t <= 8; ++t) {
        const auto& point = curves.points[static_cast<std::size_t>(t - 1)];
        CHECK(point.r == Catch::Approx(t).epsilon(1e-12));
        REQUIRE(point.coop_mean.has_value());
        REQUIRE(point.cheat_mean.has_value());
        CHECK(std::abs(*point.coop_mean - (-1.6 / t)) < 1e-12);
        CHECK(std::abs(*point.cheat_mean - (1.5 / t)) < 1e-12);
    }
}

TEST_CASE("two agents, no cheater", "[oracle]") {
    const auto curves = exact_vanilla_curves(2, 0, 5, PayoffMatrix::defaults());
    for (const auto& point : curves.points) {
        REQUIRE(point.coop_mean.has_value());
        CHECK(std::abs(*point.coop_mean - 1.0) < 1e-12);
        CHECK_FALSE(point.cheat_mean.has_value());
    }
}

TEST_CASE("four agents, one cheater, first step", "[oracle]") {
    const auto curves = exact_vanilla_curves(4, 1, 1, PayoffMatrix::defaults());
    REQUIRE(curves.points.size() == 1);
    CHECK(std::abs(*curves.points[0].coop_mean - (-0.3)) < 1e-12);
    CHECK(std::abs(*curves.points[0].cheat_mean - 1.5) < 1e-12);
}

TEST_CASE("oracle guards", "[oracle]") {
    const auto p = PayoffMatrix::defaults();
    CHECK_THROWS_AS(exact_vanilla_curves(5, 1, 4, p), capacity_error);
    CHECK_THROWS_AS(exact_vanilla_curves(4, 1, 9, p), capacity_error);
    CHECK_THROWS_AS(exact_vanilla_curves(1, 0, 4, p), invalid_parameter_error);
    CHECK_THROWS_AS(exact_vanilla_curves(4, 5, 4, p), invalid_parameter_error);
    CHECK_THROWS_AS(exact_vanilla_curves(4, 1, 0, p), invalid_parameter_error);
    CHECK_THROWS_AS(exact_gossip_curves(cycle(3), 1, 9, p), capacity_error);
    Graph edgeless(3);
    CHECK_THROWS_AS(exact_gossip_curves(edgeless, 1, 2, p),
                    invalid_parameter_error);
}

TEST_CASE("gossip oracle on the clean clique", "[oracle]") {
    const auto curves = exact_gossip_curves(complete(4), 0, 6,
                                            PayoffMatrix::defaults());
    for (const auto& point : curves.points) {
        REQUIRE(point.coop_mean.has_value());
        CHECK(std::abs(*point.coop_mean - 1.0) < 1e-12);
        CHECK_FALSE(point.cheat_mean.has_value());
    }
}

TEST_CASE("first contacts always pay the exploiter", "[oracle]") {
    const auto curves = exact_gossip_curves(complete(4), 1, 1,
                                            PayoffMatrix::defaults());
    REQUIRE(curves.points.size() == 1);
    CHECK(std::abs(*curves.points[0].cheat_mean - 1.5) < 1e-12);
}

TEST_CASE("triangle-free gossip equals edge-restricted plain expectations",
          "[oracle]") {
    const Graph c4 = cycle(4);
    for (int m : {1, 2}) {
        const auto gossip = exact_gossip_curves(c4, m, 6,
                                                PayoffMatrix::defaults());
        EdgeVanillaOracle reference{4, c4.edges(), PayoffMatrix::defaults(), 6};
        const auto plain = reference.run(m);
        REQUIRE(gossip.points.size() == plain.points.size());
        for (std::size_t t = 0; t < gossip.points.size(); ++t) {
            const auto& a = gossip.points[t];
            const auto& b = plain.points[t];
            CHECK(a.coop_mean.has_value() == b.coop_mean.has_value());
            CHECK(a.cheat_mean.has_value() == b.cheat_mean.has_value());
            if (a.coop_mean) CHECK(std::abs(*a.coop_mean - *b.coop_mean) < 1e-12);
            if (a.cheat_mean) {
                CHECK(std::abs(*a.cheat_mean - *b.cheat_mean) < 1e-12);
            }
        }
    }
}

TEST_CASE("Monte Carlo estimates converge on the oracle", "[oracle][slow]") {
    const auto exact = exact_vanilla_curves(4, 1, 8, PayoffMatrix::defaults());
    for (const int runs : {1000, 10000, 100000}) {
        RunConfig cfg;
        cfg.model = Model::vanilla;
        cfg.n = 4;
        cfg.m = 1;
        cfg.runs = runs;
        cfg.horizon_r = 4.0;  // 8 steps at n = 4
        cfg.master_seed = 42;
        cfg.threads = 4;
        const auto mc = run_curves(cfg);
        REQUIRE(mc.points.size() == 8);
        for (std::size_t t = 0; t < 8; ++t) {
            const auto& estimate = mc.points[t];
            const auto& truth = exact.points[t];
            REQUIRE(estimate.coop_mean.has_value());
            REQUIRE(estimate.cheat_mean.has_value());
            const double coop_err = std::abs(*estimate.coop_mean - *truth.coop_mean);
            const double cheat_err =
                std::abs(*estimate.cheat_mean - *truth.cheat_mean);
            if (estimate.coop_stderr && *estimate.coop_stderr > 0.0) {
                CHECK(coop_err <= 3.0 * *estimate.coop_stderr);
            } else {
                CHECK(coop_err < 1e-9);
            }
            if (estimate.cheat_stderr && *estimate.cheat_stderr > 0.0) {
                CHECK(cheat_err <= 3.0 * *estimate.cheat_stderr);
            } else {
                CHECK(cheat_err < 1e-9);
            }
        }
    }
}
