#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repnet/errors.hpp"
#include "repnet/game.hpp"
#include "repnet/graph.hpp"

namespace repnet {

// Exact expected payoff curves for tiny instances, by full enumeration of
// every pairing sequence and every type assignment. Used to validate the
// Monte Carlo engine, so the game rules are replayed here from scratch
// instead of calling into game.hpp's stepping path.
struct ExactCurves {
    struct Point {
        double r = 0.0;
        std::optional<double> coop_mean;
        std::optional<double> cheat_mean;
    };
    std::vector<Point> points;
};

namespace detail {

class ExactEnumerator {
public:
    static constexpr int max_agents = 4;
    static constexpr int max_steps = 8;

    ExactEnumerator(int n, std::vector<std::pair<int, int>> pairs, bool gossip,
                    const std::array<std::uint8_t, max_agents>& neighbors,
                    const PayoffMatrix& payoffs, int steps)
        : n_(n),
          steps_(steps),
          gossip_(gossip),
          neighbors_(neighbors),
          payoffs_(payoffs),
          pairs_(std::move(pairs)) {}

    ExactCurves run(int m) {
        accum_.assign(static_cast<std::size_t>(steps_), StepAccum{});
        int assignments = 0;
        for (std::uint32_t mask = 0; mask < (1u << n_); ++mask) {
            if (std::popcount(mask) == m) ++assignments;
        }
        for (std::uint32_t mask = 0; mask < (1u << n_); ++mask) {
            if (std::popcount(mask) != m) continue;
            reset(mask);
            walk(0, 1.0L / assignments);
        }
        ExactCurves curves;
        curves.points.resize(static_cast<std::size_t>(steps_));
        for (int t = 0; t < steps_; ++t) {
            auto& point = curves.points[static_cast<std::size_t>(t)];
            point.r = 2.0 * (t + 1) / n_;
            const StepAccum& acc = accum_[static_cast<std::size_t>(t)];
            if (acc.weight[0] > 0.0L) {
                point.coop_mean = static_cast<double>(acc.value[0] / acc.weight[0]);
            }
            if (acc.weight[1] > 0.0L) {
                point.cheat_mean = static_cast<double>(acc.value[1] / acc.weight[1]);
            }
        }
        return curves;
    }

private:
    struct StepAccum {
        long double value[2] = {0.0L, 0.0L};
        long double weight[2] = {0.0L, 0.0L};
    };

    void reset(std::uint32_t cheater_mask) {
        for (int v = 0; v < n_; ++v) {
            cheater_[static_cast<std::size_t>(v)] = (cheater_mask >> v) & 1u;
            payoff_[static_cast<std::size_t>(v)] = 0.0;
            plays_[static_cast<std::size_t>(v)] = 0;
            for (int w = 0; w < n_; ++w) {
                thinks_cheat_[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] =
                    false;
            }
        }
    }

    bool cheats(int actor, int partner) const {
        bool expect_cheat =
            thinks_cheat_[static_cast<std::size_t>(actor)][static_cast<std::size_t>(partner)];
        if (gossip_ && !expect_cheat) {
            const std::uint8_t friends =
                neighbors_[static_cast<std::size_t>(actor)] &
                static_cast<std::uint8_t>(~(1u << partner));
            int votes = 0;
            std::uint8_t rest = friends;
            while (rest != 0) {
                const int f = std::countr_zero(static_cast<unsigned>(rest));
                rest &= static_cast<std::uint8_t>(rest - 1);
                if (!thinks_cheat_[static_cast<std::size_t>(actor)][static_cast<std::size_t>(f)] &&
                    thinks_cheat_[static_cast<std::size_t>(f)][static_cast<std::size_t>(partner)]) {
                    ++votes;
                }
            }
            const int degree =
                std::popcount(static_cast<unsigned>(neighbors_[static_cast<std::size_t>(actor)]));
            if (2 * votes >= degree + 1) expect_cheat = true;
        }
        return expect_cheat || cheater_[static_cast<std::size_t>(actor)];
    }

    void record(int depth, long double weight) {
        double sum[2] = {0.0, 0.0};
        int count[2] = {0, 0};
        for (int v = 0; v < n_; ++v) {
            if (plays_[static_cast<std::size_t>(v)] == 0) continue;
            const int t = cheater_[static_cast<std::size_t>(v)] ? 1 : 0;
            sum[t] += payoff_[static_cast<std::size_t>(v)] /
                      plays_[static_cast<std::size_t>(v)];
            ++count[t];
        }
        StepAccum& acc = accum_[static_cast<std::size_t>(depth)];
        for (int t = 0; t < 2; ++t) {
            if (count[t] == 0) continue;
            acc.weight[t] += weight;
            acc.value[t] += weight * (sum[t] / count[t]);
        }
    }

    void walk(int depth, long double weight) {
        const long double branch_weight = weight / pairs_.size();
        for (const auto& [a, b] : pairs_) {
            const bool a_cheats = cheats(a, b);
            const bool b_cheats = cheats(b, a);
            const bool prev_ab =
                thinks_cheat_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            const bool prev_ba =
                thinks_cheat_[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
            payoff_[static_cast<std::size_t>(a)] += pay(a_cheats, b_cheats);
            payoff_[static_cast<std::size_t>(b)] += pay(b_cheats, a_cheats);
            ++plays_[static_cast<std::size_t>(a)];
            ++plays_[static_cast<std::size_t>(b)];
            thinks_cheat_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = b_cheats;
            thinks_cheat_[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = a_cheats;

            record(depth, branch_weight);
            if (depth + 1 < steps_) walk(depth + 1, branch_weight);

            thinks_cheat_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = prev_ab;
            thinks_cheat_[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = prev_ba;
            --plays_[static_cast<std::size_t>(a)];
            --plays_[static_cast<std::size_t>(b)];
            payoff_[static_cast<std::size_t>(a)] -= pay(a_cheats, b_cheats);
            payoff_[static_cast<std::size_t>(b)] -= pay(b_cheats, a_cheats);
        }
    }

    double pay(bool own_cheats, bool other_cheats) const {
        if (own_cheats) return other_cheats ? payoffs_.dd : payoffs_.dc;
        return other_cheats ? payoffs_.cd : payoffs_.cc;
    }

    int n_;
    int steps_;
    bool gossip_;
    std::array<std::uint8_t, max_agents> neighbors_{};
    PayoffMatrix payoffs_;
    std::vector<std::pair<int, int>> pairs_;

    std::array<bool, max_agents> cheater_{};
    std::array<std::array<bool, max_agents>, max_agents> thinks_cheat_{};
    std::array<double, max_agents> payoff_{};
    std::array<int, max_agents> plays_{};
    std::vector<StepAccum> accum_;
};

inline void check_oracle_guards(int n, int m, int steps) {
    if (n < 2) {
        throw invalid_parameter_error("need at least 2 agents");
    }
    if (n > ExactEnumerator::max_agents) {
        throw capacity_error("exact curves are limited to n <= " +
                             std::to_string(ExactEnumerator::max_agents));
    }
    if (m < 0 || m > n) {
        throw invalid_parameter_error("cheater count outside 0..n");
    }
    if (steps < 1) {
        throw invalid_parameter_error("need at least one step");
    }
    if (steps > ExactEnumerator::max_steps) {
        throw capacity_error("exact curves are limited to " +
                             std::to_string(ExactEnumerator::max_steps) +
                             " steps");
    }
}

}  // namespace detail

// Expected curves of the unstructured game: all C(n,2)^steps pairing
// sequences and all C(n,m) type assignments, equally weighted, with the
// simulator's convention that a type's mean exists only where someone of
// that type has played.
inline ExactCurves exact_vanilla_curves(int n, int m, int steps,
                                        const PayoffMatrix& payoffs) {
    detail::check_oracle_guards(n, m, steps);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    detail::ExactEnumerator enumerator(n, std::move(pairs), false, {}, payoffs,
                                       steps);
    return enumerator.run(m);
}

// Same enumeration with pairs drawn from g's edges and gossip-informed
// actions.
inline ExactCurves exact_gossip_curves(const Graph& g, int m, int steps,
                                       const PayoffMatrix& payoffs) {
    const int n = g.node_count();
    detail::check_oracle_guards(n, m, steps);
    auto pairs = g.edges();
    if (pairs.empty()) {
        throw invalid_parameter_error("graph has no edges to interact on");
    }
    std::array<std::uint8_t, detail::ExactEnumerator::max_agents> neighbors{};
    for (int v = 0; v < n; ++v) {
        neighbors[static_cast<std::size_t>(v)] =
            static_cast<std::uint8_t>(g.adjacency_mask(v));
    }
    detail::ExactEnumerator enumerator(n, std::move(pairs), true, neighbors,
                                       payoffs, steps);
    return enumerator.run(m);
}

}  // namespace repnet
