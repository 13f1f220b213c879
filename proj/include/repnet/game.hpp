#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repnet/errors.hpp"
#include "repnet/graph.hpp"
#include "repnet/rng.hpp"

namespace repnet {

// Agent types are fixed for the lifetime of a run; only beliefs evolve.
enum class AgentType : std::uint8_t { cooperator, cheater };
enum class Action : std::uint8_t { cooperate, cheat };

// Symmetric 2x2 game payoffs: cc both cooperate, cd cooperator met a
// cheater, dc cheater met a cooperator, dd both cheat.
struct PayoffMatrix {
    double cc = 1.0;
    double cd = -1.6;
    double dc = 1.5;
    double dd = 0.0;

    static PayoffMatrix defaults() { return PayoffMatrix{}; }

    // Cheating pays (1 < dc < 2) but mutual cooperation beats the rest
    // (cd < dd < cc): the shape that makes defection a dilemma rather
    // than a dominant strategy in the repeated game.
    bool is_cooperation_dilemma() const {
        return dc > 1.0 && dc < 2.0 && cd < dd && dd < cc;
    }

    double payoff(Action own, Action other) const {
        if (own == Action::cooperate) {
            return other == Action::cooperate ? cc : cd;
        }
        return other == Action::cooperate ? dc : dd;
    }
};

// What each agent currently expects every other agent's type to be.
// Initialized all-cooperator; entries about oneself do not exist.
class BeliefMatrix {
public:
    explicit BeliefMatrix(int agent_count)
        : n_(agent_count),
          expects_cheat_(static_cast<std::size_t>(agent_count) * agent_count, 0) {}

    AgentType get(int holder, int subject) const {
        assert(holder != subject);
        assert(holder >= 0 && holder < n_ && subject >= 0 && subject < n_);
        return expects_cheat_[index(holder, subject)] ? AgentType::cheater
                                                      : AgentType::cooperator;
    }

    void set(int holder, int subject, AgentType expected) {
        assert(holder != subject);
        assert(holder >= 0 && holder < n_ && subject >= 0 && subject < n_);
        expects_cheat_[index(holder, subject)] =
            expected == AgentType::cheater ? 1 : 0;
    }

    int agent_count() const noexcept { return n_; }

    bool operator==(const BeliefMatrix&) const = default;

private:
    std::size_t index(int holder, int subject) const {
        return static_cast<std::size_t>(holder) * n_ + subject;
    }

    int n_;
    std::vector<std::uint8_t> expects_cheat_;
};

struct SimulationState {
    std::vector<AgentType> types;
    BeliefMatrix beliefs;
    std::vector<double> cumulative_payoff;
    std::vector<std::uint32_t> interactions_played;
    std::uint64_t steps_elapsed = 0;

    int agent_count() const { return static_cast<int>(types.size()); }
};

// Fresh state: exactly m uniformly chosen cheaters, everyone believed a
// cooperator, no payoffs or interactions yet.
inline SimulationState new_state(int n, int m, Rng& rng) {
    if (n < 1) {
        throw invalid_parameter_error("group size must be positive");
    }
    if (m < 0 || m > n) {
        throw invalid_parameter_error("cheater count " + std::to_string(m) +
                                      " outside 0.." + std::to_string(n));
    }
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    SimulationState state{
        std::vector<AgentType>(static_cast<std::size_t>(n), AgentType::cooperator),
        BeliefMatrix(n),
        std::vector<double>(static_cast<std::size_t>(n), 0.0),
        std::vector<std::uint32_t>(static_cast<std::size_t>(n), 0),
        0,
    };
    for (int i = 0; i < m; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) +
            rng.uniform_below(static_cast<std::uint64_t>(n - i));
        std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
        state.types[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] =
            AgentType::cheater;
    }
    return state;
}

namespace detail {
inline void check_distinct_agents(int i, int j, const SimulationState& state) {
    const int n = state.agent_count();
    if (i < 0 || i >= n || j < 0 || j >= n) {
        throw invalid_parameter_error("agent index out of range");
    }
    if (i == j) {
        throw invalid_parameter_error("an agent cannot interact with itself");
    }
}
}  // namespace detail

// Play own type when the partner is believed a cooperator; cheat otherwise.
inline Action vanilla_action(int i, int j, const SimulationState& state) {
    detail::check_distinct_agents(i, j, state);
    if (state.beliefs.get(i, j) == AgentType::cheater) return Action::cheat;
    return state.types[static_cast<std::size_t>(i)] == AgentType::cheater
               ? Action::cheat
               : Action::cooperate;
}

// i's expectation of j once gossip is heard: own distrust wins outright;
// otherwise the partner is condemned when the distrusting trusted friends
// reach a majority of the k+1 voices i listens to (own voice included).
// Trusted friends are network neighbors i still believes cooperators; j
// never votes on itself.
inline AgentType gossip_expectation(int i, int j, const SimulationState& state,
                                    const Graph& g) {
    detail::check_distinct_agents(i, j, state);
    if (state.agent_count() != g.node_count()) {
        throw invalid_parameter_error("state and graph sizes differ");
    }
    if (state.beliefs.get(i, j) == AgentType::cheater) return AgentType::cheater;
    const int degree = g.degree(i);
    int votes_against = 0;
    std::uint64_t friends = g.adjacency_mask(i) & ~(std::uint64_t{1} << j);
    while (friends != 0) {
        const int f = std::countr_zero(friends);
        friends &= friends - 1;
        if (state.beliefs.get(i, f) == AgentType::cooperator &&
            state.beliefs.get(f, j) == AgentType::cheater) {
            ++votes_against;
        }
    }
    return 2 * votes_against >= degree + 1 ? AgentType::cheater
                                           : AgentType::cooperator;
}

inline Action gossip_action(int i, int j, const SimulationState& state,
                            const Graph& g) {
    if (gossip_expectation(i, j, state, g) == AgentType::cheater) {
        return Action::cheat;
    }
    return state.types[static_cast<std::size_t>(i)] == AgentType::cheater
               ? Action::cheat
               : Action::cooperate;
}

// One interaction: payoffs credited, interaction counts bumped, and each
// side's belief overwritten with the action it just observed.
inline void play_pair(int i, int j, Action action_i, Action action_j,
                      SimulationState& state, const PayoffMatrix& payoffs) {
    detail::check_distinct_agents(i, j, state);
    state.cumulative_payoff[static_cast<std::size_t>(i)] +=
        payoffs.payoff(action_i, action_j);
    state.cumulative_payoff[static_cast<std::size_t>(j)] +=
        payoffs.payoff(action_j, action_i);
    ++state.interactions_played[static_cast<std::size_t>(i)];
    ++state.interactions_played[static_cast<std::size_t>(j)];
    state.beliefs.set(i, j, action_j == Action::cheat ? AgentType::cheater
                                                      : AgentType::cooperator);
    state.beliefs.set(j, i, action_i == Action::cheat ? AgentType::cheater
                                                      : AgentType::cooperator);
    ++state.steps_elapsed;
}

struct InteractionRecord {
    int first = 0;
    int second = 0;
    Action first_action = Action::cooperate;
    Action second_action = Action::cooperate;

    bool operator==(const InteractionRecord&) const = default;
};

namespace detail {
// Uniform unordered pair {i, j} from all C(n,2) pairs, in (i, j) order.
inline std::pair<int, int> draw_pair(int n, Rng& rng) {
    std::uint64_t index = rng.uniform_below(
        static_cast<std::uint64_t>(n) * (n - 1) / 2);
    for (int i = 0;; ++i) {
        const std::uint64_t row = static_cast<std::uint64_t>(n - 1 - i);
        if (index < row) return {i, i + 1 + static_cast<int>(index)};
        index -= row;
    }
}
}  // namespace detail

inline InteractionRecord step_vanilla(SimulationState& state,
                                      const PayoffMatrix& payoffs, Rng& rng) {
    const int n = state.agent_count();
    if (n < 2) {
        throw invalid_parameter_error("need at least 2 agents to interact");
    }
    const auto [i, j] = detail::draw_pair(n, rng);
    const Action ai = vanilla_action(i, j, state);
    const Action aj = vanilla_action(j, i, state);
    play_pair(i, j, ai, aj, state, payoffs);
    return {i, j, ai, aj};
}

namespace detail {
inline std::pair<int, int> draw_edge(const SimulationState& state,
                                     const Graph& g, Rng& rng) {
    if (state.agent_count() != g.node_count()) {
        throw invalid_parameter_error("state and graph sizes differ");
    }
    const std::size_t edge_count = g.edge_count();
    if (edge_count == 0) {
        throw invalid_parameter_error("graph has no edges to interact on");
    }
    return g.edge_at(rng.uniform_below(edge_count));
}
}  // namespace detail

// One interaction on a uniformly drawn edge, with gossip-informed actions.
inline InteractionRecord step_gossip(SimulationState& state, const Graph& g,
                                     const PayoffMatrix& payoffs, Rng& rng) {
    const auto [i, j] = detail::draw_edge(state, g, rng);
    const Action ai = gossip_action(i, j, state, g);
    const Action aj = gossip_action(j, i, state, g);
    play_pair(i, j, ai, aj, state, payoffs);
    return {i, j, ai, aj};
}

// One interaction on a uniformly drawn edge with the no-gossip decision
// rule. Draws edges exactly like step_gossip, so seed-matched trajectories
// of the two are directly comparable.
inline InteractionRecord step_vanilla_on(SimulationState& state, const Graph& g,
                                         const PayoffMatrix& payoffs, Rng& rng) {
    const auto [i, j] = detail::draw_edge(state, g, rng);
    const Action ai = vanilla_action(i, j, state);
    const Action aj = vanilla_action(j, i, state);
    play_pair(i, j, ai, aj, state, payoffs);
    return {i, j, ai, aj};
}

struct TypeAverages {
    std::optional<double> coop_mean;
    std::optional<double> cheat_mean;
};

// Per-type mean of cumulative payoff per interaction, over agents that
// have played at least once; absent when no agent of the type has played.
inline TypeAverages type_average_payoffs(const SimulationState& state) {
    double sum[2] = {0.0, 0.0};
    int count[2] = {0, 0};
    const int n = state.agent_count();
    for (int v = 0; v < n; ++v) {
        const std::uint32_t played =
            state.interactions_played[static_cast<std::size_t>(v)];
        if (played == 0) continue;
        const int t = state.types[static_cast<std::size_t>(v)] ==
                              AgentType::cheater
                          ? 1
                          : 0;
        sum[t] += state.cumulative_payoff[static_cast<std::size_t>(v)] /
                  static_cast<double>(played);
        ++count[t];
    }
    TypeAverages out;
    if (count[0] > 0) out.coop_mean = sum[0] / count[0];
    if (count[1] > 0) out.cheat_mean = sum[1] / count[1];
    return out;
}

}  // namespace repnet
